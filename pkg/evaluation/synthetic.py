"""Desk-scale fixture where item metadata fully determines user preference.

Tags are partitioned into `n_groups` co-liked groups. Every item belongs to
one group and carries `tags_per_item` tags from it. Every user draws one
affinity per group from N(0, 1); an interaction is positive when the user's
affinity for the item's group plus Gaussian noise is above zero. Optional
About-Me words are drawn from the vocabulary of the user's favourite group.
"""

from typing import Any, Dict, Optional

import numpy as np

from config.schemas import SyntheticSpecSchema, load_or_raise
from data.models import EntityIndex, InteractionSet, RecommendationDataset
from utils.logging_config import get_logger

WORDS_PER_GROUP = 10

logger = get_logger('evaluation.synthetic')


def tag_name(group: int, k: int) -> str:
    return f"tag_{group}_{k}"


def word_name(group: int, k: int) -> str:
    return f"word{chr(ord('a') + group % 26)}{'x' * (group // 26)}{chr(ord('a') + k % 26)}"


def generate_synthetic(
    n_users: int = 2000,
    n_items: int = 500,
    n_tags: int = 50,
    n_groups: int = 5,
    tags_per_item: int = 3,
    interactions_per_user: int = 20,
    noise: float = 0.1,
    words_per_user: int = 5,
    seed: int = 0,
    name: Optional[str] = None
) -> RecommendationDataset:
    spec = load_or_raise(SyntheticSpecSchema(), {
        'n_users': n_users, 'n_items': n_items, 'n_tags': n_tags, 'n_groups': n_groups,
        'tags_per_item': tags_per_item, 'interactions_per_user': interactions_per_user,
        'noise': noise, 'words_per_user': words_per_user, 'seed': seed,
    })
    return _generate(spec, name)


def generate_from_spec(spec: Dict[str, Any], name: Optional[str] = None) -> RecommendationDataset:
    return _generate(load_or_raise(SyntheticSpecSchema(), spec), name)


def _generate(spec: Dict[str, Any], name: Optional[str]) -> RecommendationDataset:
    rng = np.random.default_rng(spec['seed'])
    n_users, n_items, n_groups = spec['n_users'], spec['n_items'], spec['n_groups']
    tags_per_group = spec['n_tags'] // n_groups

    item_groups = rng.integers(0, n_groups, size=n_items)
    item_tags = [
        [tag_name(g, int(k)) for k in np.sort(rng.choice(tags_per_group, size=spec['tags_per_item'], replace=False))]
        for g in item_groups
    ]
    affinity = rng.standard_normal((n_users, n_groups))

    users, items, labels = [], [], []
    for user in range(n_users):
        chosen = np.sort(rng.choice(n_items, size=spec['interactions_per_user'], replace=False))
        signal = affinity[user, item_groups[chosen]] + spec['noise'] * rng.standard_normal(len(chosen))
        users.append(np.full(len(chosen), user))
        items.append(chosen)
        labels.append((signal > 0).astype(np.int8))

    user_tokens = None
    if spec['words_per_user'] > 0:
        favourite = affinity.argmax(axis=1)
        user_tokens = [
            [word_name(int(g), int(k)) for k in np.sort(rng.choice(WORDS_PER_GROUP, size=min(spec['words_per_user'], WORDS_PER_GROUP), replace=False))]
            for g in favourite
        ]

    dataset = RecommendationDataset(
        name=name or f"synthetic-{spec['seed']}",
        interactions=InteractionSet(np.concatenate(users), np.concatenate(items), np.concatenate(labels)),
        users=EntityIndex(f"user_{u}" for u in range(n_users)),
        items=EntityIndex(f"item_{i}" for i in range(n_items)),
        item_tags=item_tags,
        user_tokens=user_tokens,
        tag_groups={tag_name(g, k): g for g in range(n_groups) for k in range(tags_per_group)},
    )
    logger.info("Generated synthetic dataset", extra={f"dataset_{k}": v for k, v in dataset.summary().items()})
    return dataset

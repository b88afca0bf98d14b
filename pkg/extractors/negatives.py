from typing import Sequence, Union

import numpy as np

from data.models import InteractionSet, NEGATIVE
from utils.exceptions import ValidationError
from utils.logging_config import get_logger

logger = get_logger('extractors.negatives')


def sample_negatives(
    positives: InteractionSet,
    all_items: Union[int, Sequence[int]],
    ratio: int = 3,
    seed: int = 0
) -> InteractionSet:
    """Draw `ratio` negatives per positive, uniformly and without replacement,
    from the items each user never interacted with.

    Users are processed in ascending index order from a single seeded
    generator, so the sample depends only on (positives, all_items, ratio, seed).
    """
    if ratio < 1:
        raise ValidationError("ratio must be at least 1", field_name='ratio', field_value=ratio)
    catalogue = np.arange(all_items) if np.isscalar(all_items) else np.unique(np.asarray(all_items, dtype=np.int64))
    rng = np.random.default_rng(seed)

    users, items = [], []
    for user in np.unique(positives.users):
        seen = np.unique(positives.items[positives.users == user])
        candidates = np.setdiff1d(catalogue, seen, assume_unique=True)
        needed = ratio * len(seen)
        if len(candidates) < needed:
            raise ValidationError(
                f"User {int(user)} has only {len(candidates)} unseen items, {needed} negatives requested",
                field_name='user', field_value=int(user)
            )
        drawn = rng.choice(candidates, size=needed, replace=False)
        users.append(np.full(needed, user, dtype=np.int64))
        items.append(np.sort(drawn))

    if not users:
        return InteractionSet.empty()
    users, items = np.concatenate(users), np.concatenate(items)
    logger.debug("Sampled negatives", extra={'negatives': len(items), 'ratio': ratio})
    return InteractionSet(users, items, np.full(len(items), NEGATIVE, dtype=np.int8))

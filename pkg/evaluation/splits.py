"""Warm and cold-item train/validation/test splits."""

from typing import Tuple

import numpy as np

from data.models import DatasetSplit, InteractionSet
from utils.exceptions import ValidationError
from utils.logging_config import get_logger
from utils.validators import require_fraction

MIN_COLD_ITEMS = 5

logger = get_logger('evaluation.splits')


def _hold_out(data: InteractionSet, candidates: np.ndarray, n_take: int) -> Tuple[np.ndarray, np.ndarray]:
    """Walk `candidates` in order, taking a pair only while its user and item
    both keep at least one other interaction. Returns (taken, kept) positions."""
    user_counts = np.bincount(data.users[candidates], minlength=int(data.users.max()) + 1) if len(data) else np.zeros(0)
    item_counts = np.bincount(data.items[candidates], minlength=int(data.items.max()) + 1) if len(data) else np.zeros(0)
    taken = np.zeros(len(candidates), dtype=bool)
    n_taken = 0
    for position, k in enumerate(candidates):
        if n_taken == n_take:
            break
        user, item = data.users[k], data.items[k]
        if user_counts[user] > 1 and item_counts[item] > 1:
            user_counts[user] -= 1
            item_counts[item] -= 1
            taken[position] = True
            n_taken += 1
    return np.sort(candidates[taken]), np.sort(candidates[~taken])


def _carve_validation(data: InteractionSet, pool: np.ndarray, fraction: float, rng: np.random.Generator):
    """Best-effort warm-style validation slice of `pool`; never strands a user or item."""
    n_validation = int(round(fraction * len(pool)))
    if n_validation == 0:
        return pool, np.empty(0, dtype=np.int64)
    validation, train = _hold_out(data, rng.permutation(pool), n_validation)
    return train, validation


def train_validation_split(data: InteractionSet, validation_fraction: float = 0.1, seed: int = 0) -> DatasetSplit:
    """Training on a whole dataset: only a validation slice is held back, test stays empty."""
    require_fraction(validation_fraction, 'validation_fraction', allow_zero=True)
    rng = np.random.default_rng(seed)
    train, validation = _carve_validation(data, np.arange(len(data)), validation_fraction, rng)
    return DatasetSplit(data.subset(train), data.subset(validation), InteractionSet.empty(), kind='warm', seed=seed)


def warm_split(
    data: InteractionSet,
    test_fraction: float = 0.2,
    seed: int = 0,
    validation_fraction: float = 0.1
) -> DatasetSplit:
    """Random pairs go to test while every user and item keeps a training pair."""
    require_fraction(test_fraction, 'test_fraction')
    require_fraction(validation_fraction, 'validation_fraction', allow_zero=True)
    rng = np.random.default_rng(seed)

    n_test = int(round(test_fraction * len(data)))
    test, pool = _hold_out(data, rng.permutation(len(data)), n_test)
    if len(test) < n_test:
        raise ValidationError(
            f"Only {len(test)} of {n_test} test pairs can be held out while keeping every user and item in training",
            field_name='test_fraction', field_value=test_fraction
        )
    train, validation = _carve_validation(data, pool, validation_fraction, rng)

    split = DatasetSplit(data.subset(train), data.subset(validation), data.subset(test), kind='warm', seed=seed)
    logger.debug("Warm split", extra={'seed': seed, 'train': len(train), 'validation': len(validation), 'test': len(test)})
    return split


def cold_item_split(
    data: InteractionSet,
    item_fraction: float = 0.2,
    seed: int = 0,
    validation_fraction: float = 0.1
) -> DatasetSplit:
    """Every interaction of a random `item_fraction` of the items goes to test."""
    require_fraction(item_fraction, 'item_fraction')
    require_fraction(validation_fraction, 'validation_fraction', allow_zero=True)
    items = np.unique(data.items)
    if len(items) < MIN_COLD_ITEMS:
        raise ValidationError(
            f"A cold-item split needs at least {MIN_COLD_ITEMS} items, got {len(items)}",
            field_name='items', field_value=len(items)
        )
    rng = np.random.default_rng(seed)

    held_out = rng.choice(items, size=int(round(item_fraction * len(items))), replace=False)
    in_test = np.isin(data.items, held_out)
    test = np.flatnonzero(in_test)
    train, validation = _carve_validation(data, np.flatnonzero(~in_test), validation_fraction, rng)

    split = DatasetSplit(data.subset(train), data.subset(validation), data.subset(test), kind='cold', seed=seed)
    logger.debug("Cold item split", extra={'seed': seed, 'held_out_items': len(held_out), 'test': len(test)})
    return split


def make_split(
    data: InteractionSet,
    kind: str,
    seed: int,
    test_fraction: float = 0.2,
    cold_item_fraction: float = 0.2,
    validation_fraction: float = 0.1
) -> DatasetSplit:
    if kind == 'warm':
        return warm_split(data, test_fraction, seed, validation_fraction)
    if kind == 'cold':
        return cold_item_split(data, cold_item_fraction, seed, validation_fraction)
    raise ValidationError(f"Unknown split kind {kind!r}", field_name='kind', field_value=kind)

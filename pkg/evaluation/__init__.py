"""Splits, metrics and fixtures.

The experiment runner lives in `evaluation.experiment_service` and is not
re-exported here: it depends on the trainer, which itself scores its
validation slice with `evaluation.metrics`.
"""

from .metrics import mean_auc, per_user_auc, user_auc, has_qualifying_user
from .splits import warm_split, cold_item_split, make_split, train_validation_split
from .synthetic import generate_synthetic, generate_from_spec

__all__ = [
    'mean_auc', 'per_user_auc', 'user_auc', 'has_qualifying_user',
    'warm_split', 'cold_item_split', 'make_split', 'train_validation_split',
    'generate_synthetic', 'generate_from_spec',
]

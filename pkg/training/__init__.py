from .config import TrainConfig
from .trainer import (
    log_likelihood,
    gradients,
    sgd_step,
    train_epoch,
    fit,
    fold_in_features,
    fold_in_mapping,
    validation_auc,
)

__all__ = [
    "TrainConfig", "log_likelihood", "gradients", "sgd_step", "train_epoch", "fit",
    "fold_in_features", "fold_in_mapping", "validation_auc",
]

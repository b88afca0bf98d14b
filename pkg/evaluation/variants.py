"""Named model variants and how each is trained on a split."""

from dataclasses import dataclass
from typing import Optional, Protocol

import numpy as np

from baselines.indicator import make_indicator_mapping
from baselines.lsi_lr import train_lsi_lr
from baselines.lsi_up import train_lsi_up
from core.prediction import predict_pairs
from core.state import ModelState
from data.models import DatasetSplit, FeatureMapping, InteractionSet, RecommendationDataset, TrainingHistory
from extractors.features import build_feature_mapping
from training.config import TrainConfig
from training.trainer import fit
from utils.exceptions import ValidationError
from utils.logging_config import get_logger

logger = get_logger('evaluation.variants')


class Scorer(Protocol):
    def score(self, users, items) -> np.ndarray:
        ...


@dataclass(frozen=True)
class ModelVariant:
    name: str
    family: str
    item_ids: bool = False
    user_about: bool = False

    @property
    def needs_user_features(self) -> bool:
        return self.user_about


VARIANTS = {
    'mf': ModelVariant('mf', 'indicator'),
    'lsi-lr': ModelVariant('lsi-lr', 'lsi-lr'),
    'lsi-up': ModelVariant('lsi-up', 'lsi-up'),
    'lightfm-tags': ModelVariant('lightfm-tags', 'hybrid'),
    'lightfm-tags-ids': ModelVariant('lightfm-tags-ids', 'hybrid', item_ids=True),
    'lightfm-tags-about': ModelVariant('lightfm-tags-about', 'hybrid', user_about=True),
}


def get_variant(name: str) -> ModelVariant:
    try:
        return VARIANTS[name]
    except KeyError:
        raise ValidationError(
            f"Unknown model variant {name!r}; expected one of {', '.join(VARIANTS)}",
            field_name='model', field_value=name
        ) from None


def check_compatible(variant: ModelVariant, dataset: RecommendationDataset) -> None:
    if variant.needs_user_features and not dataset.has_user_features:
        raise ValidationError(
            f"Variant {variant.name!r} needs user metadata, which dataset {dataset.name!r} lacks",
            field_name='model', field_value=variant.name
        )


@dataclass
class FactorizationScorer:
    model: ModelState
    mapping: FeatureMapping
    history: Optional[TrainingHistory] = None

    def score(self, users, items) -> np.ndarray:
        return predict_pairs(self.model, self.mapping, users, items)


def variant_mapping(variant: ModelVariant, dataset: RecommendationDataset) -> FeatureMapping:
    if variant.family == 'indicator':
        return make_indicator_mapping(len(dataset.users), len(dataset.items), list(dataset.users), list(dataset.items))
    return build_feature_mapping(dataset, item_ids=variant.item_ids, user_about=variant.user_about)


def _lsi_dimension(d: int, *shape: int) -> int:
    # the tag matrix of a small catalogue can have fewer columns than d
    capped = min(d, *shape)
    if capped < d:
        logger.warning("Latent dimensionality capped by matrix shape", extra={'requested': d, 'used': capped})
    return capped


def train_variant(
    variant: ModelVariant,
    dataset: RecommendationDataset,
    split: DatasetSplit,
    d: int,
    config: TrainConfig,
    dtype=np.float32
) -> Scorer:
    check_compatible(variant, dataset)

    if variant.family in ('indicator', 'hybrid'):
        mapping = variant_mapping(variant, dataset)
        model = ModelState.initialize(mapping.n_features('user'), mapping.n_features('item'), d, seed=config.rng_seed, dtype=dtype)
        history = fit(model, mapping, split.train, split.validation, config)
        return FactorizationScorer(model, mapping, history)

    item_features = build_feature_mapping(dataset).indicator_matrix('item')
    # LSI baselines have no early stopping; the validation slice is training data for them
    train = InteractionSet.concat([split.train, split.validation])
    n_users = len(dataset.users)
    if variant.family == 'lsi-lr':
        return train_lsi_lr(item_features, train, _lsi_dimension(d, *item_features.shape), n_users=n_users, seed=config.rng_seed)
    return train_lsi_up(item_features, train, _lsi_dimension(d, n_users, item_features.shape[1]), n_users=n_users, seed=config.rng_seed)

import math
from typing import Iterable, Tuple

import numpy as np

from data.models import FeatureMapping
from utils.validators import as_feature_indices, require_same_length, require_side
from .state import ModelState, Representation

_PROBABILITY_FLOOR = np.finfo(np.float64).tiny
_PROBABILITY_CEILING = np.nextafter(1.0, 0.0)


def sigmoid(x):
    """Branch-on-sign logistic; never overflows and stays strictly inside (0, 1)."""
    x = np.asarray(x, dtype=np.float64)
    flat = np.atleast_1d(x)
    out = np.empty_like(flat)
    positive = flat >= 0
    out[positive] = 1.0 / (1.0 + np.exp(-flat[positive]))
    exp_x = np.exp(flat[~positive])
    out[~positive] = exp_x / (1.0 + exp_x)
    out = np.clip(out, _PROBABILITY_FLOOR, _PROBABILITY_CEILING)
    return out.reshape(x.shape) if x.ndim else float(out[0])


def scalar_sigmoid(x: float) -> float:
    """Plain-float sigmoid for the per-interaction training loop."""
    if x >= 0:
        value = 1.0 / (1.0 + math.exp(-x))
    else:
        z = math.exp(x)
        value = z / (1.0 + z)
    return float(min(max(value, _PROBABILITY_FLOOR), _PROBABILITY_CEILING))


def combine_features(model: ModelState, side: str, features: Iterable[int]) -> Representation:
    require_side(side)
    indices = as_feature_indices(features, model.n_features(side), side)
    latent = model.embeddings(side)[indices].sum(axis=0)
    bias = model.biases(side)[indices].sum()
    return Representation(latent=latent, bias=float(bias))


def raw_score(user: Representation, item: Representation) -> float:
    return float(np.dot(user.latent.astype(np.float64), item.latent.astype(np.float64)) + user.bias + item.bias)


def predict(model: ModelState, user_features: Iterable[int], item_features: Iterable[int]) -> float:
    user = combine_features(model, 'user', user_features)
    item = combine_features(model, 'item', item_features)
    return sigmoid(raw_score(user, item))


def entity_representations(model: ModelState, mapping: FeatureMapping, side: str) -> Tuple[np.ndarray, np.ndarray]:
    """Latents and biases of every user (or item) at once."""
    indicators = mapping.indicator_matrix(side)
    latents = np.asarray(indicators @ model.embeddings(side).astype(np.float64))
    biases = np.asarray(indicators @ model.biases(side).astype(np.float64)).reshape(-1)
    return latents, biases


def user_representations(model: ModelState, mapping: FeatureMapping) -> Tuple[np.ndarray, np.ndarray]:
    return entity_representations(model, mapping, "user")


def item_representations(model: ModelState, mapping: FeatureMapping) -> Tuple[np.ndarray, np.ndarray]:
    return entity_representations(model, mapping, "item")


def predict_pairs(
    model: ModelState,
    mapping: FeatureMapping,
    users: np.ndarray,
    items: np.ndarray,
    probabilities: bool = False
) -> np.ndarray:
    """Score many (user, item) pairs; raw scores unless `probabilities` is set."""
    user_latents, user_biases = entity_representations(model, mapping, 'user')
    item_latents, item_biases = entity_representations(model, mapping, 'item')
    users = np.asarray(users, dtype=np.int64)
    items = np.asarray(items, dtype=np.int64)
    require_same_length(users, items, names=("users", "items"))
    scores = np.einsum('ij,ij->i', user_latents[users], item_latents[items]) + user_biases[users] + item_biases[items]
    return sigmoid(scores) if probabilities else scores

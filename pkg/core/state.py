"""Model parameters: per-feature embeddings, biases and Adagrad accumulators."""

from dataclasses import dataclass
from typing import Optional, Dict

import numpy as np

from utils.exceptions import ValidationError
from utils.validators import require_positive_int, require_side

DEFAULT_DTYPE = np.float32
INITIAL_ACCUMULATOR = 1.0


def init_embeddings(rng: np.random.Generator, rows: int, d: int, dtype=DEFAULT_DTYPE) -> np.ndarray:
    # uniform on [-0.5/d, 0.5/d]: initial scores sit near 0, predictions near 0.5
    scale = 0.5 / d
    return rng.uniform(-scale, scale, size=(rows, d)).astype(dtype)


@dataclass
class Representation:
    latent: np.ndarray
    bias: float


@dataclass
class ModelState:
    d: int
    user_embeddings: np.ndarray
    item_embeddings: np.ndarray
    user_biases: np.ndarray
    item_biases: np.ndarray
    user_embedding_accumulators: np.ndarray
    item_embedding_accumulators: np.ndarray
    user_bias_accumulators: np.ndarray
    item_bias_accumulators: np.ndarray
    epoch_counter: int = 0

    def __post_init__(self):
        require_positive_int(self.d, 'd')
        for side in ('user', 'item'):
            embeddings, biases = self.embeddings(side), self.biases(side)
            if embeddings.ndim != 2 or embeddings.shape[1] != self.d:
                raise ValidationError(f"{side} embeddings must have shape (n, {self.d})")
            if biases.shape != (embeddings.shape[0],):
                raise ValidationError(f"{side} biases must have one entry per {side} feature")
            if self.embedding_accumulators(side).shape != embeddings.shape:
                raise ValidationError(f"{side} embedding accumulators must match the embedding table")
            if self.bias_accumulators(side).shape != biases.shape:
                raise ValidationError(f"{side} bias accumulators must match the bias table")

    @classmethod
    def initialize(
        cls,
        n_user_features: int,
        n_item_features: int,
        d: int,
        seed: Optional[int] = None,
        dtype=DEFAULT_DTYPE
    ) -> 'ModelState':
        require_positive_int(d, 'd')
        rng = np.random.default_rng(seed)
        user_embeddings = init_embeddings(rng, n_user_features, d, dtype)
        item_embeddings = init_embeddings(rng, n_item_features, d, dtype)
        return cls(
            d=d,
            user_embeddings=user_embeddings,
            item_embeddings=item_embeddings,
            user_biases=np.zeros(n_user_features, dtype=dtype),
            item_biases=np.zeros(n_item_features, dtype=dtype),
            user_embedding_accumulators=np.full_like(user_embeddings, INITIAL_ACCUMULATOR),
            item_embedding_accumulators=np.full_like(item_embeddings, INITIAL_ACCUMULATOR),
            user_bias_accumulators=np.full(n_user_features, INITIAL_ACCUMULATOR, dtype=dtype),
            item_bias_accumulators=np.full(n_item_features, INITIAL_ACCUMULATOR, dtype=dtype),
        )

    @property
    def dtype(self) -> np.dtype:
        return self.user_embeddings.dtype

    def embeddings(self, side: str) -> np.ndarray:
        return self.user_embeddings if require_side(side) == 'user' else self.item_embeddings

    def biases(self, side: str) -> np.ndarray:
        return self.user_biases if require_side(side) == 'user' else self.item_biases

    def embedding_accumulators(self, side: str) -> np.ndarray:
        return self.user_embedding_accumulators if require_side(side) == 'user' else self.item_embedding_accumulators

    def bias_accumulators(self, side: str) -> np.ndarray:
        return self.user_bias_accumulators if require_side(side) == 'user' else self.item_bias_accumulators

    def n_features(self, side: str) -> int:
        return self.embeddings(side).shape[0]

    @property
    def parameter_count(self) -> int:
        return (self.n_features('user') + self.n_features('item')) * (self.d + 1)

    def append_features(self, side: str, count: int, seed: Optional[int] = None) -> None:
        """Grow one side by `count` freshly initialized rows; existing rows are untouched."""
        rng = np.random.default_rng(seed)
        new_rows = init_embeddings(rng, count, self.d, self.dtype)
        new_accumulators = np.full_like(new_rows, INITIAL_ACCUMULATOR)
        prefix = 'user' if require_side(side) == 'user' else 'item'
        setattr(self, f'{prefix}_embeddings', np.concatenate([self.embeddings(side), new_rows]))
        setattr(self, f'{prefix}_biases', np.concatenate([self.biases(side), np.zeros(count, self.dtype)]))
        setattr(self, f'{prefix}_embedding_accumulators',
                np.concatenate([self.embedding_accumulators(side), new_accumulators]))
        setattr(self, f'{prefix}_bias_accumulators',
                np.concatenate([self.bias_accumulators(side), np.full(count, INITIAL_ACCUMULATOR, self.dtype)]))

    def tables(self) -> Dict[str, np.ndarray]:
        return {
            'user_embeddings': self.user_embeddings,
            'item_embeddings': self.item_embeddings,
            'user_biases': self.user_biases,
            'item_biases': self.item_biases,
            'user_embedding_accumulators': self.user_embedding_accumulators,
            'item_embedding_accumulators': self.item_embedding_accumulators,
            'user_bias_accumulators': self.user_bias_accumulators,
            'item_bias_accumulators': self.item_bias_accumulators,
        }

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(t)) for t in self.tables().values())

    def copy(self) -> 'ModelState':
        return ModelState(d=self.d, epoch_counter=self.epoch_counter, **{k: v.copy() for k, v in self.tables().items()})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ModelState) or self.d != other.d or self.epoch_counter != other.epoch_counter:
            return False
        mine, theirs = self.tables(), other.tables()
        return all(mine[k].dtype == theirs[k].dtype and np.array_equal(mine[k], theirs[k]) for k in mine)

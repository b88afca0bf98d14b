"""Random-hyperplane (sign) hashing for cosine similarity."""

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from utils.exceptions import ValidationError
from utils.validators import require_positive_int
from .similarity import cosine_to_all, rank_by_similarity


@dataclass(frozen=True)
class HyperplaneSet:
    normals: np.ndarray

    def __post_init__(self):
        if self.normals.ndim != 2 or len(self.normals) < 1:
            raise ValidationError("A hyperplane set needs at least one normal vector")
        if np.any(np.linalg.norm(self.normals, axis=1) == 0):
            raise ValidationError("Hyperplane normals must be non-zero")

    @classmethod
    def generate(cls, k: int, d: int, seed: Optional[int] = None) -> 'HyperplaneSet':
        require_positive_int(k, 'k')
        require_positive_int(d, 'd')
        return cls(np.random.default_rng(seed).standard_normal((k, d)))

    @property
    def k(self) -> int:
        return self.normals.shape[0]

    @property
    def d(self) -> int:
        return self.normals.shape[1]


def lsh_code(v, hyperplanes: HyperplaneSet) -> np.ndarray:
    """Bit j is 1 iff v . h_j >= 0."""
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (hyperplanes.d,):
        raise ValidationError(f"Vector of shape {v.shape} does not match {hyperplanes.d}-dimensional hyperplanes")
    return lsh_codes(v[np.newaxis, :], hyperplanes)[0]


def lsh_codes(vectors: np.ndarray, hyperplanes: HyperplaneSet) -> np.ndarray:
    vectors = np.asarray(vectors, dtype=np.float64)
    if vectors.ndim != 2 or vectors.shape[1] != hyperplanes.d:
        raise ValidationError("Vectors do not match the hyperplane dimensionality")
    return (vectors @ hyperplanes.normals.T >= 0).astype(np.uint8)


def hamming_distance(code_a: np.ndarray, code_b: np.ndarray) -> int:
    if len(code_a) != len(code_b):
        raise ValidationError("Codes of different lengths")
    return int(np.count_nonzero(np.asarray(code_a) != np.asarray(code_b)))


@dataclass
class LshIndex:
    """Exact-code buckets; a query looks only at its own bucket and reranks by cosine."""

    points: np.ndarray
    hyperplanes: HyperplaneSet
    buckets: Dict[bytes, List[int]] = field(default_factory=dict)

    @classmethod
    def build(cls, points: np.ndarray, k: int, seed: Optional[int] = None) -> 'LshIndex':
        points = np.asarray(points, dtype=np.float64)
        hyperplanes = HyperplaneSet.generate(k, points.shape[1], seed)
        buckets: Dict[bytes, List[int]] = defaultdict(list)
        for index, code in enumerate(lsh_codes(points, hyperplanes)):
            buckets[code.tobytes()].append(index)
        return cls(points, hyperplanes, dict(buckets))

    def candidates(self, q) -> np.ndarray:
        return np.asarray(self.buckets.get(lsh_code(q, self.hyperplanes).tobytes(), []), dtype=np.int64)

    def query(self, q, k: int, exclude: Optional[int] = None) -> List[Tuple[int, float]]:
        ids = self.candidates(q)
        if exclude is not None:
            ids = ids[ids != exclude]
        if len(ids) == 0:
            return []
        sims = cosine_to_all(self.points[ids], np.asarray(q, dtype=np.float64))
        return rank_by_similarity(ids, sims, k)

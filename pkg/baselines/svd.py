"""Sparse matrix construction and truncated SVD for the LSI baselines."""

from dataclasses import dataclass
from typing import Iterable, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import svds
from sklearn.utils.extmath import svd_flip

from data.models import FeatureMapping
from utils.exceptions import ValidationError
from utils.logging_config import get_logger

# below this size a dense LAPACK decomposition is both exact and fast
DENSE_LIMIT = 500

logger = get_logger('baselines.svd')


@dataclass
class LatentFactorization:
    left: np.ndarray
    singular_values: np.ndarray
    right: np.ndarray

    @property
    def d(self) -> int:
        return len(self.singular_values)

    def reconstruct(self) -> np.ndarray:
        return (self.left * self.singular_values) @ self.right.T

    def residual(self, matrix) -> float:
        dense = matrix.toarray() if sp.issparse(matrix) else np.asarray(matrix, dtype=np.float64)
        return float(np.linalg.norm(dense - self.reconstruct()))


def build_sparse(n_rows: int, n_cols: int, entries: Iterable[Tuple[int, int, float]]) -> sp.csr_matrix:
    entries = list(entries)
    if not entries:
        return sp.csr_matrix((n_rows, n_cols), dtype=np.float64)
    rows, cols, values = (np.asarray(v) for v in zip(*entries))
    if rows.min() < 0 or cols.min() < 0 or rows.max() >= n_rows or cols.max() >= n_cols:
        raise ValidationError(f"Sparse entry outside a {n_rows}x{n_cols} matrix")
    if len(np.unique(rows * n_cols + cols)) != len(rows):
        raise ValidationError("Sparse matrix has more than one entry for a (row, col) cell")
    return sp.csr_matrix((values.astype(np.float64), (rows, cols)), shape=(n_rows, n_cols))


def item_feature_matrix(mapping: FeatureMapping) -> sp.csr_matrix:
    """Binary items x item-features matrix (1 where the item carries the feature)."""
    return mapping.indicator_matrix('item')


def truncated_svd(matrix, d: int, seed: int = 0, tol: float = 1e-10) -> LatentFactorization:
    """Top-d singular triplets, singular values descending, signs fixed deterministically."""
    matrix = sp.csr_matrix(matrix, dtype=np.float64)
    rank_cap = min(matrix.shape)
    if not 1 <= d <= rank_cap:
        raise ValidationError(
            f"Cannot take {d} singular vectors of a {matrix.shape[0]}x{matrix.shape[1]} matrix",
            field_name='d', field_value=d
        )

    if rank_cap <= DENSE_LIMIT or d >= rank_cap - 1:
        u, s, vt = np.linalg.svd(matrix.toarray(), full_matrices=False)
        u, s, vt = u[:, :d], s[:d], vt[:d]
    else:
        v0 = np.random.default_rng(seed).uniform(-1.0, 1.0, size=rank_cap)
        u, s, vt = svds(matrix, k=d, v0=v0, tol=tol)
        order = np.argsort(s)[::-1]
        u, s, vt = u[:, order], s[order], vt[order]

    u, vt = svd_flip(u, vt)
    logger.debug("Truncated SVD", extra={'shape': matrix.shape, 'd': d, 'top_singular_value': float(s[0])})
    return LatentFactorization(left=u, singular_values=s, right=vt.T)

from typing import Iterable, Optional

import numpy as np

from .exceptions import ValidationError, FeatureIndexError


def require_positive_int(value, field_name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 1:
        raise ValidationError(f"{field_name} must be a positive integer", field_name=field_name, field_value=value)
    return int(value)


def require_fraction(value, field_name: str, allow_zero: bool = False) -> float:
    lower_ok = value >= 0.0 if allow_zero else value > 0.0
    if not (lower_ok and value < 1.0):
        raise ValidationError(f"{field_name} must be in {'[0' if allow_zero else '(0'}, 1)", field_name=field_name, field_value=value)
    return float(value)


def as_feature_indices(features: Iterable[int], size: int, side: str) -> np.ndarray:
    """Validate a feature set against a table of `size` rows."""
    indices = np.fromiter((int(f) for f in features), dtype=np.int64)
    if indices.size == 0:
        raise ValidationError(f"{side} feature set must not be empty", field_name=f"{side}_features")
    out_of_range = (indices < 0) | (indices >= size)
    if out_of_range.any():
        raise FeatureIndexError(int(indices[out_of_range][0]), side, size)
    return indices


def require_side(side: str) -> str:
    if side not in ('user', 'item'):
        raise ValidationError("side must be 'user' or 'item'", field_name='side', field_value=side)
    return side


def require_same_length(*arrays: np.ndarray, names: Optional[Iterable[str]] = None) -> None:
    lengths = {len(a) for a in arrays}
    if len(lengths) > 1:
        raise ValidationError(f"Arrays {list(names or [])} must have equal length", details={'lengths': sorted(lengths)})

"""Input validation helpers shared across the package.

All estimators and free functions funnel their array arguments through
these checks so error messages stay uniform and sign-label handling is
defined in exactly one place (labels live in {-1, +1} internally).
"""

from __future__ import annotations

import numpy as np


class DataFormatError(ValueError):
    """A data file violates the expected format (bad row, bad value)."""


class SchemaMismatchError(ValueError):
    """A model and a dataset disagree on shapes or label counts."""


def as_feature_matrix(X, name: str = "X") -> np.ndarray:
    """Return ``X`` as a 2-D float64 array, rejecting NaN/Inf entries."""
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got ndim={arr.ndim}")
    if arr.size and not np.isfinite(arr).all():
        raise ValueError(f"{name} contains non-finite values")
    return arr


def as_sign_vector(y, name: str = "y") -> np.ndarray:
    """Return ``y`` as a 1-D int array with entries in {-1, +1}."""
    arr = np.asarray(y)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be 1-dimensional, got ndim={arr.ndim}")
    out = arr.astype(np.int64, copy=True) if arr.dtype != np.int64 else arr.copy()
    if arr.size and not np.array_equal(np.asarray(arr, dtype=np.float64), out):
        raise ValueError(f"{name} entries must be integral signs in {{-1, +1}}")
    if out.size and not np.isin(out, (-1, 1)).all():
        raise ValueError(f"{name} entries must be -1 or +1")
    return out


def as_sign_matrix(Y, name: str = "Y") -> np.ndarray:
    """Return ``Y`` as a 2-D int array with entries in {-1, +1}."""
    arr = np.asarray(Y)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got ndim={arr.ndim}")
    out = arr.astype(np.int64, copy=True)
    if arr.size and not np.array_equal(np.asarray(arr, dtype=np.float64), out):
        raise ValueError(f"{name} entries must be integral signs in {{-1, +1}}")
    if out.size and not np.isin(out, (-1, 1)).all():
        raise ValueError(f"{name} entries must be -1 or +1")
    return out


def as_weight_vector(w, m: int, name: str = "weights") -> np.ndarray:
    """Return ``w`` as non-negative float64 weights of length ``m``, not all zero."""
    arr = np.asarray(w, dtype=np.float64)
    if arr.shape != (m,):
        raise ValueError(f"{name} must have shape ({m},), got {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValueError(f"{name} contains non-finite values")
    if (arr < 0).any():
        raise ValueError(f"{name} must be non-negative")
    if arr.sum() == 0:
        raise ValueError(f"{name} must not be all zero")
    return arr


def check_same_length(name_a: str, a, name_b: str, b) -> None:
    if len(a) != len(b):
        raise ValueError(
            f"{name_a} and {name_b} must have equal length, got {len(a)} vs {len(b)}"
        )


def require_fraction(value: float, name: str) -> float:
    value = float(value)
    if not 0.0 < value < 1.0:
        raise ValueError(f"{name} must lie strictly inside (0, 1), got {value}")
    return value


def require_permutation(order, k: int) -> tuple[int, ...]:
    """Validate ``order`` as a permutation of 0..k-1 and return it as a tuple."""
    perm = tuple(int(v) for v in order)
    if sorted(perm) != list(range(k)):
        raise ValueError(f"order must be a permutation of 0..{k - 1}, got {perm}")
    return perm

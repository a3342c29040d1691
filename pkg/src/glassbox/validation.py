"""Input validation helpers used by the estimator classes."""

from __future__ import annotations

import numpy as np

from .exceptions import DimensionMismatchError


def as_feature_matrix(X, *, name: str = "X") -> np.ndarray:
    """Coerce ``X`` to a 2-d float64 array with finite entries.

    A pandas DataFrame (or anything else with ``to_numpy``) is accepted;
    a 1-d array is treated as a single column.
    """
    if hasattr(X, "to_numpy"):
        X = X.to_numpy()
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise DimensionMismatchError(f"{name} must be 2-dimensional, got shape {arr.shape}")
    if arr.size and not np.all(np.isfinite(arr)):
        raise DimensionMismatchError(f"{name} contains NaN or infinite values")
    return arr


def as_target_vector(y, *, n_rows: int | None = None, name: str = "y") -> np.ndarray:
    """Coerce ``y`` to a 1-d float64 array, optionally checking its length."""
    if hasattr(y, "to_numpy"):
        y = y.to_numpy()
    arr = np.asarray(y, dtype=float)
    if arr.ndim != 1:
        raise DimensionMismatchError(f"{name} must be 1-dimensional, got shape {arr.shape}")
    if arr.size and not np.all(np.isfinite(arr)):
        raise DimensionMismatchError(f"{name} contains NaN or infinite values")
    if n_rows is not None and arr.shape[0] != n_rows:
        raise DimensionMismatchError(
            f"{name} has {arr.shape[0]} rows but the feature matrix has {n_rows}"
        )
    return arr


def check_n_features(X: np.ndarray, expected: int) -> None:
    """Raise when the column count of ``X`` does not match ``expected``."""
    if X.shape[1] != expected:
        raise DimensionMismatchError(
            f"expected {expected} feature column(s), got {X.shape[1]}"
        )


def default_feature_names(X, n_features: int) -> tuple[str, ...]:
    """Feature names from a DataFrame-like ``X``, or ``x1..xn`` otherwise."""
    cols = getattr(X, "columns", None)
    if cols is not None and len(cols) == n_features:
        return tuple(str(c) for c in cols)
    return tuple(f"x{i + 1}" for i in range(n_features))

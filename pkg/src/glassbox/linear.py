"""Ordinary least squares fitting of a globally linear model.

The solver works on an orthogonal decomposition of the design matrix
(SVD via ``numpy.linalg.lstsq``) rather than the normal equations, so it
stays accurate on poorly conditioned inputs, and it refuses to fit a
rank-deficient design instead of silently picking one of infinitely many
solutions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from sklearn.base import BaseEstimator, RegressorMixin

from .dataset import Dataset
from .exceptions import DimensionMismatchError, RankDeficiencyError
from .validation import (
    as_feature_matrix,
    as_target_vector,
    check_n_features,
    default_feature_names,
)

__all__ = ["LinearModel", "fit_ols", "predict_linear", "LinearRegressor"]

# A singular value below RANK_RTOL times the largest one counts as zero.
RANK_RTOL = 1e-10

_INTERCEPT_NAME = "(intercept)"


@dataclass(frozen=True)
class LinearModel:
    """A fitted linear predictor ``intercept + sum(weights * x)``."""

    intercept: float
    weights: tuple[float, ...]
    feature_names: tuple[str, ...]

    def __post_init__(self):
        if len(self.weights) != len(self.feature_names):
            raise DimensionMismatchError(
                f"{len(self.weights)} weight(s) for {len(self.feature_names)} feature(s)"
            )

    @property
    def n_features(self) -> int:
        return len(self.weights)

    def predict_matrix(self, X: np.ndarray) -> np.ndarray:
        X = as_feature_matrix(X)
        check_n_features(X, self.n_features)
        return self.intercept + X @ np.asarray(self.weights)


def _explain_rank_deficiency(design: np.ndarray, col_names: list[str], rank: int) -> str:
    """Name the dependent design columns and what they depend on."""
    _, _, pivots = scipy.linalg.qr(design, mode="economic", pivoting=True)
    independent = sorted(pivots[:rank])
    dependent = sorted(pivots[rank:])
    basis = design[:, independent]
    parts = []
    for j in dependent:
        coef, *_ = np.linalg.lstsq(basis, design[:, j], rcond=None)
        scale = max(1.0, float(np.max(np.abs(coef))))
        involved = [col_names[independent[k]] for k in range(len(independent))
                    if abs(coef[k]) > 1e-8 * scale]
        parts.append(f"{col_names[j]!r} is a linear combination of "
                     f"{', '.join(repr(n) for n in involved) or 'nothing (zero column)'}")
    return "; ".join(parts)


def fit_ols(d: Dataset) -> LinearModel:
    """Fit intercept and weights by least squares.

    Parameters
    ----------
    d : Dataset
        Needs at least ``n_features + 1`` rows.

    Returns
    -------
    LinearModel

    Raises
    ------
    DimensionMismatchError
        If there are fewer rows than coefficients to fit.
    RankDeficiencyError
        If the design matrix (intercept column plus features) is rank
        deficient.  The message names every dependent column and the
        columns it depends on.
    """
    n, p = d.n_rows, d.n_features
    if n < p + 1:
        raise DimensionMismatchError(
            f"need at least {p + 1} rows to fit {p} feature(s) plus an intercept, got {n}"
        )
    design = np.column_stack([np.ones(n), d.X])
    singular_values = np.linalg.svd(design, compute_uv=False)
    rank = int(np.sum(singular_values > RANK_RTOL * singular_values[0]))
    if rank < p + 1:
        col_names = [_INTERCEPT_NAME, *d.feature_names]
        detail = _explain_rank_deficiency(design, col_names, rank)
        dependent = []
        _, _, pivots = scipy.linalg.qr(design, mode="economic", pivoting=True)
        for j in sorted(pivots[rank:]):
            dependent.append(col_names[j])
        raise RankDeficiencyError(
            f"design matrix is rank deficient (rank {rank} of {p + 1}): {detail}",
            dependent=dependent,
        )
    coef, *_ = np.linalg.lstsq(design, d.y, rcond=None)
    return LinearModel(
        intercept=float(coef[0]),
        weights=tuple(float(w) for w in coef[1:]),
        feature_names=d.feature_names,
    )


def predict_linear(m: LinearModel, x) -> float:
    """Evaluate the model at a single point ``x``."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] != m.n_features:
        raise DimensionMismatchError(
            f"expected a point with {m.n_features} coordinate(s), got shape {x.shape}"
        )
    return float(m.intercept + float(np.dot(x, np.asarray(m.weights))))


class LinearRegressor(BaseEstimator, RegressorMixin):
    """Least-squares linear regression with a scikit-learn interface.

    Attributes
    ----------
    model_ : LinearModel
        The fitted model object.
    intercept_ : float
    coef_ : ndarray of shape (n_features,)
    """

    def fit(self, X, y):
        names = default_feature_names(X, as_feature_matrix(X).shape[1])
        X = as_feature_matrix(X)
        y = as_target_vector(y, n_rows=X.shape[0])
        self.model_ = fit_ols(Dataset(names, X, y))
        self.intercept_ = self.model_.intercept
        self.coef_ = np.asarray(self.model_.weights)
        self.n_features_in_ = X.shape[1]
        self.feature_names_in_ = np.asarray(names, dtype=object)
        return self

    def predict(self, X):
        self._check_fitted()
        return self.model_.predict_matrix(X)

    def _check_fitted(self):
        if not hasattr(self, "model_"):
            raise RuntimeError("this LinearRegressor instance is not fitted yet")

"""Additive models fit by backfitting, with cubic smoothing splines.

The one-dimensional smoother minimizes

    sum_i (y_i - g(x_i))**2 + penalty * integral(g''(u)**2 du)

over all twice differentiable functions; the minimizer is a natural
cubic spline with knots at the distinct abscissae (Green & Silverman,
1994, ch. 2).  Duplicate abscissae are pre-averaged and enter the banded
system with multiplicity weights.  Between knots the stored curve is the
natural cubic interpolant of its fitted values; outside the knot range it
continues linearly, which is exactly how the natural spline behaves.

The backfitting loop cycles through the features in ascending order,
smoothing each one against the partial residual of the others, centering
every component to training mean zero, until the largest change in any
component's fitted values drops below a threshold.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline
from sklearn.base import BaseEstimator, RegressorMixin

from .dataset import Dataset
from .exceptions import ConfigError, DimensionMismatchError, NumericalError
from .validation import (
    as_feature_matrix,
    as_target_vector,
    check_n_features,
    default_feature_names,
)

__all__ = [
    "LinearComponent",
    "SmoothComponent",
    "ComponentFunction",
    "GamConfig",
    "GamModel",
    "smooth_1d",
    "backfit",
    "predict_gam",
    "GamRegressor",
]


@dataclass(frozen=True)
class LinearComponent:
    """A straight-line component ``slope * x + offset``.

    ``offset`` is chosen at fit time so the component's training mean is
    zero.
    """

    feature: int
    slope: float
    offset: float = 0.0

    kind = "linear"

    def evaluate(self, values) -> np.ndarray:
        values = np.asarray(values, dtype=float)
        return self.slope * values + self.offset


@dataclass(frozen=True, eq=False)
class SmoothComponent:
    """A spline curve stored as knots and fitted ordinates.

    Evaluation interpolates with the natural cubic spline through the
    stored points and extrapolates linearly beyond the first and last
    knot using the boundary slopes.  Evaluating exactly at a knot returns
    the stored ordinate bit for bit.
    """

    feature: int
    knots: tuple[float, ...]
    values: tuple[float, ...]

    kind = "smooth"

    def __post_init__(self):
        if len(self.knots) != len(self.values):
            raise DimensionMismatchError(
                f"{len(self.knots)} knot(s) for {len(self.values)} value(s)"
            )
        if len(self.knots) < 2:
            raise ConfigError("a smooth component needs at least two knots")
        kn = tuple(float(k) for k in self.knots)
        if any(b <= a for a, b in zip(kn, kn[1:])):
            raise ConfigError("knots must be strictly increasing")
        object.__setattr__(self, "knots", kn)
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if len(kn) == 2:
            spline = None  # two points: the curve is the straight line through them
        else:
            spline = CubicSpline(np.asarray(kn), np.asarray(self.values), bc_type="natural")
        object.__setattr__(self, "_spline", spline)

    def _boundary_slopes(self) -> tuple[float, float]:
        if self._spline is None:
            s = (self.values[1] - self.values[0]) / (self.knots[1] - self.knots[0])
            return s, s
        deriv = self._spline.derivative()
        return float(deriv(self.knots[0])), float(deriv(self.knots[-1]))

    def evaluate(self, values) -> np.ndarray:
        values = np.asarray(values, dtype=float)
        scalar_in = values.ndim == 0
        v = np.atleast_1d(values)
        kn = np.asarray(self.knots)
        yv = np.asarray(self.values)
        lo, hi = self.knots[0], self.knots[-1]
        slope_lo, slope_hi = self._boundary_slopes()
        if self._spline is None:
            out = self.values[0] + slope_lo * (v - lo)
        else:
            out = self._spline(v)
        below = v < lo
        above = v > hi
        out = np.where(below, self.values[0] + slope_lo * (v - lo), out)
        out = np.where(above, self.values[-1] + slope_hi * (v - hi), out)
        # Exact pass-through at the knots themselves.
        pos = np.searchsorted(kn, v)
        pos = np.clip(pos, 0, len(kn) - 1)
        at_knot = kn[pos] == v
        out = np.where(at_knot, yv[pos], out)
        return float(out[0]) if scalar_in else out


ComponentFunction = LinearComponent | SmoothComponent


def _shift(component: ComponentFunction, amount: float) -> ComponentFunction:
    """The same curve minus a constant."""
    if isinstance(component, LinearComponent):
        return LinearComponent(
            feature=component.feature,
            slope=component.slope,
            offset=component.offset - amount,
        )
    return SmoothComponent(
        feature=component.feature,
        knots=component.knots,
        values=tuple(v - amount for v in component.values),
    )


def smooth_1d(x, y, penalty: float, feature: int = 0) -> SmoothComponent:
    """Fit a cubic smoothing spline to scatter points.

    Parameters
    ----------
    x, y : array-like of equal length
        Sample points; at least two distinct ``x`` values are required.
        Duplicate abscissae are averaged and weighted by multiplicity.
    penalty : float
        Roughness weight (> 0).  As it grows the fit approaches the
        least-squares straight line; as it vanishes the fit approaches
        the natural cubic interpolant.  Collinear input points give the
        interpolating line at every penalty, because a straight line has
        zero roughness.
    feature : int
        Feature index recorded on the returned component.

    Returns
    -------
    SmoothComponent
        The fitted curve, not centered.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 1 or y.ndim != 1 or x.shape != y.shape:
        raise DimensionMismatchError("x and y must be 1-d arrays of equal length")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise NumericalError("smoothing input contains NaN or infinite values")
    if not penalty > 0.0:
        raise ConfigError(f"penalty must be > 0, got {penalty}")
    knots, inverse, counts = np.unique(x, return_inverse=True, return_counts=True)
    k = len(knots)
    if k < 2:
        raise ConfigError("need at least two distinct abscissae to smooth")
    ybar = np.bincount(inverse, weights=y) / counts
    if k == 2:
        fitted = ybar  # no interior knots: the penalty term is empty
    else:
        h = np.diff(knots)
        # Second-difference operator Q (k x k-2) and penalty Gram matrix R
        # (k-2 x k-2) of the natural spline basis (Green & Silverman 1994,
        # section 2.1.2): integral(g'')**2 == gamma' R gamma with
        # Q' g == R gamma.
        Q = np.zeros((k, k - 2))
        R = np.zeros((k - 2, k - 2))
        for j in range(1, k - 1):
            c = j - 1
            Q[j - 1, c] = 1.0 / h[j - 1]
            Q[j, c] = -1.0 / h[j - 1] - 1.0 / h[j]
            Q[j + 1, c] = 1.0 / h[j]
            R[c, c] = (h[j - 1] + h[j]) / 3.0
            if c + 1 <= k - 3:
                R[c, c + 1] = R[c + 1, c] = h[j] / 6.0
        w_inv = 1.0 / counts
        system = R + penalty * (Q.T * w_inv) @ Q
        gamma = np.linalg.solve(system, Q.T @ ybar)
        fitted = ybar - penalty * w_inv * (Q @ gamma)
    return SmoothComponent(
        feature=feature,
        knots=tuple(float(v) for v in knots),
        values=tuple(float(v) for v in fitted),
    )


def spline_roughness(component: SmoothComponent) -> float:
    """``integral(g'')**2`` of the stored natural cubic curve."""
    kn = np.asarray(component.knots)
    vals = np.asarray(component.values)
    k = len(kn)
    if k < 3:
        return 0.0
    h = np.diff(kn)
    Q = np.zeros((k, k - 2))
    R = np.zeros((k - 2, k - 2))
    for j in range(1, k - 1):
        c = j - 1
        Q[j - 1, c] = 1.0 / h[j - 1]
        Q[j, c] = -1.0 / h[j - 1] - 1.0 / h[j]
        Q[j + 1, c] = 1.0 / h[j]
        R[c, c] = (h[j - 1] + h[j]) / 3.0
        if c + 1 <= k - 3:
            R[c, c + 1] = R[c + 1, c] = h[j] / 6.0
    gamma = np.linalg.solve(R, Q.T @ vals)
    return float(gamma @ R @ gamma)


@dataclass(frozen=True)
class GamConfig:
    """Backfitting settings.

    ``component_kinds`` assigns "smooth" or "linear" per feature (None
    means all smooth).  ``penalty`` is the smoothing weight, either one
    global value or one per feature.
    """

    penalty: float | tuple[float, ...] = 1.0
    max_rounds: int = 100
    convergence_threshold: float = 1e-6
    component_kinds: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.max_rounds < 1:
            raise ConfigError(f"max_rounds must be >= 1, got {self.max_rounds}")
        if not self.convergence_threshold > 0:
            raise ConfigError("convergence_threshold must be > 0")
        if self.component_kinds is not None:
            bad = [k for k in self.component_kinds if k not in ("smooth", "linear")]
            if bad:
                raise ConfigError(f"unknown component kind(s): {bad}")

    def penalty_for(self, feature: int, n_features: int) -> float:
        if isinstance(self.penalty, (tuple, list)):
            if len(self.penalty) != n_features:
                raise ConfigError(
                    f"{len(self.penalty)} penalties for {n_features} feature(s)"
                )
            value = float(self.penalty[feature])
        else:
            value = float(self.penalty)
        if not value > 0:
            raise ConfigError(f"penalty must be > 0, got {value}")
        return value

    def kind_for(self, feature: int, n_features: int) -> str:
        if self.component_kinds is None:
            return "smooth"
        if len(self.component_kinds) != n_features:
            raise ConfigError(
                f"{len(self.component_kinds)} kinds for {n_features} feature(s)"
            )
        return self.component_kinds[feature]


@dataclass(frozen=True)
class GamModel:
    """An additive model ``alpha + sum_i f_i(x_i)``.

    Every component has training mean zero (the intercept ``alpha``
    carries the target mean), ``history`` holds the per-round maximum
    component change, and ``converged`` records whether the loop met its
    threshold within the round budget.
    """

    alpha: float
    components: tuple[ComponentFunction, ...]
    feature_names: tuple[str, ...]
    history: tuple[float, ...]
    converged: bool
    feature_ranges: tuple[tuple[float, float], ...] = ()

    @property
    def n_features(self) -> int:
        return len(self.feature_names)

    def predict_matrix(self, X: np.ndarray) -> np.ndarray:
        X = as_feature_matrix(X)
        check_n_features(X, self.n_features)
        out = np.full(X.shape[0], self.alpha)
        for comp in self.components:
            out = out + comp.evaluate(X[:, comp.feature])
        return out


def _fit_line(x: np.ndarray, r: np.ndarray) -> tuple[float, float]:
    """Simple least squares of r on x; returns (slope, intercept)."""
    xbar = float(np.mean(x))
    dx = x - xbar
    denom = float(np.dot(dx, dx))
    slope = float(np.dot(dx, r - np.mean(r)) / denom)
    intercept = float(np.mean(r)) - slope * xbar
    return slope, intercept


def backfit(d: Dataset, cfg: GamConfig = GamConfig()) -> GamModel:
    """Fit an additive model by round-robin backfitting.

    The intercept is the target mean.  Components start at zero and are
    updated in ascending feature order: each update smooths (or fits a
    line to) the partial residual left by the other components, then is
    centered to training mean zero.  The loop stops when the largest
    absolute change in any component's fitted values within a round drops
    below ``cfg.convergence_threshold``, or after ``cfg.max_rounds``
    rounds, in which case the model is returned with ``converged=False``
    and a warning is emitted (non-convergence is reported, not fatal).

    A feature with a single distinct value cannot be smoothed; its
    component is forced to zero and a warning names it.
    """
    X, y = d.X, d.y
    n_rows, n_features = X.shape
    alpha = float(np.mean(y))

    kinds = [cfg.kind_for(j, n_features) for j in range(n_features)]
    penalties = [cfg.penalty_for(j, n_features) for j in range(n_features)]
    degenerate = [False] * n_features
    for j in range(n_features):
        if float(X[:, j].min()) == float(X[:, j].max()):
            degenerate[j] = True
            warnings.warn(
                f"feature {d.feature_names[j]!r} has a single distinct value; "
                "its component is fixed at zero",
                stacklevel=2,
            )

    components: list[ComponentFunction] = [
        LinearComponent(feature=j, slope=0.0, offset=0.0) for j in range(n_features)
    ]
    fitted = [np.zeros(n_rows) for _ in range(n_features)]
    history: list[float] = []
    converged = False

    for _round in range(cfg.max_rounds):
        round_max = 0.0
        for j in range(n_features):
            if degenerate[j]:
                continue
            others = np.zeros(n_rows)
            for k in range(n_features):
                if k != j:
                    others = others + fitted[k]
            partial = y - alpha - others
            xj = X[:, j]
            if kinds[j] == "smooth":
                comp = smooth_1d(xj, partial, penalties[j], feature=j)
            else:
                slope, intercept = _fit_line(xj, partial)
                comp = LinearComponent(feature=j, slope=slope, offset=intercept)
            comp = _shift(comp, float(np.mean(comp.evaluate(xj))))
            new_fitted = comp.evaluate(xj)
            change = float(np.max(np.abs(new_fitted - fitted[j]))) if n_rows else 0.0
            round_max = max(round_max, change)
            fitted[j] = new_fitted
            components[j] = comp
        history.append(round_max)
        if round_max < cfg.convergence_threshold:
            converged = True
            break

    if not converged:
        warnings.warn(
            f"backfitting did not converge in {cfg.max_rounds} round(s); "
            f"last maximum component change was {history[-1]:.3e}",
            stacklevel=2,
        )
    return GamModel(
        alpha=alpha,
        components=tuple(components),
        feature_names=d.feature_names,
        history=tuple(history),
        converged=converged,
        feature_ranges=tuple(
            (float(X[:, j].min()), float(X[:, j].max())) for j in range(n_features)
        ),
    )


def predict_gam(m: GamModel, x) -> float:
    """Evaluate the additive model at a single point."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] != m.n_features:
        raise DimensionMismatchError(
            f"expected a point with {m.n_features} coordinate(s), got shape {x.shape}"
        )
    return float(m.predict_matrix(x.reshape(1, -1))[0])


class GamRegressor(BaseEstimator, RegressorMixin):
    """Backfit additive model with a scikit-learn interface.

    Parameters
    ----------
    penalty : float or sequence of float
        Smoothing weight(s); one global value or one per feature.
    max_rounds : int
    convergence_threshold : float
    linear_features : sequence of int or str, optional
        Features (by index or name) to fit with a straight line instead
        of a spline.

    Attributes
    ----------
    model_ : GamModel
    """

    def __init__(self, penalty=1.0, max_rounds=100, convergence_threshold=1e-6,
                 linear_features=None):
        self.penalty = penalty
        self.max_rounds = max_rounds
        self.convergence_threshold = convergence_threshold
        self.linear_features = linear_features

    def fit(self, X, y):
        names = default_feature_names(X, as_feature_matrix(X).shape[1])
        X = as_feature_matrix(X)
        y = as_target_vector(y, n_rows=X.shape[0])
        kinds = None
        if self.linear_features is not None:
            linear = set()
            for item in self.linear_features:
                linear.add(names.index(item) if isinstance(item, str) else int(item))
            kinds = tuple("linear" if j in linear else "smooth" for j in range(X.shape[1]))
        penalty = self.penalty
        if isinstance(penalty, (list, tuple, np.ndarray)):
            penalty = tuple(float(p) for p in penalty)
        cfg = GamConfig(
            penalty=penalty,
            max_rounds=self.max_rounds,
            convergence_threshold=self.convergence_threshold,
            component_kinds=kinds,
        )
        self.model_ = backfit(Dataset(names, X, y), cfg)
        self.n_features_in_ = X.shape[1]
        self.feature_names_in_ = np.asarray(names, dtype=object)
        return self

    def predict(self, X):
        self._check_fitted()
        return self.model_.predict_matrix(X)

    def _check_fitted(self):
        if not hasattr(self, "model_"):
            raise RuntimeError("this GamRegressor instance is not fitted yet")

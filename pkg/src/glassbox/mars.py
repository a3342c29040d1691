"""Multivariate adaptive regression splines (Friedman, 1991).

The model is a sum of an intercept and basis terms, each basis term a
product of hinge functions ``max(0, x - t)`` or ``max(0, t - x)`` over
distinct features.  The forward pass adds mirrored hinge pairs greedily;
the backward pass deletes one term at a time; generalized cross
validation (GCV) picks a model from the deletion sequence.

Within one term a feature appears at most once, so a term's degree (its
number of hinge factors) is also the number of interacting variables.
Capping the degree at 1 makes the model additive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
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
    "Hinge",
    "BasisTerm",
    "MarsConfig",
    "MarsModel",
    "forward_pass",
    "backward_prune",
    "gcv",
    "select_by_gcv",
    "anova_decompose",
    "AnovaDecomposition",
    "MarsRegressor",
]

# A candidate pair must cut the residual sum of squares by at least this
# fraction of the intercept-only RSS to be accepted.
IMPROVEMENT_RTOL = 1e-10


@dataclass(frozen=True)
class Hinge:
    """One hinge factor.

    ``positive=True`` means ``max(0, x[feature] - knot)``;
    ``positive=False`` means ``max(0, knot - x[feature])``.
    """

    feature: int
    knot: float
    positive: bool

    def evaluate(self, values: np.ndarray) -> np.ndarray:
        arm = values - self.knot if self.positive else self.knot - values
        return np.maximum(0.0, arm)

    @property
    def orientation(self) -> str:
        return "+" if self.positive else "-"


@dataclass(frozen=True)
class BasisTerm:
    """A product of hinges over distinct features, times a coefficient."""

    hinges: tuple[Hinge, ...]
    coefficient: float

    def __post_init__(self):
        feats = [h.feature for h in self.hinges]
        if len(set(feats)) != len(feats):
            raise ConfigError("a feature may appear at most once per term")

    @property
    def degree(self) -> int:
        return len(self.hinges)

    @property
    def features(self) -> tuple[int, ...]:
        return tuple(sorted(h.feature for h in self.hinges))

    def basis_column(self, X: np.ndarray) -> np.ndarray:
        """The term's basis function (coefficient excluded) on each row."""
        col = np.ones(X.shape[0])
        for h in self.hinges:
            col = col * h.evaluate(X[:, h.feature])
        return col

    def evaluate(self, X: np.ndarray) -> np.ndarray:
        return self.coefficient * self.basis_column(X)


@dataclass(frozen=True)
class MarsConfig:
    """Forward/backward pass settings.

    Parameters
    ----------
    max_terms : int
        Forward budget counted over hinge terms only (the intercept is
        free).  Terms arrive in mirror pairs, so the final count can
        overshoot the budget by one.
    max_interaction_degree : int
        Largest number of hinge factors allowed in a term; 1 keeps the
        model additive.
    gcv_penalty_per_knot : float or None
        Cost charged per distinct knot in the GCV denominator.  None
        picks the usual convention: 2 for additive models, 3 otherwise.
    """

    max_terms: int = 10
    max_interaction_degree: int = 2
    gcv_penalty_per_knot: float | None = None

    def __post_init__(self):
        if self.max_terms < 1:
            raise ConfigError(f"max_terms must be >= 1, got {self.max_terms}")
        if self.max_interaction_degree < 1:
            raise ConfigError(
                f"max_interaction_degree must be >= 1, got {self.max_interaction_degree}"
            )
        if self.gcv_penalty_per_knot is not None and self.gcv_penalty_per_knot < 0:
            raise ConfigError("gcv_penalty_per_knot must be >= 0")

    def resolved_penalty(self) -> float:
        if self.gcv_penalty_per_knot is not None:
            return float(self.gcv_penalty_per_knot)
        return 2.0 if self.max_interaction_degree == 1 else 3.0


@dataclass(frozen=True)
class MarsModel:
    """A fitted spline model: ``intercept + sum(coefficient * product)``."""

    intercept: float
    terms: tuple[BasisTerm, ...]
    feature_names: tuple[str, ...]
    n_train_rows: int
    feature_ranges: tuple[tuple[float, float], ...] = field(default=())

    @property
    def n_features(self) -> int:
        return len(self.feature_names)

    @property
    def knot_count(self) -> int:
        """Number of distinct (feature, knot) pairs across all terms."""
        return len({(h.feature, h.knot) for term in self.terms for h in term.hinges})

    @property
    def max_degree(self) -> int:
        return max((t.degree for t in self.terms), default=0)

    def predict_matrix(self, X: np.ndarray) -> np.ndarray:
        X = as_feature_matrix(X)
        check_n_features(X, self.n_features)
        out = np.full(X.shape[0], self.intercept)
        for term in self.terms:
            out = out + term.evaluate(X)
        return out


def predict_mars(m: MarsModel, x) -> float:
    """Evaluate the model at a single point."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] != m.n_features:
        raise DimensionMismatchError(
            f"expected a point with {m.n_features} coordinate(s), got shape {x.shape}"
        )
    return float(m.predict_matrix(x.reshape(1, -1))[0])


def _knot_candidates(column: np.ndarray) -> list[float]:
    """Observed values usable as pair knots.

    The column's minimum and maximum are excluded: a mirror pair placed
    there has one all-zero member (``max(0, min - x)`` and
    ``max(0, x - max)`` vanish on the training data).
    """
    values = sorted(set(float(v) for v in column))
    return values[1:-1]


def _lstsq_rss(design: np.ndarray, y: np.ndarray):
    """Least-squares fit returning (coefficients, rss, full_rank)."""
    coef, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    if rank < design.shape[1]:
        return coef, math.inf, False
    resid = y - design @ coef
    return coef, float(np.dot(resid, resid)), True


def _ranges(X: np.ndarray) -> tuple[tuple[float, float], ...]:
    return tuple((float(X[:, j].min()), float(X[:, j].max())) for j in range(X.shape[1]))


def forward_pass(d: Dataset, cfg: MarsConfig = MarsConfig()) -> MarsModel:
    """Greedy forward construction of the basis.

    Starting from the constant model, each step considers every product
    of a mirrored hinge pair with an existing term (or with the
    constant), over every feature absent from that term and every
    admissible knot.  All coefficients are refit by least squares for
    each candidate, and the pair giving the largest RSS decrease is kept;
    ties break toward the lowest parent term index (the constant counts
    as parent 0), then the lowest feature index, then the smallest knot.

    The pass stops when the term budget is reached, no candidate
    improves RSS by at least ``IMPROVEMENT_RTOL`` times the initial RSS,
    or every candidate yields a rank-deficient design.
    """
    X, y = d.X, d.y
    n_rows, n_features = X.shape
    ybar = float(np.mean(y))
    resid0 = y - ybar
    current_rss = float(np.dot(resid0, resid0))
    tolerance = IMPROVEMENT_RTOL * current_rss

    # Per-feature hinge column caches, keyed by knot.
    pos_cols: list[dict[float, np.ndarray]] = []
    neg_cols: list[dict[float, np.ndarray]] = []
    knots: list[list[float]] = []
    for j in range(n_features):
        col = X[:, j]
        ks = _knot_candidates(col)
        knots.append(ks)
        pos_cols.append({t: np.maximum(0.0, col - t) for t in ks})
        neg_cols.append({t: np.maximum(0.0, t - col) for t in ks})

    columns: list[np.ndarray] = [np.ones(n_rows)]
    terms: list[BasisTerm] = []
    coefficients = np.array([ybar])

    while len(terms) < cfg.max_terms:
        best = None  # (rss, parent_pos, feature, knot, coef, pos_col, neg_col)
        parents: list[BasisTerm | None] = [None, *terms]
        for parent_pos, parent in enumerate(parents):
            if parent is None:
                parent_col = columns[0]
                parent_feats = ()
                parent_degree = 0
            else:
                parent_col = columns[parent_pos]
                parent_feats = parent.features
                parent_degree = parent.degree
            if parent_degree + 1 > cfg.max_interaction_degree:
                continue
            for f in range(n_features):
                if f in parent_feats:
                    continue
                for t in knots[f]:
                    cpos = parent_col * pos_cols[f][t]
                    cneg = parent_col * neg_cols[f][t]
                    if not cpos.any() or not cneg.any():
                        continue
                    design = np.column_stack([*columns, cpos, cneg])
                    coef, rss, ok = _lstsq_rss(design, y)
                    if not ok:
                        continue
                    if best is None or rss < best[0]:
                        best = (rss, parent_pos, f, t, coef, cpos, cneg)
        if best is None:
            break
        rss, parent_pos, f, t, coef, cpos, cneg = best
        if not (current_rss - rss > 0.0 and current_rss - rss >= tolerance):
            break
        parent_hinges = () if parent_pos == 0 else terms[parent_pos - 1].hinges
        terms.append(BasisTerm(hinges=(*parent_hinges, Hinge(f, t, True)), coefficient=0.0))
        terms.append(BasisTerm(hinges=(*parent_hinges, Hinge(f, t, False)), coefficient=0.0))
        columns.extend([cpos, cneg])
        coefficients = coef
        current_rss = rss

    final_terms = tuple(
        BasisTerm(hinges=term.hinges, coefficient=float(coefficients[i + 1]))
        for i, term in enumerate(terms)
    )
    return MarsModel(
        intercept=float(coefficients[0]),
        terms=final_terms,
        feature_names=d.feature_names,
        n_train_rows=n_rows,
        feature_ranges=_ranges(X),
    )


def backward_prune(m: MarsModel, d: Dataset) -> list[MarsModel]:
    """Delete one term at a time, cheapest RSS increase first.

    Returns the full deletion sequence starting at ``m`` and ending at
    the intercept-only model; every entry is refit by least squares.
    Mirror partners are treated as ordinary terms, so a pair can lose one
    member.  Ties break toward the lowest term index.
    """
    X, y = d.X, d.y
    if m.n_features != X.shape[1]:
        raise DimensionMismatchError(
            f"model has {m.n_features} feature(s), data has {X.shape[1]}"
        )
    sequence = [m]
    remaining = list(m.terms)
    while remaining:
        best = None  # (rss, index, coef)
        for i in range(len(remaining)):
            kept = remaining[:i] + remaining[i + 1:]
            design = np.column_stack(
                [np.ones(X.shape[0]), *[t.basis_column(X) for t in kept]]
            )
            coef, rss, ok = _lstsq_rss(design, y)
            if not ok:
                continue
            if best is None or rss < best[0]:
                best = (rss, i, coef)
        if best is None:  # cannot happen: subsets of independent columns stay independent
            raise NumericalError("backward pass hit a rank-deficient refit")
        _, drop, coef = best
        remaining = remaining[:drop] + remaining[drop + 1:]
        refit = tuple(
            BasisTerm(hinges=t.hinges, coefficient=float(coef[k + 1]))
            for k, t in enumerate(remaining)
        )
        sequence.append(
            MarsModel(
                intercept=float(coef[0]),
                terms=refit,
                feature_names=m.feature_names,
                n_train_rows=m.n_train_rows,
                feature_ranges=m.feature_ranges,
            )
        )
    return sequence


def effective_parameters(m: MarsModel, penalty_per_knot: float) -> float:
    """Coefficient count (intercept included) plus the knot charge."""
    return (1 + len(m.terms)) + penalty_per_knot * m.knot_count


def gcv(m: MarsModel, d: Dataset, penalty_per_knot: float) -> float:
    """Generalized cross validation score of ``m`` on ``d``.

    ``GCV = (RSS / N) / (1 - M / N)**2`` where ``M`` counts coefficients
    plus ``penalty_per_knot`` per distinct knot.  Lower is better: the
    denominator inflates the average squared error as the model spends
    more coefficients and knots, so at fixed RSS the score strictly
    increases with either count.

    Raises
    ------
    NumericalError
        If ``M >= N``, where the score is undefined.
    """
    n = d.n_rows
    m_eff = effective_parameters(m, penalty_per_knot)
    if m_eff >= n:
        raise NumericalError(
            f"GCV undefined: effective parameters {m_eff} >= {n} rows"
        )
    resid = d.y - m.predict_matrix(d.X)
    rss = float(np.dot(resid, resid))
    return (rss / n) / (1.0 - m_eff / n) ** 2


def select_by_gcv(seq: list[MarsModel], d: Dataset, penalty_per_knot: float) -> MarsModel:
    """Pick the model with the lowest GCV; ties go to fewer terms.

    Models whose effective parameter count reaches the row count are
    skipped; if that removes everything, a NumericalError is raised.
    """
    best = None
    best_score = math.inf
    for m in seq:
        try:
            score = gcv(m, d, penalty_per_knot)
        except NumericalError:
            continue
        if best is None or score < best_score or (
            score == best_score and len(m.terms) < len(best.terms)
        ):
            best, best_score = m, score
    if best is None:
        raise NumericalError("no model in the sequence has fewer effective parameters than rows")
    return best


@dataclass(frozen=True)
class AnovaDecomposition:
    """Terms grouped by the exact set of features they use.

    ``groups`` maps a sorted tuple of feature indices to the terms whose
    feature set is exactly that tuple.  The intercept plus the sum of all
    group functions reproduces the model prediction.
    """

    intercept: float
    groups: tuple[tuple[tuple[int, ...], tuple[BasisTerm, ...]], ...]

    def group_keys(self) -> list[tuple[int, ...]]:
        return [key for key, _ in self.groups]

    def group_terms(self, key: tuple[int, ...]) -> tuple[BasisTerm, ...]:
        for k, terms in self.groups:
            if k == key:
                return terms
        raise KeyError(f"no interaction group {key}")

    def group_values(self, key: tuple[int, ...], X: np.ndarray) -> np.ndarray:
        """Evaluate one group's share of the prediction on rows of X."""
        X = as_feature_matrix(X)
        out = np.zeros(X.shape[0])
        for term in self.group_terms(key):
            out = out + term.evaluate(X)
        return out

    def evaluate(self, X: np.ndarray) -> np.ndarray:
        X = as_feature_matrix(X)
        out = np.full(X.shape[0], self.intercept)
        for key, _ in self.groups:
            out = out + self.group_values(key, X)
        return out


def anova_decompose(m: MarsModel) -> AnovaDecomposition:
    """Group the model's terms by their exact feature sets.

    Groups are ordered by degree, then lexicographically by feature
    indices.  Terms keep their fitted coefficients, so summing the group
    functions and the intercept reproduces ``m`` everywhere.
    """
    buckets: dict[tuple[int, ...], list[BasisTerm]] = {}
    for term in m.terms:
        buckets.setdefault(term.features, []).append(term)
    ordered = sorted(buckets.items(), key=lambda kv: (len(kv[0]), kv[0]))
    return AnovaDecomposition(
        intercept=m.intercept,
        groups=tuple((key, tuple(terms)) for key, terms in ordered),
    )


class MarsRegressor(BaseEstimator, RegressorMixin):
    """Adaptive regression splines with a scikit-learn interface.

    Runs the forward pass, the backward deletion pass, and GCV model
    selection.

    Parameters
    ----------
    max_terms : int
        Forward-stage term budget (hinge terms; the intercept is free).
    max_interaction_degree : int
        1 for an additive model, 2 to allow pairwise products, and so on.
    gcv_penalty_per_knot : float or None
        None uses 2 when additive, else 3.

    Attributes
    ----------
    model_ : MarsModel
        The GCV-selected model.
    forward_model_ : MarsModel
        The model at the end of the forward pass.
    gcv_ : float
        GCV score of ``model_``.
    """

    def __init__(self, max_terms=10, max_interaction_degree=2, gcv_penalty_per_knot=None):
        self.max_terms = max_terms
        self.max_interaction_degree = max_interaction_degree
        self.gcv_penalty_per_knot = gcv_penalty_per_knot

    def fit(self, X, y):
        names = default_feature_names(X, as_feature_matrix(X).shape[1])
        X = as_feature_matrix(X)
        y = as_target_vector(y, n_rows=X.shape[0])
        d = Dataset(names, X, y)
        cfg = MarsConfig(
            max_terms=self.max_terms,
            max_interaction_degree=self.max_interaction_degree,
            gcv_penalty_per_knot=self.gcv_penalty_per_knot,
        )
        penalty = cfg.resolved_penalty()
        self.forward_model_ = forward_pass(d, cfg)
        sequence = backward_prune(self.forward_model_, d)
        self.model_ = select_by_gcv(sequence, d, penalty)
        self.gcv_ = gcv(self.model_, d, penalty)
        self.n_features_in_ = X.shape[1]
        self.feature_names_in_ = np.asarray(names, dtype=object)
        return self

    def predict(self, X):
        self._check_fitted()
        return self.model_.predict_matrix(X)

    def _check_fitted(self):
        if not hasattr(self, "model_"):
            raise RuntimeError("this MarsRegressor instance is not fitted yet")

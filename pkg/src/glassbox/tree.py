"""Binary regression trees with axis-aligned splits (CART style).

Trees are grown greedily, breadth first, under a leaf budget, then pruned
with weakest-link cost-complexity pruning.  The prediction surface is a
piecewise constant function over an axis-aligned partition of the input
space, and :func:`extract_partition` makes that partition explicit.

Split search is exhaustive over every (feature, observed value) pair.
Candidate losses are computed with ``math.fsum``, which returns the
correctly rounded sum regardless of summation order, so candidates that
induce the same row partition get bitwise-equal losses and the documented
tie-break (lowest feature index, then smallest threshold) really decides.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin

from .dataset import Dataset, split as split_rows
from .exceptions import ConfigError, DimensionMismatchError
from .validation import (
    as_feature_matrix,
    as_target_vector,
    check_n_features,
    default_feature_names,
)

__all__ = [
    "SplitCandidate",
    "Leaf",
    "Internal",
    "RegressionTree",
    "GrowConfig",
    "Region",
    "best_split",
    "grow_tree",
    "prune_tree",
    "select_subtree",
    "predict_tree",
    "extract_partition",
    "CartRegressor",
]


@dataclass(frozen=True)
class SplitCandidate:
    """A proposed split: send rows with ``x[feature] <= threshold`` left.

    ``loss`` is the summed residual sum of squares of the two children
    around their own means.
    """

    feature: int
    threshold: float
    loss: float


@dataclass(frozen=True)
class Leaf:
    """A terminal node predicting a constant.

    ``value`` is the mean target of the training rows routed here and
    ``count`` is how many there were.
    """

    value: float
    count: int


@dataclass(frozen=True)
class Internal:
    """An internal node: ``split`` decides left (<=) versus right (>)."""

    split: SplitCandidate
    left: "Leaf | Internal"
    right: "Leaf | Internal"


Node = Leaf | Internal


@dataclass(frozen=True)
class RegressionTree:
    """A fitted tree plus the feature names it was trained with."""

    root: Node
    feature_names: tuple[str, ...]

    @property
    def n_features(self) -> int:
        return len(self.feature_names)

    @property
    def n_leaves(self) -> int:
        return _count_leaves(self.root)

    @property
    def depth(self) -> int:
        return _depth(self.root)

    def predict_matrix(self, X: np.ndarray) -> np.ndarray:
        X = as_feature_matrix(X)
        check_n_features(X, self.n_features)
        return np.array([_route(self.root, row) for row in X])


@dataclass(frozen=True)
class GrowConfig:
    """Growth limits.

    ``max_leaves=None`` means unbounded (grow until every leaf is pure or
    unsplittable).  ``min_node_size`` is the minimum number of rows each
    child of a split must keep.
    """

    max_leaves: int | None = None
    min_node_size: int = 1

    def __post_init__(self):
        if self.max_leaves is not None and self.max_leaves < 1:
            raise ConfigError(f"max_leaves must be >= 1, got {self.max_leaves}")
        if self.min_node_size < 1:
            raise ConfigError(f"min_node_size must be >= 1, got {self.min_node_size}")


@dataclass(frozen=True)
class Region:
    """One cell of the tree's partition.

    ``bounds`` holds at most one interval per constrained feature as
    ``(feature_index, lower, upper)`` with membership
    ``lower < x[feature] <= upper``; unconstrained features do not
    appear.  ``prediction`` is the leaf constant and ``count`` the number
    of training rows the leaf received.
    """

    bounds: tuple[tuple[int, float, float], ...]
    prediction: float
    count: int

    def contains(self, x) -> bool:
        x = np.asarray(x, dtype=float)
        return all(lo < x[f] <= hi for f, lo, hi in self.bounds)


def _count_leaves(node: Node) -> int:
    if isinstance(node, Leaf):
        return 1
    return _count_leaves(node.left) + _count_leaves(node.right)


def _depth(node: Node) -> int:
    if isinstance(node, Leaf):
        return 0
    return 1 + max(_depth(node.left), _depth(node.right))


def _route(node: Node, x) -> float:
    while isinstance(node, Internal):
        node = node.left if x[node.split.feature] <= node.split.threshold else node.right
    return node.value


def _mean(values: list[float]) -> float:
    # Bitwise-identical targets yield that exact value, so a pure leaf
    # has residuals of exactly zero.
    if values[0] == min(values) == max(values):
        return values[0]
    return math.fsum(values) / len(values)


def _rss(values: list[float]) -> float:
    m = _mean(values)
    return math.fsum((v - m) ** 2 for v in values)


def best_split(d: Dataset, rows=None, min_node_size: int = 1) -> SplitCandidate | None:
    """Exhaustively search the best axis-aligned split for a set of rows.

    Every observed value of every feature is tried as a threshold; rows
    with ``x <= threshold`` go left.  The candidate minimizing the summed
    child residual sum of squares wins; ties break toward the lowest
    feature index and then the smallest threshold.

    Parameters
    ----------
    d : Dataset
    rows : sequence of int, optional
        Row indices to consider (defaults to all rows).
    min_node_size : int
        Both children must keep at least this many rows.

    Returns
    -------
    SplitCandidate or None
        None when the targets are constant or no threshold yields two
        children of admissible size.
    """
    idx = list(range(d.n_rows)) if rows is None else list(rows)
    ys = [float(d.y[i]) for i in idx]
    if len(ys) < 2 or min(ys) == max(ys):
        return None
    best: SplitCandidate | None = None
    for f in range(d.n_features):
        xs = [float(d.X[i, f]) for i in idx]
        thresholds = sorted(set(xs))[:-1]  # the max leaves an empty right child
        for t in thresholds:
            left = [y for x, y in zip(xs, ys) if x <= t]
            if len(left) < min_node_size or len(ys) - len(left) < min_node_size:
                continue
            right = [y for x, y in zip(xs, ys) if x > t]
            loss = _rss(left) + _rss(right)
            if best is None or loss < best.loss:
                best = SplitCandidate(feature=f, threshold=t, loss=loss)
    return best


def grow_tree(d: Dataset, cfg: GrowConfig = GrowConfig()) -> RegressionTree:
    """Grow a tree breadth first until the leaf budget is exhausted.

    Nodes are expanded in first-in-first-out order starting from the
    root.  A node becomes a permanent leaf when its targets are constant,
    no admissible split exists, or splitting it would exceed
    ``cfg.max_leaves``.  Leaf values are the mean target of the routed
    rows.

    With ``max_leaves=1`` the result is a single leaf predicting the
    global target mean.
    """
    budget = math.inf if cfg.max_leaves is None else cfg.max_leaves

    # Mutable mirror of the final tree; frozen nodes are built at the end.
    class _BNode:
        __slots__ = ("split", "left", "right", "leaf")

        def __init__(self):
            self.split = None
            self.left = None
            self.right = None
            self.leaf = None

    def freeze(b: _BNode) -> Node:
        if b.leaf is not None:
            return b.leaf
        return Internal(split=b.split, left=freeze(b.left), right=freeze(b.right))

    root = _BNode()
    queue: deque[tuple[list[int], _BNode]] = deque()
    queue.append((list(range(d.n_rows)), root))
    n_finalized = 0

    while queue:
        rows, bnode = queue.popleft()
        total_leaves = n_finalized + len(queue) + 1
        cand = None
        if total_leaves + 1 <= budget:
            cand = best_split(d, rows, cfg.min_node_size)
        if cand is None:
            ys = [float(d.y[i]) for i in rows]
            bnode.leaf = Leaf(value=_mean(ys), count=len(ys))
            n_finalized += 1
            continue
        left_rows = [i for i in rows if d.X[i, cand.feature] <= cand.threshold]
        right_rows = [i for i in rows if d.X[i, cand.feature] > cand.threshold]
        bnode.split = cand
        bnode.left = _BNode()
        bnode.right = _BNode()
        queue.append((left_rows, bnode.left))
        queue.append((right_rows, bnode.right))

    return RegressionTree(root=freeze(root), feature_names=d.feature_names)


# ---------------------------------------------------------------------------
# Cost-complexity pruning
# ---------------------------------------------------------------------------

class _PNode:
    """Annotated mutable node used during pruning."""

    __slots__ = ("split", "left", "right", "value", "count",
                 "collapse_rss", "collapsed")

    def __init__(self):
        self.split = None
        self.left = None
        self.right = None
        self.value = 0.0
        self.count = 0
        self.collapse_rss = 0.0
        self.collapsed = False

    @property
    def is_leaf(self):
        return self.split is None or self.collapsed


def _annotate(node: Node, d: Dataset, rows: list[int]) -> _PNode:
    if not rows:
        raise DimensionMismatchError(
            "a node received no rows; prune_tree must be given the training data"
        )
    p = _PNode()
    ys = [float(d.y[i]) for i in rows]
    p.value = _mean(ys)
    p.count = len(ys)
    p.collapse_rss = _rss(ys)
    if isinstance(node, Internal):
        p.split = node.split
        f, t = node.split.feature, node.split.threshold
        left_rows = [i for i in rows if d.X[i, f] <= t]
        right_rows = [i for i in rows if d.X[i, f] > t]
        p.left = _annotate(node.left, d, left_rows)
        p.right = _annotate(node.right, d, right_rows)
    return p


def _subtree_stats(p: _PNode) -> tuple[float, int]:
    """(leaf RSS total, leaf count) of the current collapsed state."""
    if p.is_leaf:
        return p.collapse_rss, 1
    lr, ln = _subtree_stats(p.left)
    rr, rn = _subtree_stats(p.right)
    return lr + rr, ln + rn


def _freeze_pruned(p: _PNode) -> Node:
    if p.is_leaf:
        return Leaf(value=p.value, count=p.count)
    return Internal(split=p.split, left=_freeze_pruned(p.left), right=_freeze_pruned(p.right))


def prune_tree(t: RegressionTree, d: Dataset) -> list[tuple[RegressionTree, float]]:
    """Weakest-link cost-complexity pruning.

    Sweeping the complexity weight ``alpha`` from 0 upward in the
    objective ``RSS(T) + alpha * n_leaves(T)``, repeatedly collapse the
    internal node(s) whose collapse costs the least RSS increase per leaf
    removed.  Returns the resulting nested sequence, starting at ``t``
    itself (critical alpha 0) and ending at the root-only tree, each
    subtree paired with the alpha value at which it becomes optimal.

    Leaf counts strictly decrease along the sequence and training RSS
    never decreases.  ``d`` must be the data the tree was grown on.
    """
    root = _annotate(t.root, d, list(range(d.n_rows)))
    sequence: list[tuple[RegressionTree, float]] = [(t, 0.0)]
    prev_alpha = 0.0

    while not root.is_leaf:
        # Weakest link: smallest RSS-increase per removed leaf.
        links: list[tuple[float, _PNode]] = []

        def visit(p: _PNode):
            if p.is_leaf:
                return
            sub_rss, sub_leaves = _subtree_stats(p)
            g = (p.collapse_rss - sub_rss) / (sub_leaves - 1)
            links.append((g, p))
            visit(p.left)
            visit(p.right)

        visit(root)
        alpha = min(g for g, _ in links)
        for g, p in links:
            if g == alpha and not p.collapsed:
                p.collapsed = True
        # Weakest-link theory makes the critical values non-decreasing;
        # the clamp only absorbs last-ulp rounding noise.
        alpha = max(alpha, prev_alpha, 0.0)
        prev_alpha = alpha
        pruned = RegressionTree(root=_freeze_pruned(root), feature_names=t.feature_names)
        sequence.append((pruned, alpha))

    return sequence


def select_subtree(
    seq: list[tuple[RegressionTree, float]], validation: Dataset
) -> RegressionTree:
    """Pick the subtree with the lowest validation RSS.

    Ties go to the tree with fewer leaves.  Raises on an empty sequence
    or an empty validation set (Dataset cannot be empty, so passing any
    Dataset satisfies the latter).
    """
    if not seq:
        raise ConfigError("cannot select from an empty subtree sequence")
    best_tree = None
    best_rss = math.inf
    best_leaves = -1
    for tree, _alpha in seq:
        preds = tree.predict_matrix(validation.X)
        rss = math.fsum((yv - pv) ** 2 for yv, pv in zip(validation.y, preds))
        leaves = tree.n_leaves
        if best_tree is None or rss < best_rss or (rss == best_rss and leaves < best_leaves):
            best_tree, best_rss, best_leaves = tree, rss, leaves
    return best_tree


def predict_tree(t: RegressionTree, x) -> float:
    """Route one point to its leaf; equality with a threshold goes left."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] != t.n_features:
        raise DimensionMismatchError(
            f"expected a point with {t.n_features} coordinate(s), got shape {x.shape}"
        )
    return _route(t.root, x)


def extract_partition(t: RegressionTree) -> list[Region]:
    """The leaf cells of the tree, in left-to-right leaf order.

    Each region intersects the half-spaces along its root-to-leaf path,
    keeping at most one interval per feature.  The regions are pairwise
    disjoint and cover all of input space, and every region satisfies
    ``lower < upper`` on each constrained feature.
    """
    regions: list[Region] = []

    def walk(node: Node, bounds: dict[int, tuple[float, float]]):
        if isinstance(node, Leaf):
            ordered = tuple(
                (f, lo, hi) for f, (lo, hi) in sorted(bounds.items())
            )
            regions.append(Region(bounds=ordered, prediction=node.value, count=node.count))
            return
        f, thr = node.split.feature, node.split.threshold
        lo, hi = bounds.get(f, (-math.inf, math.inf))
        left_bounds = dict(bounds)
        left_bounds[f] = (lo, min(hi, thr))
        walk(node.left, left_bounds)
        right_bounds = dict(bounds)
        right_bounds[f] = (max(lo, thr), hi)
        walk(node.right, right_bounds)

    walk(t.root, {})
    return regions


class CartRegressor(BaseEstimator, RegressorMixin):
    """Regression tree estimator with optional cost-complexity pruning.

    Parameters
    ----------
    max_leaves : int or None
        Leaf budget for the growing phase; None grows until pure.
    min_node_size : int
        Minimum rows per child of any split.
    prune : bool
        When True, grow on a shuffled training part, build the pruning
        sequence, and keep the subtree with the lowest RSS on the
        held-out part.
    validation_fraction : float
        Fraction held out for subtree selection when pruning.
    seed : int
        Seed for the deterministic train/validation shuffle.

    Attributes
    ----------
    tree_ : RegressionTree
    pruning_sequence_ : list of (RegressionTree, float)
        Only set when ``prune=True``.
    """

    def __init__(self, max_leaves=None, min_node_size=1, prune=False,
                 validation_fraction=0.2, seed=0):
        self.max_leaves = max_leaves
        self.min_node_size = min_node_size
        self.prune = prune
        self.validation_fraction = validation_fraction
        self.seed = seed

    def fit(self, X, y):
        names = default_feature_names(X, as_feature_matrix(X).shape[1])
        X = as_feature_matrix(X)
        y = as_target_vector(y, n_rows=X.shape[0])
        d = Dataset(names, X, y)
        cfg = GrowConfig(max_leaves=self.max_leaves, min_node_size=self.min_node_size)
        if self.prune:
            train, val = split_rows(d, 1.0 - self.validation_fraction, self.seed)
            grown = grow_tree(train, cfg)
            self.pruning_sequence_ = prune_tree(grown, train)
            self.tree_ = select_subtree(self.pruning_sequence_, val)
        else:
            self.tree_ = grow_tree(d, cfg)
        self.n_features_in_ = X.shape[1]
        self.feature_names_in_ = np.asarray(names, dtype=object)
        return self

    def predict(self, X):
        self._check_fitted()
        return self.tree_.predict_matrix(X)

    def _check_fitted(self):
        if not hasattr(self, "tree_"):
            raise RuntimeError("this CartRegressor instance is not fitted yet")

"""Model inspection: profiles, rule lists, and plot specifications.

The profile summarizes how hard a fitted model is to read along four
separate axes (input dimension, size, one-variable nonlinearity, and
interaction order plus structure).  The axes are deliberately kept
apart; collapsing them into one score would hide which kind of
complexity a model actually spends.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigError
from .gam import GamModel, LinearComponent, SmoothComponent
from .linear import LinearModel
from .mars import AnovaDecomposition, MarsModel, anova_decompose
from .tree import Leaf, Node, Region, RegressionTree, extract_partition

__all__ = [
    "InterpretabilityProfile",
    "profile",
    "Rule",
    "RuleList",
    "tree_to_rules",
    "TreeNodeSpec",
    "PlotSpec",
    "ComponentPlotSet",
    "component_plots",
    "tree_diagram",
]

UNIVARIATE_LEVELS = ("constant", "linear", "piecewise_linear", "nonparametric_smooth")
INTERACTION_STRUCTURES = ("none", "product_of_hinges", "axis_aligned_partition")


@dataclass(frozen=True)
class InterpretabilityProfile:
    """Four-axis readability summary of a fitted model.

    Attributes
    ----------
    input_dimension : int
        Number of features with any effect on predictions (zero-weight,
        unsplit, or zeroed-out features do not count).
    model_size : int
        Nonzero weights (linear), leaves (tree), hinge terms (splines),
        or non-null components (additive model).
    univariate_nonlinearity : str
        Most complex one-variable behavior present, judged by the fitted
        representation: one of ``constant``, ``linear``,
        ``piecewise_linear``, ``nonparametric_smooth``.  Piecewise
        constant (tree) slices fall under ``piecewise_linear``.
    max_interaction_degree : int
        Largest number of variables acting jointly (1 for additive fits,
        0 for constant ones).
    interaction_structure : str
        ``none`` when the fit is additive, ``product_of_hinges`` for
        spline interaction terms, ``axis_aligned_partition`` for trees
        whose paths cross several features.
    """

    input_dimension: int
    model_size: int
    univariate_nonlinearity: str
    max_interaction_degree: int
    interaction_structure: str

    def __post_init__(self):
        if self.univariate_nonlinearity not in UNIVARIATE_LEVELS:
            raise ConfigError(
                f"unknown univariate level {self.univariate_nonlinearity!r}"
            )
        if self.interaction_structure not in INTERACTION_STRUCTURES:
            raise ConfigError(
                f"unknown interaction structure {self.interaction_structure!r}"
            )

    def to_dict(self) -> dict:
        return {
            "input_dimension": self.input_dimension,
            "model_size": self.model_size,
            "univariate_nonlinearity": self.univariate_nonlinearity,
            "max_interaction_degree": self.max_interaction_degree,
            "interaction_structure": self.interaction_structure,
        }


def _tree_features_on_paths(node: Node, path: frozenset, acc: list) -> None:
    if isinstance(node, Leaf):
        acc.append(path)
        return
    extended = path | {node.split.feature}
    _tree_features_on_paths(node.left, extended, acc)
    _tree_features_on_paths(node.right, extended, acc)


def _profile_linear(m: LinearModel) -> InterpretabilityProfile:
    nonzero = sum(1 for w in m.weights if w != 0.0)
    return InterpretabilityProfile(
        input_dimension=nonzero,
        model_size=nonzero,
        univariate_nonlinearity="linear" if nonzero else "constant",
        max_interaction_degree=1 if nonzero else 0,
        interaction_structure="none",
    )


def _profile_tree(t: RegressionTree) -> InterpretabilityProfile:
    paths: list[frozenset] = []
    _tree_features_on_paths(t.root, frozenset(), paths)
    used = set().union(*paths) if paths else set()
    max_degree = max((len(p) for p in paths), default=0)
    return InterpretabilityProfile(
        input_dimension=len(used),
        model_size=t.n_leaves,
        univariate_nonlinearity="piecewise_linear" if used else "constant",
        max_interaction_degree=max_degree,
        interaction_structure="axis_aligned_partition" if max_degree >= 2 else "none",
    )


def _profile_mars(m: MarsModel) -> InterpretabilityProfile:
    used = {h.feature for term in m.terms for h in term.hinges}
    max_degree = m.max_degree
    return InterpretabilityProfile(
        input_dimension=len(used),
        model_size=len(m.terms),
        univariate_nonlinearity="piecewise_linear" if m.terms else "constant",
        max_interaction_degree=max_degree,
        interaction_structure="product_of_hinges" if max_degree >= 2 else "none",
    )


def _component_is_null(comp) -> bool:
    if isinstance(comp, LinearComponent):
        return comp.slope == 0.0 and comp.offset == 0.0
    return all(v == 0.0 for v in comp.values)


def _profile_gam(m: GamModel) -> InterpretabilityProfile:
    active = [c for c in m.components if not _component_is_null(c)]
    if any(isinstance(c, SmoothComponent) for c in active):
        level = "nonparametric_smooth"
    elif active:
        level = "linear"
    else:
        level = "constant"
    return InterpretabilityProfile(
        input_dimension=len(active),
        model_size=len(active),
        univariate_nonlinearity=level,
        max_interaction_degree=1 if active else 0,
        interaction_structure="none",
    )


def profile(model) -> InterpretabilityProfile:
    """Profile a fitted model of any supported family.

    Accepts the model objects themselves or fitted estimator instances
    (which are unwrapped through their ``model_``/``tree_`` attribute).
    """
    model = getattr(model, "model_", getattr(model, "tree_", model))
    if isinstance(model, LinearModel):
        return _profile_linear(model)
    if isinstance(model, RegressionTree):
        return _profile_tree(model)
    if isinstance(model, MarsModel):
        return _profile_mars(model)
    if isinstance(model, GamModel):
        return _profile_gam(model)
    raise TypeError(f"cannot profile object of type {type(model).__name__}")


# ---------------------------------------------------------------------------
# Rule extraction
# ---------------------------------------------------------------------------

def _format_value(v: float) -> str:
    return format(v, ".6g")


@dataclass(frozen=True)
class Rule:
    """One leaf's region written as a conjunction of interval tests."""

    region: Region
    feature_names: tuple[str, ...]

    @property
    def prediction(self) -> float:
        return self.region.prediction

    @property
    def support(self) -> int:
        return self.region.count

    def matches(self, x) -> bool:
        return self.region.contains(x)

    def condition_text(self) -> str:
        parts = []
        for f, lo, hi in self.region.bounds:
            name = self.feature_names[f]
            if lo == -math.inf and hi == math.inf:
                continue
            if lo == -math.inf:
                parts.append(f"{name} <= {_format_value(hi)}")
            elif hi == math.inf:
                parts.append(f"{name} > {_format_value(lo)}")
            else:
                parts.append(f"{_format_value(lo)} < {name} <= {_format_value(hi)}")
        return " and ".join(parts) if parts else "always"

    def to_text(self) -> str:
        noun = "row" if self.support == 1 else "rows"
        return (f"if {self.condition_text()} "
                f"then predict {_format_value(self.prediction)} "
                f"[{self.support} training {noun}]")


@dataclass(frozen=True)
class RuleList:
    """Ordered, mutually exclusive rules covering all of input space.

    Exactly one rule matches any point, and its prediction equals the
    tree's prediction there.
    """

    rules: tuple[Rule, ...]

    def match(self, x) -> Rule:
        for rule in self.rules:
            if rule.matches(x):
                return rule
        raise AssertionError("rule list failed to cover a point; this is a bug")

    def predict(self, x) -> float:
        return self.match(x).prediction

    def to_text(self) -> str:
        lines = [rule.to_text() for rule in self.rules]
        return "\n".join(lines) + "\n"


def tree_to_rules(t: RegressionTree) -> RuleList:
    """One rule per leaf, in left-to-right leaf order."""
    regions = extract_partition(t)
    return RuleList(tuple(Rule(region=r, feature_names=t.feature_names) for r in regions))


# ---------------------------------------------------------------------------
# Plot specifications
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TreeNodeSpec:
    """Placement and label of one node in a tree diagram."""

    id: int
    x: float
    y: float
    label: str
    is_leaf: bool


@dataclass(frozen=True)
class PlotSpec:
    """A renderer-independent description of one plot.

    ``kind`` is ``curve`` (x/y series), ``heatmap`` (x/y grid coordinates
    plus a value grid), or ``tree_diagram`` (placed nodes plus edges).
    For curves, ``solid_range`` marks the abscissa interval covered by
    training data; points outside it show extrapolation and renderers
    draw them dashed where the format allows.
    """

    kind: str
    title: str
    x_label: str = ""
    y_label: str = ""
    x: tuple[float, ...] = ()
    y: tuple[float, ...] = ()
    grid: tuple[tuple[float, ...], ...] = ()
    solid_range: tuple[float, float] | None = None
    nodes: tuple[TreeNodeSpec, ...] = ()
    edges: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if self.kind not in ("curve", "heatmap", "tree_diagram"):
            raise ConfigError(f"unknown plot kind {self.kind!r}")
        if self.kind == "curve":
            if len(self.x) != len(self.y) or len(self.x) < 2:
                raise ConfigError("a curve needs x and y series of equal length >= 2")
            values = [*self.x, *self.y]
        elif self.kind == "heatmap":
            if len(self.grid) != len(self.y) or any(len(row) != len(self.x) for row in self.grid):
                raise ConfigError("heatmap grid shape must be (len(y), len(x))")
            if len(self.x) < 2 or len(self.y) < 2:
                raise ConfigError("a heatmap needs at least a 2x2 grid")
            values = [*self.x, *self.y, *(v for row in self.grid for v in row)]
        else:
            if not self.nodes:
                raise ConfigError("a tree diagram needs at least one node")
            ids = [n.id for n in self.nodes]
            if len(set(ids)) != len(ids):
                raise ConfigError("tree diagram node ids must be unique")
            known = set(ids)
            for a, b in self.edges:
                if a not in known or b not in known:
                    raise ConfigError(f"edge ({a}, {b}) references an unknown node")
            values = [c for n in self.nodes for c in (n.x, n.y)]
        if any(not math.isfinite(v) for v in values):
            raise ConfigError("plot values must be finite")


@dataclass(frozen=True)
class ComponentPlotSet:
    """Plot specs for a model's components.

    ``unplottable`` names interaction groups of three or more variables,
    which are listed instead of drawn; no plot spec is ever produced for
    them.
    """

    specs: tuple[PlotSpec, ...]
    unplottable: tuple[str, ...]


def _curve_grid(lo: float, hi: float, resolution: int) -> tuple[np.ndarray, tuple[float, float]]:
    """Grid across the training range plus a short extrapolation margin."""
    if hi <= lo:
        return np.full(resolution, lo), (lo, lo)
    span = hi - lo
    margin = 0.1 * span
    n_ext = max(2, resolution // 8)
    left = lo - margin + (margin / n_ext) * np.arange(n_ext)
    right = hi + (margin / n_ext) * np.arange(1, n_ext + 1)
    inner = np.linspace(lo, hi, resolution)
    return np.concatenate([left, inner, right]), (lo, hi)


def _component_curve(name: str, evaluate, lo: float, hi: float,
                     resolution: int, title: str) -> PlotSpec:
    xs, solid = _curve_grid(lo, hi, resolution)
    ys = np.asarray(evaluate(xs), dtype=float)
    return PlotSpec(
        kind="curve",
        title=title,
        x_label=name,
        y_label="partial effect",
        x=tuple(float(v) for v in xs),
        y=tuple(float(v) for v in ys),
        solid_range=solid,
    )


def component_plots(model, grid_resolution: int = 64) -> ComponentPlotSet:
    """Plot specs for the components of an additive or spline model.

    Additive models get one curve per component over that feature's
    training range.  Spline models are decomposed by interacting feature
    set: one-variable groups become curves, two-variable groups become
    heatmaps over the training rectangle, and groups of three or more
    variables are only listed by name.

    ``grid_resolution`` (>= 2) is the number of in-range samples per
    axis; curves carry extra out-of-range points so renderers can show
    extrapolation behavior.
    """
    if grid_resolution < 2:
        raise ConfigError(f"grid_resolution must be >= 2, got {grid_resolution}")
    model = getattr(model, "model_", model)
    if isinstance(model, GamModel):
        return _gam_plots(model, grid_resolution)
    if isinstance(model, MarsModel):
        return _mars_plots(model, grid_resolution)
    raise TypeError(
        f"component plots exist for additive and spline models, not {type(model).__name__}"
    )


def _gam_plots(m: GamModel, resolution: int) -> ComponentPlotSet:
    specs = []
    for comp in m.components:
        name = m.feature_names[comp.feature]
        if isinstance(comp, SmoothComponent):
            lo, hi = comp.knots[0], comp.knots[-1]
        else:
            lo, hi = _gam_linear_range(m, comp.feature)
        specs.append(_component_curve(
            name, comp.evaluate, lo, hi, resolution, title=f"component {name}"
        ))
    return ComponentPlotSet(specs=tuple(specs), unplottable=())


def _gam_linear_range(m: GamModel, feature: int) -> tuple[float, float]:
    ranges = getattr(m, "feature_ranges", ())
    if ranges and feature < len(ranges):
        return ranges[feature]
    return (0.0, 1.0)


def _mars_plots(m: MarsModel, resolution: int) -> ComponentPlotSet:
    decomposition: AnovaDecomposition = anova_decompose(m)
    specs = []
    unplottable = []
    ranges = m.feature_ranges or tuple((0.0, 1.0) for _ in m.feature_names)
    for key, _terms in decomposition.groups:
        names = [m.feature_names[f] for f in key]
        if len(key) == 1:
            f = key[0]
            lo, hi = ranges[f]

            def evaluate(values, key=key, f=f):
                X = np.zeros((len(values), m.n_features))
                X[:, f] = values
                return decomposition.group_values(key, X)

            specs.append(_component_curve(
                names[0], evaluate, lo, hi, resolution, title=f"component {names[0]}"
            ))
        elif len(key) == 2:
            fa, fb = key
            (alo, ahi), (blo, bhi) = ranges[fa], ranges[fb]
            xs = np.linspace(alo, ahi, resolution) if ahi > alo else np.full(resolution, alo)
            ys = np.linspace(blo, bhi, resolution) if bhi > blo else np.full(resolution, blo)
            grid = []
            for yv in ys:
                X = np.zeros((resolution, m.n_features))
                X[:, fa] = xs
                X[:, fb] = yv
                grid.append(tuple(float(v) for v in decomposition.group_values(key, X)))
            specs.append(PlotSpec(
                kind="heatmap",
                title=f"interaction {names[0]}*{names[1]}",
                x_label=names[0],
                y_label=names[1],
                x=tuple(float(v) for v in xs),
                y=tuple(float(v) for v in ys),
                grid=tuple(grid),
            ))
        else:
            unplottable.append("*".join(names))
    return ComponentPlotSet(specs=tuple(specs), unplottable=tuple(unplottable))


# ---------------------------------------------------------------------------
# Tree diagrams
# ---------------------------------------------------------------------------

def tree_diagram(t: RegressionTree) -> PlotSpec:
    """Lay out a tree for drawing: leaves evenly spaced, parents centered."""
    nodes: list[TreeNodeSpec] = []
    edges: list[tuple[int, int]] = []
    n_leaves = t.n_leaves
    depth = t.depth
    leaf_step = 1.0 / n_leaves
    state = {"next_id": 0, "next_leaf": 0}

    def place(node: Node, level: int) -> tuple[int, float]:
        node_id = state["next_id"]
        state["next_id"] += 1
        y = level / depth if depth else 0.5
        if isinstance(node, Leaf):
            x = (state["next_leaf"] + 0.5) * leaf_step
            state["next_leaf"] += 1
            label = f"{_format_value(node.value)} (n={node.count})"
            nodes.append(TreeNodeSpec(id=node_id, x=x, y=y, label=label, is_leaf=True))
            return node_id, x
        left_id, left_x = place(node.left, level + 1)
        right_id, right_x = place(node.right, level + 1)
        x = (left_x + right_x) / 2.0
        name = t.feature_names[node.split.feature]
        label = f"{name} <= {_format_value(node.split.threshold)}"
        nodes.append(TreeNodeSpec(id=node_id, x=x, y=y, label=label, is_leaf=False))
        edges.append((node_id, left_id))
        edges.append((node_id, right_id))
        return node_id, x

    place(t.root, 0)
    nodes.sort(key=lambda n: n.id)
    return PlotSpec(
        kind="tree_diagram",
        title="regression tree",
        nodes=tuple(nodes),
        edges=tuple(edges),
    )

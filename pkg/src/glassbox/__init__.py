"""Interpretable regression models with a shared inspection toolkit.

Four model families live here: ordinary least squares lines, CART-style
regression trees, adaptive hinge-spline expansions, and backfitted
additive models with cubic smoothing splines.  Every fitted model can be
profiled, decomposed, rendered, and serialized through one set of
interfaces.
"""

from .dataset import (
    ColumnStandardizer,
    Dataset,
    FeatureScale,
    ScalingParams,
    load_csv,
    read_table,
    split,
    standardize,
    write_csv,
)
from .exceptions import (
    ConfigError,
    DataFormatError,
    DimensionMismatchError,
    GlassboxError,
    ModelFormatError,
    NumericalError,
    RankDeficiencyError,
)
from .gam import (
    GamConfig,
    GamModel,
    GamRegressor,
    LinearComponent,
    SmoothComponent,
    backfit,
    predict_gam,
    smooth_1d,
)
from .interpret import (
    ComponentPlotSet,
    InterpretabilityProfile,
    PlotSpec,
    Rule,
    RuleList,
    component_plots,
    profile,
    tree_diagram,
    tree_to_rules,
)
from .linear import LinearModel, LinearRegressor, fit_ols, predict_linear
from .mars import (
    AnovaDecomposition,
    BasisTerm,
    Hinge,
    MarsConfig,
    MarsModel,
    MarsRegressor,
    anova_decompose,
    backward_prune,
    forward_pass,
    gcv,
    predict_mars,
    select_by_gcv,
)
from .persistence import load_model, model_from_dict, model_to_dict, save_model
from .render import render
from .tree import (
    CartRegressor,
    GrowConfig,
    Leaf,
    Internal,
    Region,
    RegressionTree,
    SplitCandidate,
    best_split,
    extract_partition,
    grow_tree,
    predict_tree,
    prune_tree,
    select_subtree,
)

__version__ = "0.1.0"

__all__ = [
    "AnovaDecomposition",
    "BasisTerm",
    "CartRegressor",
    "ColumnStandardizer",
    "ComponentPlotSet",
    "ConfigError",
    "DataFormatError",
    "Dataset",
    "DimensionMismatchError",
    "FeatureScale",
    "GamConfig",
    "GamModel",
    "GamRegressor",
    "GlassboxError",
    "GrowConfig",
    "Hinge",
    "Internal",
    "InterpretabilityProfile",
    "Leaf",
    "LinearComponent",
    "LinearModel",
    "LinearRegressor",
    "MarsConfig",
    "MarsModel",
    "MarsRegressor",
    "ModelFormatError",
    "NumericalError",
    "PlotSpec",
    "RankDeficiencyError",
    "Region",
    "RegressionTree",
    "Rule",
    "RuleList",
    "ScalingParams",
    "SmoothComponent",
    "SplitCandidate",
    "anova_decompose",
    "backfit",
    "backward_prune",
    "best_split",
    "component_plots",
    "extract_partition",
    "fit_ols",
    "forward_pass",
    "gcv",
    "grow_tree",
    "load_csv",
    "load_model",
    "model_from_dict",
    "model_to_dict",
    "predict_gam",
    "predict_linear",
    "predict_mars",
    "predict_tree",
    "profile",
    "prune_tree",
    "read_table",
    "render",
    "save_model",
    "select_by_gcv",
    "select_subtree",
    "smooth_1d",
    "split",
    "standardize",
    "tree_diagram",
    "tree_to_rules",
    "write_csv",
]

"""Command-line front end: fit, predict, report, and plot subcommands.

Exit codes: 0 success, 2 usage error, 3 I/O error, 4 data/model
mismatch, 5 numerical failure.  All outputs are files written atomically
(write to a temporary name, then rename); stdout carries only the fit
summary.  Identical arguments, input files, and seed produce
byte-identical outputs.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .dataset import format_float, load_csv, read_table, split
from .exceptions import (
    ConfigError,
    DataFormatError,
    DimensionMismatchError,
    GlassboxError,
    ModelFormatError,
    NumericalError,
    RankDeficiencyError,
)
from .gam import GamConfig, GamModel, backfit
from .interpret import component_plots, profile, tree_diagram, tree_to_rules
from .linear import LinearModel, fit_ols
from .mars import MarsConfig, MarsModel, backward_prune, forward_pass, gcv, select_by_gcv
from .persistence import atomic_write, load_model, save_model
from .render import render
from .tree import GrowConfig, RegressionTree, grow_tree, prune_tree, select_subtree

__all__ = ["main", "run"]

_EXIT_USAGE = 2
_EXIT_IO = 3
_EXIT_MISMATCH = 4
_EXIT_NUMERICAL = 5


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="glassbox",
        description="Fit, inspect, and plot interpretable regression models.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    fit = sub.add_parser("fit", help="fit a model to a CSV dataset")
    fit.add_argument("--config", help="JSON file holding any of the flags below; "
                                      "explicit flags win")
    fit.add_argument("--model", choices=["linear", "cart", "mars", "gam"])
    fit.add_argument("--data", help="input CSV with a header row")
    fit.add_argument("--target", help="name of the target column")
    fit.add_argument("--out", help="path for the model JSON")
    fit.add_argument("--seed", type=int, help="shuffle seed (default 0)")
    # tree flags
    fit.add_argument("--max-leaves", type=int, dest="max_leaves")
    fit.add_argument("--min-node-size", type=int, dest="min_node_size")
    fit.add_argument("--validation-fraction", type=float, dest="validation_fraction",
                     help="held-out fraction for subtree selection (default 0.2)")
    # spline flags
    fit.add_argument("--max-terms", type=int, dest="max_terms")
    fit.add_argument("--max-interaction-degree", type=int, dest="max_interaction_degree")
    fit.add_argument("--gcv-penalty-per-knot", type=float, dest="gcv_penalty_per_knot")
    # additive model flags
    fit.add_argument("--penalty", type=float)
    fit.add_argument("--max-rounds", type=int, dest="max_rounds")
    fit.add_argument("--convergence-threshold", type=float, dest="convergence_threshold")
    fit.add_argument("--component-kinds", dest="component_kinds",
                     help="comma-separated per-feature kinds, e.g. smooth,linear,smooth")

    predict = sub.add_parser("predict", help="apply a saved model to new rows")
    predict.add_argument("--config", help="JSON file holding any of the flags below")
    predict.add_argument("--model-file", dest="model_file")
    predict.add_argument("--data", help="feature CSV; columns must match the model")
    predict.add_argument("--out", help="path for the prediction CSV")

    report = sub.add_parser("report", help="write the interpretability profile")
    report.add_argument("--config", help="JSON file holding any of the flags below")
    report.add_argument("--model-file", dest="model_file")
    report.add_argument("--out-dir", dest="out_dir")

    plot = sub.add_parser("plot", help="write one file per component plot")
    plot.add_argument("--config", help="JSON file holding any of the flags below")
    plot.add_argument("--model-file", dest="model_file")
    plot.add_argument("--out-dir", dest="out_dir")
    plot.add_argument("--format", choices=["svg", "text"])
    plot.add_argument("--grid-resolution", type=int, dest="grid_resolution")
    return parser


def _apply_config_file(args: argparse.Namespace) -> None:
    """Fill unset flags from the --config JSON document."""
    if not getattr(args, "config", None):
        return
    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise DataFormatError(f"cannot read config {args.config}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{args.config}: not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"{args.config}: config must be a JSON object")
    for key, value in doc.items():
        attr = str(key).replace("-", "_")
        if attr in ("config", "subcommand") or not hasattr(args, attr):
            raise ConfigError(f"{args.config}: unknown config field {key!r}")
        if getattr(args, attr) is None:
            setattr(args, attr, value)


def _require(args: argparse.Namespace, names: list[str]) -> None:
    missing = [n for n in names if getattr(args, n.replace("-", "_"), None) in (None, "")]
    if missing:
        flags = ", ".join("--" + n for n in missing)
        raise ConfigError(f"missing required flag(s): {flags}")


def _default(args, attr, value):
    if getattr(args, attr, None) is None:
        setattr(args, attr, value)


def _rss(y: np.ndarray, pred: np.ndarray) -> float:
    resid = np.asarray(y) - np.asarray(pred)
    return float(np.dot(resid, resid))


def _summary_lines(pairs: list[tuple[str, str]]) -> str:
    return "".join(f"{k}: {v}\n" for k, v in pairs)


def _cmd_fit(args) -> int:
    _require(args, ["model", "data", "target", "out"])
    _default(args, "seed", 0)
    d = load_csv(args.data, args.target)
    kind = args.model
    summary: list[tuple[str, str]] = [("model", kind),
                                      ("rows", str(d.n_rows)),
                                      ("features", str(d.n_features))]

    if kind == "linear":
        model = fit_ols(d)
        rss = _rss(d.y, model.predict_matrix(d.X))
        size = sum(1 for w in model.weights if w != 0.0)
        summary += [("nonzero-weights", str(size)), ("training-rss", format_float(rss))]
    elif kind == "cart":
        _default(args, "min_node_size", 1)
        _default(args, "validation_fraction", 0.2)
        cfg = GrowConfig(max_leaves=args.max_leaves, min_node_size=args.min_node_size)
        train, val = split(d, 1.0 - args.validation_fraction, args.seed)
        grown = grow_tree(train, cfg)
        sequence = prune_tree(grown, train)
        model = select_subtree(sequence, val)
        rss = _rss(d.y, model.predict_matrix(d.X))
        summary += [("grown-leaves", str(grown.n_leaves)),
                    ("leaves", str(model.n_leaves)),
                    ("training-rss", format_float(rss))]
    elif kind == "mars":
        _default(args, "max_terms", 10)
        _default(args, "max_interaction_degree", 2)
        cfg = MarsConfig(
            max_terms=args.max_terms,
            max_interaction_degree=args.max_interaction_degree,
            gcv_penalty_per_knot=args.gcv_penalty_per_knot,
        )
        penalty = cfg.resolved_penalty()
        forward = forward_pass(d, cfg)
        sequence = backward_prune(forward, d)
        model = select_by_gcv(sequence, d, penalty)
        rss = _rss(d.y, model.predict_matrix(d.X))
        summary += [("forward-terms", str(len(forward.terms))),
                    ("terms", str(len(model.terms))),
                    ("training-rss", format_float(rss)),
                    ("gcv", format_float(gcv(model, d, penalty)))]
    elif kind == "gam":
        _default(args, "penalty", 1.0)
        _default(args, "max_rounds", 100)
        _default(args, "convergence_threshold", 1e-6)
        kinds = None
        if args.component_kinds:
            raw = args.component_kinds
            parts = raw.split(",") if isinstance(raw, str) else list(raw)
            kinds = tuple(p.strip() for p in parts)
        cfg = GamConfig(
            penalty=args.penalty,
            max_rounds=args.max_rounds,
            convergence_threshold=args.convergence_threshold,
            component_kinds=kinds,
        )
        model = backfit(d, cfg)
        rss = _rss(d.y, model.predict_matrix(d.X))
        summary += [("components", str(len(model.components))),
                    ("converged", "yes" if model.converged else "no"),
                    ("rounds", str(len(model.history))),
                    ("training-rss", format_float(rss))]
    else:  # unreachable behind argparse choices
        raise ConfigError(f"unknown model kind {kind!r}")

    save_model(model, args.out)
    sys.stdout.write(_summary_lines(summary))
    return 0


def _cmd_predict(args) -> int:
    _require(args, ["model-file", "data", "out"])
    model = load_model(args.model_file)
    names, table = read_table(args.data)
    expected = model.feature_names
    if sorted(names) != sorted(expected):
        raise DimensionMismatchError(
            f"model expects column(s) {', '.join(expected)}; "
            f"data has {', '.join(names)}"
        )
    order = [names.index(f) for f in expected]
    preds = model.predict_matrix(table[:, order])
    body = "prediction\n" + "".join(format_float(p) + "\n" for p in preds)
    atomic_write(args.out, body.encode("utf-8"))
    return 0


def _cmd_report(args) -> int:
    _require(args, ["model-file", "out-dir"])
    model = load_model(args.model_file)
    prof = profile(model)
    os.makedirs(args.out_dir, exist_ok=True)
    doc = json.dumps(prof.to_dict(), indent=2, sort_keys=True) + "\n"
    atomic_write(os.path.join(args.out_dir, "profile.json"), doc.encode("utf-8"))
    if isinstance(model, RegressionTree):
        rules = tree_to_rules(model)
        atomic_write(os.path.join(args.out_dir, "rules.txt"),
                     rules.to_text().encode("utf-8"))
    return 0


def _safe_name(title: str) -> str:
    return "".join(c if c.isalnum() else "_" for c in title).strip("_")


def _cmd_plot(args) -> int:
    _require(args, ["model-file", "out-dir"])
    _default(args, "format", "svg")
    _default(args, "grid_resolution", 25)
    if args.format not in ("svg", "text"):
        raise ConfigError(f"--format must be svg or text, got {args.format!r}")
    model = load_model(args.model_file)
    ext = ".svg" if args.format == "svg" else ".txt"
    os.makedirs(args.out_dir, exist_ok=True)
    if isinstance(model, RegressionTree):
        specs = [tree_diagram(model)]
        unplottable: tuple[str, ...] = ()
    elif isinstance(model, (MarsModel, GamModel)):
        plot_set = component_plots(model, grid_resolution=args.grid_resolution)
        specs = list(plot_set.specs)
        unplottable = plot_set.unplottable
    elif isinstance(model, LinearModel):
        raise ConfigError(
            "plot supports cart, mars, and gam models; a linear model is its "
            "coefficient list (see report)"
        )
    else:
        raise ConfigError(f"cannot plot model of type {type(model).__name__}")
    for spec in specs:
        data = render(spec, args.format)
        atomic_write(os.path.join(args.out_dir, _safe_name(spec.title) + ext), data)
    if unplottable:
        listing = "".join(f"{name}\n" for name in unplottable)
        atomic_write(os.path.join(args.out_dir, "unplotted_groups.txt"),
                     listing.encode("utf-8"))
    return 0


_DISPATCH = {
    "fit": _cmd_fit,
    "predict": _cmd_predict,
    "report": _cmd_report,
    "plot": _cmd_plot,
}


def run(argv=None) -> int:
    """Parse arguments and execute one subcommand; returns the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse prints its own diagnostics
        return int(exc.code) if exc.code else 0
    try:
        _apply_config_file(args)
        return _DISPATCH[args.subcommand](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_USAGE
    except DataFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_IO
    except (DimensionMismatchError, ModelFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_MISMATCH
    except (RankDeficiencyError, NumericalError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_NUMERICAL
    except GlassboxError as exc:  # anything else from the library is a usage issue
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

"""JSON serialization of fitted models.

Each document carries a ``kind`` discriminator (``linear``, ``cart``,
``mars``, ``gam``).  Floats are serialized with Python's shortest
round-trip representation, so a saved and reloaded model predicts bit
for bit what the original did.  Files are written to a temporary path
and renamed into place, so readers never observe a partial document.
"""

from __future__ import annotations

import json
import math
import os

from .exceptions import DataFormatError, ModelFormatError
from .gam import GamModel, LinearComponent, SmoothComponent
from .linear import LinearModel
from .mars import BasisTerm, Hinge, MarsModel
from .tree import Internal, Leaf, RegressionTree, SplitCandidate

__all__ = ["model_to_dict", "model_from_dict", "save_model", "load_model", "atomic_write"]


def atomic_write(path, data: bytes) -> None:
    """Write bytes so the target never exists half-written."""
    path = os.fspath(path)
    tmp = path + ".tmp"
    with open(tmp, "wb") as fh:
        fh.write(data)
    os.replace(tmp, path)


def _node_to_dict(node):
    if isinstance(node, Leaf):
        return {"leaf": {"value": node.value, "count": node.count}}
    return {
        "split": {
            "feature": node.split.feature,
            "threshold": node.split.threshold,
            "loss": node.split.loss,
        },
        "left": _node_to_dict(node.left),
        "right": _node_to_dict(node.right),
    }


def _node_from_dict(doc):
    if "leaf" in doc:
        leaf = doc["leaf"]
        return Leaf(value=float(leaf["value"]), count=int(leaf["count"]))
    if "split" not in doc:
        raise ModelFormatError("tree node must contain either 'leaf' or 'split'")
    sp = doc["split"]
    cand = SplitCandidate(
        feature=int(sp["feature"]),
        threshold=float(sp["threshold"]),
        loss=float(sp.get("loss", math.nan)),
    )
    return Internal(
        split=cand,
        left=_node_from_dict(doc["left"]),
        right=_node_from_dict(doc["right"]),
    )


def model_to_dict(model) -> dict:
    """Serializable dictionary form of any supported model."""
    if isinstance(model, LinearModel):
        return {
            "kind": "linear",
            "intercept": model.intercept,
            "weights": list(model.weights),
            "features": list(model.feature_names),
        }
    if isinstance(model, RegressionTree):
        return {
            "kind": "cart",
            "features": list(model.feature_names),
            "root": _node_to_dict(model.root),
        }
    if isinstance(model, MarsModel):
        return {
            "kind": "mars",
            "intercept": model.intercept,
            "terms": [
                {
                    "coef": term.coefficient,
                    "factors": [
                        {"feature": h.feature, "knot": h.knot, "orientation": h.orientation}
                        for h in term.hinges
                    ],
                }
                for term in model.terms
            ],
            "features": list(model.feature_names),
            "n_train_rows": model.n_train_rows,
            "feature_ranges": [list(r) for r in model.feature_ranges],
        }
    if isinstance(model, GamModel):
        components = []
        for comp in model.components:
            if isinstance(comp, SmoothComponent):
                components.append({
                    "feature": comp.feature,
                    "kind": "smooth",
                    "knots": list(comp.knots),
                    "values": list(comp.values),
                })
            else:
                components.append({
                    "feature": comp.feature,
                    "kind": "linear",
                    "slope": comp.slope,
                    "offset": comp.offset,
                })
        return {
            "kind": "gam",
            "alpha": model.alpha,
            "components": components,
            "features": list(model.feature_names),
            "feature_ranges": [list(r) for r in model.feature_ranges],
            "converged": model.converged,
        }
    raise TypeError(f"cannot serialize object of type {type(model).__name__}")


def model_from_dict(doc: dict):
    """Rebuild a model from its dictionary form."""
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ModelFormatError("model document must be an object with a 'kind' field")
    kind = doc["kind"]
    try:
        if kind == "linear":
            return LinearModel(
                intercept=float(doc["intercept"]),
                weights=tuple(float(w) for w in doc["weights"]),
                feature_names=tuple(str(n) for n in doc["features"]),
            )
        if kind == "cart":
            return RegressionTree(
                root=_node_from_dict(doc["root"]),
                feature_names=tuple(str(n) for n in doc["features"]),
            )
        if kind == "mars":
            terms = []
            for t in doc["terms"]:
                hinges = tuple(
                    Hinge(
                        feature=int(f["feature"]),
                        knot=float(f["knot"]),
                        positive=f["orientation"] == "+",
                    )
                    for f in t["factors"]
                )
                terms.append(BasisTerm(hinges=hinges, coefficient=float(t["coef"])))
            return MarsModel(
                intercept=float(doc["intercept"]),
                terms=tuple(terms),
                feature_names=tuple(str(n) for n in doc["features"]),
                n_train_rows=int(doc.get("n_train_rows", 0)),
                feature_ranges=tuple(
                    (float(a), float(b)) for a, b in doc.get("feature_ranges", [])
                ),
            )
        if kind == "gam":
            components = []
            for c in doc["components"]:
                if c["kind"] == "smooth":
                    components.append(SmoothComponent(
                        feature=int(c["feature"]),
                        knots=tuple(float(k) for k in c["knots"]),
                        values=tuple(float(v) for v in c["values"]),
                    ))
                elif c["kind"] == "linear":
                    components.append(LinearComponent(
                        feature=int(c["feature"]),
                        slope=float(c["slope"]),
                        offset=float(c.get("offset", 0.0)),
                    ))
                else:
                    raise ModelFormatError(f"unknown component kind {c['kind']!r}")
            return GamModel(
                alpha=float(doc["alpha"]),
                components=tuple(components),
                feature_names=tuple(str(n) for n in doc["features"]),
                history=(),
                converged=bool(doc.get("converged", True)),
                feature_ranges=tuple(
                    (float(a), float(b)) for a, b in doc.get("feature_ranges", [])
                ),
            )
    except ModelFormatError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"malformed {kind!r} model document: {exc}") from exc
    raise ModelFormatError(f"unknown model kind {kind!r}")


def save_model(model, path) -> None:
    """Serialize a model to JSON at ``path`` (atomically)."""
    doc = model_to_dict(model)
    data = json.dumps(doc, indent=2, sort_keys=True).encode("utf-8") + b"\n"
    atomic_write(path, data)


def load_model(path):
    """Load a model saved by :func:`save_model`.

    Raises DataFormatError when the file cannot be read and
    ModelFormatError when its contents are not a valid model document.
    """
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise DataFormatError(f"cannot read {path}: {exc}") from exc
    try:
        doc = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ModelFormatError(f"{path}: not a valid JSON model document: {exc}") from exc
    return model_from_dict(doc)

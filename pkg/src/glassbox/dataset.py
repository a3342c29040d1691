"""Column-oriented datasets and the plumbing around them.

This module owns CSV reading and writing, feature standardization, and
deterministic train/validation splitting.  Everything downstream (the
model fitting code and the command line tool) goes through the
:class:`Dataset` type defined here.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .exceptions import ConfigError, DataFormatError, DimensionMismatchError
from .validation import as_feature_matrix

__all__ = [
    "Dataset",
    "FeatureScale",
    "ScalingParams",
    "ColumnStandardizer",
    "load_csv",
    "write_csv",
    "standardize",
    "split",
]

# Significant digits used when writing floats to CSV.  17 digits round-trip
# any IEEE double exactly.
_CSV_DIGITS = 17


@dataclass(frozen=True, eq=False)
class Dataset:
    """An immutable regression dataset.

    Parameters
    ----------
    feature_names : tuple of str
        One unique, non-empty name per feature column.
    X : ndarray of shape (n_rows, n_features)
        Feature columns.  Stored read-only as float64.
    y : ndarray of shape (n_rows,)
        Target column, same length as the feature columns.

    All values must be finite; NaN and infinities are rejected.
    """

    feature_names: tuple[str, ...]
    X: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        names = tuple(str(n) for n in self.feature_names)
        X = np.array(self.X, dtype=float, copy=True)
        if X.ndim != 2:
            raise DimensionMismatchError(f"X must be 2-dimensional, got shape {X.shape}")
        y = np.array(self.y, dtype=float, copy=True)
        if y.ndim != 1:
            raise DimensionMismatchError(f"y must be 1-dimensional, got shape {y.shape}")
        if X.shape[0] != y.shape[0]:
            raise DimensionMismatchError(
                f"X has {X.shape[0]} rows but y has {y.shape[0]}"
            )
        if y.shape[0] < 1:
            raise DimensionMismatchError("a dataset needs at least one row")
        if X.shape[1] != len(names):
            raise DimensionMismatchError(
                f"{len(names)} feature name(s) for {X.shape[1]} column(s)"
            )
        if any(n == "" for n in names):
            raise DataFormatError("feature names must be non-empty")
        if len(set(names)) != len(names):
            raise DataFormatError("feature names must be unique")
        if (X.size and not np.all(np.isfinite(X))) or not np.all(np.isfinite(y)):
            raise DataFormatError("dataset contains NaN or infinite values")
        X.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "feature_names", names)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    @property
    def n_rows(self) -> int:
        return self.X.shape[0]

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    def feature_index(self, name: str) -> int:
        try:
            return self.feature_names.index(name)
        except ValueError:
            raise KeyError(f"no feature named {name!r}") from None

    def column(self, name: str) -> np.ndarray:
        return self.X[:, self.feature_index(name)]

    def take(self, rows) -> "Dataset":
        """A new dataset holding the given rows, in the given order."""
        rows = np.asarray(rows, dtype=int)
        return Dataset(self.feature_names, self.X[rows], self.y[rows])


@dataclass(frozen=True)
class FeatureScale:
    """Standardization record for one column: mean, scale, applied flag."""

    mean: float
    scale: float
    scaled: bool


@dataclass(frozen=True)
class ScalingParams:
    """Per-feature standardization parameters.

    ``transform`` maps raw features to standardized ones and ``invert``
    undoes it exactly (up to float rounding).  The target column is never
    touched.  Columns flagged ``scaled=False`` were constant at fit time
    and pass through unchanged (their scale is recorded as 1).
    """

    scales: tuple[FeatureScale, ...]

    def transform(self, d: Dataset) -> Dataset:
        if d.n_features != len(self.scales):
            raise DimensionMismatchError(
                f"scaling has {len(self.scales)} columns, dataset has {d.n_features}"
            )
        X = d.X.copy()
        for j, s in enumerate(self.scales):
            if s.scaled:
                X[:, j] = (X[:, j] - s.mean) / s.scale
        return Dataset(d.feature_names, X, d.y)

    def invert(self, d: Dataset) -> Dataset:
        if d.n_features != len(self.scales):
            raise DimensionMismatchError(
                f"scaling has {len(self.scales)} columns, dataset has {d.n_features}"
            )
        X = d.X.copy()
        for j, s in enumerate(self.scales):
            if s.scaled:
                X[:, j] = X[:, j] * s.scale + s.mean
        return Dataset(d.feature_names, X, d.y)


def standardize(d: Dataset) -> tuple[Dataset, ScalingParams]:
    """Center and scale each non-constant feature column.

    Each non-constant column is shifted to sample mean 0 and scaled to
    sample standard deviation 1 (divisor ``n - 1``, so a column
    ``[1, 2, 3]`` maps to ``[-1, 0, 1]``).  Constant columns are left
    untouched and flagged as unscaled.  The target is never modified.

    Returns
    -------
    (Dataset, ScalingParams)
        The standardized dataset and the parameters needed to undo it.
    """
    scales = []
    X = d.X.copy()
    for j in range(d.n_features):
        col = d.X[:, j]
        constant = d.n_rows < 2 or float(col.max()) == float(col.min())
        if constant:
            scales.append(FeatureScale(mean=float(col[0]), scale=1.0, scaled=False))
            continue
        mean = float(np.mean(col))
        scale = float(np.std(col, ddof=1))
        if scale <= 0.0:  # paranoid: max() == min() already caught this
            scales.append(FeatureScale(mean=mean, scale=1.0, scaled=False))
            continue
        X[:, j] = (col - mean) / scale
        scales.append(FeatureScale(mean=mean, scale=scale, scaled=True))
    return Dataset(d.feature_names, X, d.y), ScalingParams(tuple(scales))


class ColumnStandardizer(BaseEstimator, TransformerMixin):
    """Transformer wrapper around :func:`standardize`.

    Fits per-column means and scales on a feature matrix and applies or
    inverts them, so the standardization step composes with scikit-learn
    pipelines.
    """

    def fit(self, X, y=None):
        X = as_feature_matrix(X)
        names = tuple(f"x{i + 1}" for i in range(X.shape[1]))
        _, params = standardize(Dataset(names, X, np.zeros(X.shape[0])))
        self.params_ = params
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        X = as_feature_matrix(X)
        names = tuple(f"x{i + 1}" for i in range(X.shape[1]))
        d = Dataset(names, X, np.zeros(X.shape[0]))
        return self.params_.transform(d).X

    def inverse_transform(self, X):
        X = as_feature_matrix(X)
        names = tuple(f"x{i + 1}" for i in range(X.shape[1]))
        d = Dataset(names, X, np.zeros(X.shape[0]))
        return self.params_.invert(d).X


# ---------------------------------------------------------------------------
# CSV input and output
# ---------------------------------------------------------------------------

def read_table(path) -> tuple[tuple[str, ...], np.ndarray]:
    """Read a numeric CSV with a header row.

    Returns the column names and a float64 matrix with one column per
    header entry.  Raises :class:`DataFormatError` with the offending row
    number (the header is row 1) and column name on any malformed cell.
    """
    try:
        fh = open(path, "r", encoding="utf-8", newline="")
    except OSError as exc:
        raise DataFormatError(f"cannot read {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError(f"{path}: file is empty, expected a header row") from None
        names = tuple(h.strip() for h in header)
        if any(n == "" for n in names):
            raise DataFormatError(f"{path}: header contains an empty column name")
        if len(set(names)) != len(names):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise DataFormatError(f"{path}: duplicate column name(s): {', '.join(dupes)}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(names):
                raise DataFormatError(
                    f"{path}: row {lineno} has {len(row)} cells, expected {len(names)}"
                )
            parsed = []
            for name, cell in zip(names, row):
                try:
                    value = float(cell)
                except ValueError:
                    raise DataFormatError(
                        f"{path}: row {lineno}, column {name!r}: "
                        f"cannot parse {cell.strip()!r} as a number"
                    ) from None
                if not math.isfinite(value):
                    raise DataFormatError(
                        f"{path}: row {lineno}, column {name!r}: "
                        f"non-finite value {cell.strip()!r} is not allowed"
                    )
                parsed.append(value)
            rows.append(parsed)
    if not rows:
        raise DataFormatError(f"{path}: no data rows after the header")
    return names, np.array(rows, dtype=float)


def load_csv(path, target_column: str) -> Dataset:
    """Load a :class:`Dataset` from a headed CSV file.

    Parameters
    ----------
    path : str or path-like
        CSV file with a header row; every cell below it must parse as a
        finite number.
    target_column : str
        Name of the column to use as the regression target.  All other
        columns become features, in header order.
    """
    names, table = read_table(path)
    if target_column not in names:
        raise DataFormatError(
            f"{path}: no column named {target_column!r} "
            f"(columns: {', '.join(names)})"
        )
    t = names.index(target_column)
    feature_names = tuple(n for i, n in enumerate(names) if i != t)
    keep = [i for i in range(len(names)) if i != t]
    return Dataset(feature_names, table[:, keep], table[:, t])


def format_float(value: float) -> str:
    """Serialize a float with enough digits to round-trip exactly."""
    return format(float(value), f".{_CSV_DIGITS}g")


def write_csv(d: Dataset, path, target_column: str = "y") -> None:
    """Write a dataset as CSV with the target as the last column.

    Floats are written with 17 significant digits so that
    ``load_csv(write_csv(d))`` reproduces ``d`` bit for bit.
    """
    if target_column in d.feature_names:
        raise DataFormatError(
            f"target column name {target_column!r} collides with a feature name"
        )
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join([*d.feature_names, target_column]) + "\n")
        for i in range(d.n_rows):
            cells = [format_float(v) for v in d.X[i]]
            cells.append(format_float(d.y[i]))
            fh.write(",".join(cells) + "\n")


# ---------------------------------------------------------------------------
# Deterministic train/validation split
# ---------------------------------------------------------------------------

# Linear congruential generator constants (the classic 32-bit recurrence
# from Numerical Recipes): state <- (a * state + c) mod 2**32.  Shuffling
# draws the high 16 bits of each state, which are the well-mixed ones.
_LCG_A = 1664525
_LCG_C = 1013904223
_LCG_MOD = 2**32


def _lcg_permutation(n: int, seed: int) -> list[int]:
    """Fisher-Yates permutation of range(n) driven by the LCG above."""
    state = seed % _LCG_MOD
    order = list(range(n))
    for i in range(n - 1, 0, -1):
        state = (_LCG_A * state + _LCG_C) % _LCG_MOD
        j = (state >> 16) % (i + 1)
        order[i], order[j] = order[j], order[i]
    return order


def split(d: Dataset, train_fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    """Deterministically split rows into a training and a validation part.

    Rows are shuffled with a seeded linear congruential generator (see the
    module constants; the shuffle is an LCG-driven Fisher-Yates pass, so
    any implementation of the same recurrence reproduces it).  The first
    ``floor(train_fraction * n_rows)`` shuffled rows form the training
    set; the rest, always at least one row, form the validation set.

    Parameters
    ----------
    d : Dataset
    train_fraction : float
        Must lie strictly between 0 and 1.
    seed : int
        Shuffle seed.  Equal seeds give equal splits on equal data.

    Raises
    ------
    ConfigError
        If the fraction is out of range or the training part would have
        fewer than two rows.
    """
    if not (0.0 < train_fraction < 1.0):
        raise ConfigError(f"train_fraction must be in (0, 1), got {train_fraction}")
    n = d.n_rows
    n_train = min(int(math.floor(train_fraction * n)), n - 1)
    if n_train < 2:
        raise ConfigError(
            f"split would leave {n_train} training row(s); need at least 2"
        )
    order = _lcg_permutation(n, seed)
    return d.take(order[:n_train]), d.take(order[n_train:])

"""Shared fixtures and dataset builders for the test suite."""

import numpy as np
import pytest

from glassbox.dataset import Dataset

# one line per acceptance criterion, printed after the run regardless of
# output capture (see pytest_terminal_summary below)
ACCEPTANCE_LOG: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LOG:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LOG:
            terminalreporter.write_line(line)


def make_dataset(X, y, names=None):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if names is None:
        names = tuple(f"x{i + 1}" for i in range(X.shape[1]))
    return Dataset(tuple(names), X, np.asarray(y, dtype=float))


def random_dataset(rng, n_rows, n_features, noise=0.0):
    """Linear-signal dataset with optional Gaussian noise."""
    X = rng.uniform(-3.0, 3.0, size=(n_rows, n_features))
    w = rng.uniform(-2.0, 2.0, size=n_features)
    y = X @ w + rng.uniform(-1.0, 1.0)
    if noise:
        y = y + rng.normal(0.0, noise, size=n_rows)
    return make_dataset(X, y)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)

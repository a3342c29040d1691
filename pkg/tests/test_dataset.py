"""Dataset container, CSV round-trip, standardization, and splitting."""

import math

import numpy as np
import pytest

from glassbox.dataset import (
    Dataset,
    ScalingParams,
    load_csv,
    read_table,
    split,
    standardize,
    write_csv,
)
from glassbox.exceptions import ConfigError, DataFormatError, DimensionMismatchError

from conftest import make_dataset


class TestDatasetContainer:
    def test_basic_properties(self):
        d = make_dataset([[1.0, 2.0], [3.0, 4.0]], [5.0, 6.0], names=("a", "b"))
        assert d.n_rows == 2
        assert d.n_features == 2
        assert d.feature_index("b") == 1
        assert list(d.column("a")) == [1.0, 3.0]

    def test_rejects_duplicate_names(self):
        with pytest.raises(DataFormatError):
            make_dataset([[1.0, 2.0]], [0.0], names=("a", "a"))

    def test_rejects_shape_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            Dataset(("a",), np.zeros((3, 1)), np.zeros(2))
        with pytest.raises(DimensionMismatchError):
            Dataset(("a", "b"), np.zeros((3, 1)), np.zeros(3))

    def test_rejects_non_finite(self):
        with pytest.raises(DataFormatError):
            make_dataset([[1.0], [math.nan]], [0.0, 1.0])
        with pytest.raises(DataFormatError):
            make_dataset([[1.0], [2.0]], [0.0, math.inf])

    def test_arrays_are_read_only(self):
        d = make_dataset([[1.0], [2.0]], [3.0, 4.0])
        with pytest.raises(ValueError):
            d.X[0, 0] = 9.0
        with pytest.raises(ValueError):
            d.y[0] = 9.0


class TestCsv:
    def test_round_trip_is_bit_exact(self, tmp_path, rng):
        X = rng.uniform(-1e6, 1e6, size=(40, 3))
        X[0, 0] = 1.0 / 3.0
        X[1, 1] = 1e-300
        y = rng.standard_normal(40)
        d = make_dataset(X, y)
        path = tmp_path / "t.csv"
        write_csv(d, str(path))
        back = load_csv(str(path), "y")
        assert back.feature_names == d.feature_names
        assert np.array_equal(back.X, d.X)
        assert np.array_equal(back.y, d.y)

    def test_custom_target_column(self, tmp_path):
        path = tmp_path / "t.csv"
        path.write_text("a,outcome,b\n1,10,2\n3,20,4\n", encoding="utf-8")
        d = load_csv(str(path), "outcome")
        assert d.feature_names == ("a", "b")
        assert list(d.y) == [10.0, 20.0]
        assert d.X.tolist() == [[1.0, 2.0], [3.0, 4.0]]

    def test_missing_target_column(self, tmp_path):
        path = tmp_path / "t.csv"
        path.write_text("a,b\n1,2\n", encoding="utf-8")
        with pytest.raises(DataFormatError, match="outcome"):
            load_csv(str(path), "outcome")

    def test_bad_cell_names_row_and_column(self, tmp_path):
        path = tmp_path / "t.csv"
        # header is row 1, so the bad cell sits in row 3, column b
        path.write_text("a,b,y\n1,2,3\n4,oops,6\n", encoding="utf-8")
        with pytest.raises(DataFormatError) as err:
            load_csv(str(path), "y")
        assert "row 3" in str(err.value)
        assert "b" in str(err.value)

    def test_non_finite_cell_rejected(self, tmp_path):
        path = tmp_path / "t.csv"
        path.write_text("a,y\nnan,1\n", encoding="utf-8")
        with pytest.raises(DataFormatError, match="row 2"):
            load_csv(str(path), "y")
        path.write_text("a,y\n1,-inf\n", encoding="utf-8")
        with pytest.raises(DataFormatError, match="y"):
            load_csv(str(path), "y")

    def test_ragged_row_rejected(self, tmp_path):
        path = tmp_path / "t.csv"
        path.write_text("a,b,y\n1,2,3\n4,5\n", encoding="utf-8")
        with pytest.raises(DataFormatError, match="row 3"):
            load_csv(str(path), "y")

    def test_empty_table_rejected(self, tmp_path):
        path = tmp_path / "t.csv"
        path.write_text("a,y\n", encoding="utf-8")
        with pytest.raises(DataFormatError):
            load_csv(str(path), "y")

    def test_read_table_returns_all_columns(self, tmp_path):
        path = tmp_path / "t.csv"
        path.write_text("p,q\n1,2\n3,4\n", encoding="utf-8")
        names, table = read_table(str(path))
        assert names == ("p", "q")
        assert table.tolist() == [[1.0, 2.0], [3.0, 4.0]]


class TestStandardize:
    def test_three_point_example(self):
        # sample standard deviation of [1, 2, 3] is 1, so the scaled
        # column is exactly [-1, 0, 1]
        d = make_dataset([[1.0], [2.0], [3.0]], [0.0, 0.0, 0.0])
        scaled, params = standardize(d)
        assert scaled.X[:, 0].tolist() == [-1.0, 0.0, 1.0]
        assert params.scales[0].mean == 2.0
        assert params.scales[0].scale == 1.0
        assert params.scales[0].scaled is True

    def test_constant_column_flagged_and_unscaled(self):
        d = make_dataset([[5.0, 1.0], [5.0, 2.0], [5.0, 4.0]], [0.0, 1.0, 2.0])
        scaled, params = standardize(d)
        assert params.scales[0].scaled is False
        assert params.scales[0].scale == 1.0
        assert np.array_equal(scaled.X[:, 0], d.X[:, 0])
        assert params.scales[1].scaled is True

    def test_scaled_columns_have_unit_sample_std(self, rng):
        X = rng.uniform(-5, 5, size=(30, 4))
        d = make_dataset(X, rng.standard_normal(30))
        scaled, _ = standardize(d)
        for j in range(4):
            assert abs(float(np.mean(scaled.X[:, j]))) < 1e-12
            assert abs(float(np.std(scaled.X[:, j], ddof=1)) - 1.0) < 1e-12

    def test_invert_round_trips(self, rng):
        X = rng.uniform(-5, 5, size=(20, 3))
        X[:, 2] = 7.0
        d = make_dataset(X, rng.standard_normal(20))
        scaled, params = standardize(d)
        assert np.allclose(params.invert(scaled).X, d.X, atol=1e-12)
        assert np.allclose(params.transform(d).X, scaled.X, atol=1e-12)

    def test_single_row_left_alone(self):
        d = make_dataset([[3.0, 4.0]], [1.0])
        scaled, params = standardize(d)
        assert all(not s.scaled for s in params.scales)
        assert np.array_equal(scaled.X, d.X)


def _reference_permutation(n, seed):
    """Independent re-statement of the shuffling recipe."""
    state = seed % (2**32)
    order = list(range(n))
    for i in range(n - 1, 0, -1):
        state = (1664525 * state + 1013904223) % (2**32)
        j = (state >> 16) % (i + 1)
        order[i], order[j] = order[j], order[i]
    return order


class TestSplit:
    def test_sizes_for_ten_rows(self, rng):
        d = make_dataset(rng.uniform(size=(10, 2)), rng.uniform(size=10))
        train, val = split(d, 0.8, seed=1)
        assert (train.n_rows, val.n_rows) == (8, 2)
        train, val = split(d, 0.999, seed=1)
        assert (train.n_rows, val.n_rows) == (9, 1)

    def test_validation_never_empty(self, rng):
        d = make_dataset(rng.uniform(size=(5, 1)), rng.uniform(size=5))
        train, val = split(d, 0.99, seed=0)
        assert val.n_rows == 1
        assert train.n_rows == 4

    def test_matches_reference_permutation(self, rng):
        n = 12
        d = make_dataset(np.arange(n, dtype=float), np.arange(n, dtype=float))
        for seed in (0, 1, 7, 123456):
            train, val = split(d, 0.75, seed=seed)
            order = _reference_permutation(n, seed)
            k = min(int(0.75 * n), n - 1)
            assert list(train.y) == [float(i) for i in order[:k]]
            assert list(val.y) == [float(i) for i in order[k:]]

    def test_partition_exact(self, rng):
        d = make_dataset(rng.uniform(size=(23, 2)), np.arange(23, dtype=float))
        train, val = split(d, 0.6, seed=9)
        seen = sorted(list(train.y) + list(val.y))
        assert seen == list(np.arange(23, dtype=float))

    def test_deterministic_per_seed(self, rng):
        d = make_dataset(rng.uniform(size=(15, 2)), rng.uniform(size=15))
        a1, b1 = split(d, 0.8, seed=42)
        a2, b2 = split(d, 0.8, seed=42)
        assert np.array_equal(a1.X, a2.X) and np.array_equal(b1.y, b2.y)
        a3, _ = split(d, 0.8, seed=43)
        assert not np.array_equal(a1.y, a3.y)

    def test_rejects_bad_fraction_and_tiny_data(self, rng):
        d = make_dataset(rng.uniform(size=(10, 1)), rng.uniform(size=10))
        with pytest.raises(ConfigError):
            split(d, 0.0, seed=0)
        with pytest.raises(ConfigError):
            split(d, 1.5, seed=0)
        tiny = make_dataset([[1.0], [2.0]], [0.0, 1.0])
        with pytest.raises(ConfigError):
            split(tiny, 0.6, seed=0)  # would leave one training row


class TestScalingParams:
    def test_transform_rejects_wrong_width(self, rng):
        d = make_dataset(rng.uniform(size=(6, 2)), rng.uniform(size=6))
        _, params = standardize(d)
        assert isinstance(params, ScalingParams)
        wide = make_dataset(rng.uniform(size=(3, 3)), rng.uniform(size=3))
        with pytest.raises(DimensionMismatchError):
            params.transform(wide)

"""JSON model serialization round-trips and format policing."""

import json
import os

import numpy as np
import pytest

from glassbox.exceptions import DataFormatError, ModelFormatError
from glassbox.gam import GamConfig, backfit
from glassbox.linear import fit_ols
from glassbox.mars import MarsConfig, forward_pass
from glassbox.persistence import (
    atomic_write,
    load_model,
    model_from_dict,
    model_to_dict,
    save_model,
)
from glassbox.tree import GrowConfig, grow_tree

from conftest import make_dataset


def _fitted_models(rng):
    X = rng.uniform(-2, 2, size=(50, 2))
    y = np.sin(X[:, 0]) + X[:, 1] + 0.05 * rng.standard_normal(50)
    d = make_dataset(X, y)
    return {
        "linear": fit_ols(d),
        "cart": grow_tree(d, GrowConfig(max_leaves=5)),
        "mars": forward_pass(d, MarsConfig(max_terms=4)),
        "gam": backfit(d, GamConfig(penalty=0.2)),
    }, d


class TestRoundTrip:
    def test_predictions_survive_save_load(self, rng, tmp_path):
        models, d = _fitted_models(rng)
        probes = rng.uniform(-3, 3, size=(40, 2))
        for kind, model in models.items():
            path = tmp_path / f"{kind}.json"
            save_model(model, str(path))
            back = load_model(str(path))
            assert type(back) is type(model)
            assert back.feature_names == model.feature_names
            assert np.array_equal(back.predict_matrix(probes),
                                  model.predict_matrix(probes))

    def test_dict_round_trip_no_disk(self, rng):
        models, _ = _fitted_models(rng)
        probes = rng.uniform(-1, 1, size=(10, 2))
        for model in models.values():
            doc = model_to_dict(model)
            back = model_from_dict(json.loads(json.dumps(doc)))
            assert np.array_equal(back.predict_matrix(probes),
                                  model.predict_matrix(probes))

    def test_saved_file_is_canonical_json(self, rng, tmp_path):
        models, _ = _fitted_models(rng)
        path = tmp_path / "m.json"
        save_model(models["cart"], str(path))
        raw = path.read_bytes()
        assert raw.endswith(b"\n")
        doc = json.loads(raw)
        assert raw.decode("utf-8") == json.dumps(doc, indent=2, sort_keys=True) + "\n"
        # a second save writes identical bytes
        save_model(models["cart"], str(path))
        assert path.read_bytes() == raw

    def test_kind_field_present(self, rng):
        models, _ = _fitted_models(rng)
        for kind, model in models.items():
            assert model_to_dict(model)["kind"] == kind


class TestMalformedInput:
    def test_missing_file(self, tmp_path):
        with pytest.raises(DataFormatError):
            load_model(str(tmp_path / "absent.json"))

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "m.json"
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(ModelFormatError):
            load_model(str(path))

    def test_unknown_kind(self, tmp_path):
        path = tmp_path / "m.json"
        path.write_text(json.dumps({"kind": "forest", "features": ["a"]}),
                        encoding="utf-8")
        with pytest.raises(ModelFormatError, match="forest"):
            load_model(str(path))

    def test_missing_field(self, rng, tmp_path):
        models, _ = _fitted_models(rng)
        doc = model_to_dict(models["linear"])
        del doc["weights"]
        path = tmp_path / "m.json"
        path.write_text(json.dumps(doc), encoding="utf-8")
        with pytest.raises(ModelFormatError, match="weights"):
            load_model(str(path))

    def test_wrong_shape_field(self, rng, tmp_path):
        models, _ = _fitted_models(rng)
        doc = model_to_dict(models["linear"])
        doc["weights"] = "many"
        path = tmp_path / "m.json"
        path.write_text(json.dumps(doc), encoding="utf-8")
        with pytest.raises(ModelFormatError):
            load_model(str(path))

    def test_non_object_document(self, tmp_path):
        path = tmp_path / "m.json"
        path.write_text("[1, 2, 3]", encoding="utf-8")
        with pytest.raises(ModelFormatError):
            load_model(str(path))

    def test_bad_tree_node(self, rng, tmp_path):
        models, _ = _fitted_models(rng)
        doc = model_to_dict(models["cart"])
        doc["root"] = {"neither": True}
        path = tmp_path / "m.json"
        path.write_text(json.dumps(doc), encoding="utf-8")
        with pytest.raises(ModelFormatError):
            load_model(str(path))

    def test_bad_gam_component_kind(self, rng, tmp_path):
        models, _ = _fitted_models(rng)
        doc = model_to_dict(models["gam"])
        doc["components"][0]["kind"] = "quadratic"
        path = tmp_path / "m.json"
        path.write_text(json.dumps(doc), encoding="utf-8")
        with pytest.raises(ModelFormatError):
            load_model(str(path))


class TestAtomicWrite:
    def test_no_temp_file_left_behind(self, tmp_path):
        path = tmp_path / "out.bin"
        atomic_write(str(path), b"payload")
        assert path.read_bytes() == b"payload"
        assert os.listdir(tmp_path) == ["out.bin"]

    def test_overwrites_existing(self, tmp_path):
        path = tmp_path / "out.bin"
        path.write_bytes(b"old")
        atomic_write(str(path), b"new")
        assert path.read_bytes() == b"new"

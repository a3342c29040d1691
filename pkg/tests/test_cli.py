"""Command-line interface: contracts, exit codes, determinism."""

import json
import os

import numpy as np
import pytest

from glassbox.cli import run
from glassbox.dataset import write_csv
from glassbox.datasets import example_path

from conftest import make_dataset


@pytest.fixture
def small_csv(tmp_path, rng):
    X = rng.uniform(-2, 2, size=(40, 2))
    y = np.sin(X[:, 0]) + 0.5 * X[:, 1]
    path = tmp_path / "data.csv"
    write_csv(make_dataset(X, y), str(path))
    return str(path)


def _read(path):
    with open(path, "rb") as fh:
        return fh.read()


class TestFit:
    def test_cart_fit_contract(self, tmp_path, capsys):
        out = tmp_path / "m.json"
        code = run(["fit", "--model", "cart", "--data", example_path(),
                    "--target", "y", "--max-leaves", "8", "--out", str(out)])
        assert code == 0
        assert out.exists()
        summary = capsys.readouterr()
        assert summary.err == ""
        fields = dict(line.split(": ", 1) for line in summary.out.strip().split("\n"))
        assert fields["model"] == "cart"
        assert int(fields["leaves"]) <= 8
        assert float(fields["training-rss"]) >= 0.0

    def test_each_model_kind_fits(self, tmp_path, small_csv, capsys):
        for kind in ("linear", "cart", "mars", "gam"):
            out = tmp_path / f"{kind}.json"
            code = run(["fit", "--model", kind, "--data", small_csv,
                        "--target", "y", "--out", str(out)])
            assert code == 0, capsys.readouterr().err
            assert out.exists()
            doc = json.loads(_read(out))
            assert doc["kind"] == kind
            capsys.readouterr()

    def test_gam_summary_reports_convergence(self, tmp_path, small_csv, capsys):
        out = tmp_path / "gam.json"
        assert run(["fit", "--model", "gam", "--data", small_csv, "--target", "y",
                    "--penalty", "0.5", "--out", str(out)]) == 0
        text = capsys.readouterr().out
        assert "converged: " in text
        assert "rounds: " in text

    def test_mars_summary_reports_gcv(self, tmp_path, small_csv, capsys):
        out = tmp_path / "mars.json"
        assert run(["fit", "--model", "mars", "--data", small_csv, "--target", "y",
                    "--out", str(out)]) == 0
        assert "gcv: " in capsys.readouterr().out

    def test_missing_flags_is_usage_error(self, capsys):
        assert run(["fit", "--model", "cart"]) == 2
        assert "missing required flag" in capsys.readouterr().err

    def test_unknown_flag_is_usage_error(self, small_csv, tmp_path, capsys):
        code = run(["fit", "--model", "cart", "--data", small_csv, "--target", "y",
                    "--out", str(tmp_path / "m.json"), "--bogus", "1"])
        assert code == 2

    def test_unknown_model_kind_rejected(self, small_csv, tmp_path):
        assert run(["fit", "--model", "forest", "--data", small_csv,
                    "--target", "y", "--out", str(tmp_path / "m.json")]) == 2

    def test_missing_data_file_is_io_error(self, tmp_path, capsys):
        code = run(["fit", "--model", "linear", "--data", str(tmp_path / "no.csv"),
                    "--target", "y", "--out", str(tmp_path / "m.json")])
        assert code == 3
        assert capsys.readouterr().err != ""

    def test_rank_deficiency_is_numerical_error(self, tmp_path, rng, capsys):
        X = rng.uniform(size=(20, 2))
        X[:, 1] = X[:, 0] * 2.0
        path = tmp_path / "dup.csv"
        write_csv(make_dataset(X, rng.uniform(size=20)), str(path))
        code = run(["fit", "--model", "linear", "--data", str(path),
                    "--target", "y", "--out", str(tmp_path / "m.json")])
        assert code == 5
        assert not (tmp_path / "m.json").exists()

    def test_bad_target_column(self, small_csv, tmp_path):
        assert run(["fit", "--model", "linear", "--data", small_csv,
                    "--target", "zz", "--out", str(tmp_path / "m.json")]) == 3


class TestConfigFile:
    def test_config_supplies_fields(self, tmp_path, small_csv, capsys):
        cfg = tmp_path / "cfg.json"
        out = tmp_path / "m.json"
        cfg.write_text(json.dumps({
            "model": "cart", "data": small_csv, "target": "y",
            "out": str(out), "max-leaves": 4,
        }), encoding="utf-8")
        assert run(["fit", "--config", str(cfg)]) == 0
        fields = dict(line.split(": ", 1)
                      for line in capsys.readouterr().out.strip().split("\n"))
        assert int(fields["leaves"]) <= 4

    def test_flags_override_config(self, tmp_path, small_csv, capsys):
        cfg = tmp_path / "cfg.json"
        out = tmp_path / "m.json"
        cfg.write_text(json.dumps({
            "model": "cart", "data": small_csv, "target": "y",
            "out": str(out), "max-leaves": 30,
        }), encoding="utf-8")
        assert run(["fit", "--config", str(cfg), "--max-leaves", "2"]) == 0
        fields = dict(line.split(": ", 1)
                      for line in capsys.readouterr().out.strip().split("\n"))
        assert int(fields["leaves"]) <= 2

    def test_unknown_config_field_rejected(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"modle": "cart"}), encoding="utf-8")
        assert run(["fit", "--config", str(cfg)]) == 2
        assert "modle" in capsys.readouterr().err

    def test_unreadable_config_is_io_error(self, tmp_path):
        assert run(["fit", "--config", str(tmp_path / "no.json")]) == 3

    def test_config_must_be_object(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text("[1]", encoding="utf-8")
        assert run(["fit", "--config", str(cfg)]) == 2


class TestPredict:
    def _fit(self, tmp_path, small_csv, kind="linear"):
        out = tmp_path / "m.json"
        assert run(["fit", "--model", kind, "--data", small_csv,
                    "--target", "y", "--out", str(out)]) == 0
        return str(out)

    def test_round_trip(self, tmp_path, small_csv, rng, capsys):
        model = self._fit(tmp_path, small_csv)
        feats = tmp_path / "probe.csv"
        X = rng.uniform(-1, 1, size=(5, 2))
        # write features only
        lines = ["x1,x2"] + [f"{float(a)!r},{float(b)!r}" for a, b in X]
        feats.write_text("\n".join(lines) + "\n", encoding="utf-8")
        out = tmp_path / "pred.csv"
        capsys.readouterr()
        assert run(["predict", "--model-file", model, "--data", str(feats),
                    "--out", str(out)]) == 0
        assert capsys.readouterr().out == ""
        body = _read(out).decode("utf-8").strip().split("\n")
        assert body[0] == "prediction"
        assert len(body) == 6

    def test_width_mismatch_exits_4_writes_nothing(self, tmp_path, small_csv, capsys):
        model = self._fit(tmp_path, small_csv)
        wide = tmp_path / "wide.csv"
        wide.write_text("x1,x2,x3\n1,2,3\n", encoding="utf-8")
        out = tmp_path / "pred.csv"
        capsys.readouterr()
        assert run(["predict", "--model-file", model, "--data", str(wide),
                    "--out", str(out)]) == 4
        assert not out.exists()
        assert "x3" in capsys.readouterr().err

    def test_column_order_does_not_matter(self, tmp_path, small_csv, capsys):
        model = self._fit(tmp_path, small_csv)
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        a.write_text("x1,x2\n0.5,1.5\n", encoding="utf-8")
        b.write_text("x2,x1\n1.5,0.5\n", encoding="utf-8")
        out_a = tmp_path / "pa.csv"
        out_b = tmp_path / "pb.csv"
        assert run(["predict", "--model-file", model, "--data", str(a),
                    "--out", str(out_a)]) == 0
        assert run(["predict", "--model-file", model, "--data", str(b),
                    "--out", str(out_b)]) == 0
        assert _read(out_a) == _read(out_b)

    def test_corrupt_model_file_exits_4(self, tmp_path, small_csv):
        bad = tmp_path / "bad.json"
        bad.write_text("{", encoding="utf-8")
        assert run(["predict", "--model-file", str(bad), "--data", small_csv,
                    "--out", str(tmp_path / "p.csv")]) == 4


class TestReportAndPlot:
    def _fit(self, tmp_path, kind, small_csv):
        out = tmp_path / f"{kind}.json"
        assert run(["fit", "--model", kind, "--data", small_csv,
                    "--target", "y", "--out", str(out)]) == 0
        return str(out)

    def test_report_writes_profile_and_rules(self, tmp_path, small_csv, capsys):
        model = self._fit(tmp_path, "cart", small_csv)
        rep = tmp_path / "rep"
        capsys.readouterr()
        assert run(["report", "--model-file", model, "--out-dir", str(rep)]) == 0
        assert capsys.readouterr().out == ""
        doc = json.loads(_read(rep / "profile.json"))
        assert set(doc) == {
            "input_dimension", "model_size", "univariate_nonlinearity",
            "max_interaction_degree", "interaction_structure",
        }
        assert (rep / "rules.txt").exists()

    def test_report_linear_has_no_rules(self, tmp_path, small_csv):
        model = self._fit(tmp_path, "linear", small_csv)
        rep = tmp_path / "rep2"
        assert run(["report", "--model-file", model, "--out-dir", str(rep)]) == 0
        assert not (rep / "rules.txt").exists()

    def test_plot_gam_components(self, tmp_path, small_csv, capsys):
        model = self._fit(tmp_path, "gam", small_csv)
        plots = tmp_path / "plots"
        capsys.readouterr()
        assert run(["plot", "--model-file", model, "--out-dir", str(plots),
                    "--format", "svg", "--grid-resolution", "16"]) == 0
        assert capsys.readouterr().out == ""
        files = sorted(os.listdir(plots))
        assert files == ["component_x1.svg", "component_x2.svg"]
        assert _read(plots / files[0]).startswith(b"<?xml") or \
            _read(plots / files[0]).startswith(b"<svg")

    def test_plot_tree_diagram(self, tmp_path, small_csv):
        model = self._fit(tmp_path, "cart", small_csv)
        plots = tmp_path / "tplots"
        assert run(["plot", "--model-file", model, "--out-dir", str(plots),
                    "--format", "text"]) == 0
        files = os.listdir(plots)
        assert len(files) == 1 and files[0].endswith(".txt")

    def test_plot_linear_rejected(self, tmp_path, small_csv, capsys):
        model = self._fit(tmp_path, "linear", small_csv)
        assert run(["plot", "--model-file", model,
                    "--out-dir", str(tmp_path / "p")]) == 2

    def test_bad_grid_resolution(self, tmp_path, small_csv):
        model = self._fit(tmp_path, "gam", small_csv)
        assert run(["plot", "--model-file", model, "--out-dir",
                    str(tmp_path / "p"), "--grid-resolution", "1"]) == 2

    def test_bad_format_rejected(self, tmp_path, small_csv):
        model = self._fit(tmp_path, "gam", small_csv)
        assert run(["plot", "--model-file", model, "--out-dir",
                    str(tmp_path / "p"), "--format", "png"]) == 2


class TestDeterminism:
    def test_pipeline_byte_identical_across_runs(self, tmp_path, capsys):
        outputs = []
        for tag in ("one", "two"):
            root = tmp_path / tag
            root.mkdir()
            model = root / "m.json"
            assert run(["fit", "--model", "mars", "--data", example_path(),
                        "--target", "y", "--seed", "7", "--out", str(model)]) == 0
            assert run(["report", "--model-file", str(model),
                        "--out-dir", str(root / "rep")]) == 0
            assert run(["plot", "--model-file", str(model),
                        "--out-dir", str(root / "plots"),
                        "--format", "svg", "--grid-resolution", "20"]) == 0
            blobs = {"stdout": capsys.readouterr().out.encode()}
            blobs["model"] = _read(model)
            for sub in ("rep", "plots"):
                for name in sorted(os.listdir(root / sub)):
                    blobs[f"{sub}/{name}"] = _read(root / sub / name)
            outputs.append(blobs)
        assert outputs[0].keys() == outputs[1].keys()
        for key in outputs[0]:
            assert outputs[0][key] == outputs[1][key], f"{key} differs between runs"

"""Serialization round-trips and the command-line workflow."""

import json
import subprocess
import sys

import numpy as np
import pytest

from ocsmm import cli, io
from ocsmm.datagen import gen_rotated_gaussians
from ocsmm.groups import ANOMALOUS, NORMAL, EmpiricalGroup, GaussianGroup, isotropic_gaussian
from ocsmm.kernels import KernelConfig, median_heuristic
from ocsmm.model import anomaly_scores, decision_function, fit


@pytest.fixture()
def small_dataset(tmp_path):
    ds = gen_rotated_gaussians(0, n_points=20)
    path = tmp_path / "data.json"
    io.write_groups(path, ds.groups, labels=ds.labels)
    return path, ds


class TestGroupsIo:
    def test_json_round_trip_mixed_kinds(self, tmp_path):
        groups = [
            EmpiricalGroup([[0.0, 1.0], [2.0, 3.0]]),
            GaussianGroup([1.0, -1.0], [[0.3, 0.1], [0.1, 0.2]]),
        ]
        labels = [NORMAL, ANOMALOUS]
        path = tmp_path / "groups.json"
        io.write_groups(path, groups, labels=labels, ids=["a", "b"])
        data = io.read_groups(path)
        assert data.ids == ("a", "b")
        assert data.labels == (NORMAL, ANOMALOUS)
        assert np.array_equal(data.groups[0].points, groups[0].points)
        assert np.array_equal(data.groups[1].mean, groups[1].mean)
        assert np.array_equal(data.groups[1].cov, groups[1].cov)

    def test_write_read_write_is_byte_identical(self, tmp_path):
        rng = np.random.default_rng(0)
        groups = [EmpiricalGroup(rng.normal(size=(4, 3))) for _ in range(3)]
        p1, p2 = tmp_path / "one.json", tmp_path / "two.json"
        io.write_groups(p1, groups)
        data = io.read_groups(p1)
        io.write_groups(p2, data.groups, ids=data.ids)
        assert p1.read_bytes() == p2.read_bytes()

    def test_csv_tabular(self, tmp_path):
        path = tmp_path / "points.csv"
        path.write_text(
            "group_id,x1,x2\n"
            "g1,0.0,1.0\n"
            "g2,5.0,5.0\n"
            "g1,0.5,1.5\n"
        )
        data = io.read_groups(path)
        assert data.ids == ("g1", "g2")
        assert data.labels is None
        assert np.array_equal(data.groups[0].points, [[0.0, 1.0], [0.5, 1.5]])
        assert np.array_equal(data.groups[1].points, [[5.0, 5.0]])

    def test_malformed_record_names_group(self, tmp_path):
        path = tmp_path / "bad.json"
        doc = {"format": io.GROUPS_FORMAT, "version": 1,
               "groups": [{"id": "broken-one", "points": [["oops"]]}]}
        path.write_text(json.dumps(doc))
        with pytest.raises(ValueError, match="broken-one"):
            io.read_groups(path)

    def test_wrong_format_rejected(self, tmp_path):
        path = tmp_path / "other.json"
        path.write_text(json.dumps({"format": "something-else"}))
        with pytest.raises(ValueError, match="not a"):
            io.read_groups(path)


class TestModelIo:
    def test_round_trip_decisions_identical(self, tmp_path):
        ds = gen_rotated_gaussians(1, n_points=15)
        model = fit(ds.groups[:8], KernelConfig(sigma_sq=0.02), nu=0.4)
        path = tmp_path / "model.json"
        io.save_model(path, model)
        loaded = io.load_model(path)
        for g in ds.groups[8:12]:
            assert decision_function(loaded, g) == pytest.approx(
                decision_function(model, g), abs=1e-12)

    def test_save_load_save_byte_identical(self, tmp_path):
        ds = gen_rotated_gaussians(2, n_points=10)
        model = fit(ds.groups[:5], KernelConfig(sigma_sq=0.02, level2_gamma=0.1),
                    nu=0.7)
        p1, p2 = tmp_path / "m1.json", tmp_path / "m2.json"
        io.save_model(p1, model)
        io.save_model(p2, io.load_model(p1))
        assert p1.read_bytes() == p2.read_bytes()

    def test_gaussian_training_groups_survive(self, tmp_path):
        groups = [isotropic_gaussian([float(i), 0.0], 0.1 + 0.05 * i) for i in range(4)]
        model = fit(groups, KernelConfig(sigma_sq=0.5), nu=1.0)
        path = tmp_path / "gm.json"
        io.save_model(path, model)
        loaded = io.load_model(path)
        assert all(isinstance(g, GaussianGroup) for g in loaded.train_groups)
        q = isotropic_gaussian([0.5, 0.0], 0.0)
        assert decision_function(loaded, q) == decision_function(model, q)


class TestScoresIo:
    def test_scores_round_trip(self, tmp_path):
        ds = gen_rotated_gaussians(3, n_points=10)
        model = fit(ds.groups, KernelConfig(sigma_sq=0.02), nu=0.2)
        reports = anomaly_scores(model, ds.groups)
        path = tmp_path / "scores.csv"
        ids = io.default_ids(len(ds.groups))
        io.write_scores_csv(path, ids, reports, true_labels=ds.labels)
        got_ids, got_scores, got_labels = io.read_scores_csv(path)
        assert got_ids == [ids[r.index] for r in reports]
        assert np.array_equal(got_scores, [r.score for r in reports])
        assert got_labels == [ds.labels[r.index] for r in reports]


def run_cli(*args) -> int:
    return cli.main([str(a) for a in args])


class TestCliWorkflow:
    def test_synth_deterministic_bytes(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        assert run_cli("synth", "--recipe", "mixture", "--seed", 9, "--out", a) == 0
        assert run_cli("synth", "--recipe", "mixture", "--seed", 9, "--out", b) == 0
        assert a.read_bytes() == b.read_bytes()
        assert len(io.read_groups(a).groups) == 50

    def test_full_pipeline(self, tmp_path, capsys):
        data = tmp_path / "data.json"
        model = tmp_path / "model.json"
        scores = tmp_path / "scores.csv"
        roc = tmp_path / "roc.csv"
        gram = tmp_path / "gram.csv"
        assert run_cli("synth", "--recipe", "rotated", "--seed", 0, "--out", data) == 0
        assert run_cli("train", "--data", data, "--nu", 0.2, "--out", model) == 0
        assert run_cli("score", "--model", model, "--data", data, "--out", scores) == 0
        assert run_cli("eval", "--scores", scores, "--roc-out", roc) == 0
        printed = capsys.readouterr().out
        assert printed.startswith("AP ") and "\nAUC " in printed
        assert run_cli("gram", "--data", data, "--sigma-sq", 0.01, "--out", gram) == 0
        header = scores.read_text().splitlines()[0]
        assert header == "group_id,decision,score,label,true_label"
        score_col = [float(line.split(",")[2]) for line in scores.read_text().splitlines()[1:]]
        assert score_col == sorted(score_col, reverse=True)
        assert roc.read_text().splitlines()[0] == "fpr,tpr"
        gram_lines = gram.read_text().splitlines()
        assert len(gram_lines) == 23  # header + 22 rows

    def test_train_logs_median_heuristic(self, tmp_path, caplog, small_dataset):
        data_path, ds = small_dataset
        model_path = tmp_path / "m.json"
        import logging
        with caplog.at_level(logging.INFO):
            assert run_cli("train", "--data", data_path, "--nu", 0.5,
                           "--out", model_path) == 0
        expected = median_heuristic(list(ds.groups))
        assert any(repr(expected) in rec.getMessage() for rec in caplog.records)
        loaded = io.load_model(model_path)
        assert loaded.config.sigma_sq == expected

    def test_density_command(self, tmp_path):
        data = tmp_path / "circ.json"
        model = tmp_path / "m.json"
        out = tmp_path / "dens.csv"
        assert run_cli("synth", "--recipe", "circle", "--seed", 1,
                       "--points", 30, "--out", data) == 0
        assert run_cli("train", "--data", data, "--nu", 1.0,
                       "--sigma-sq", 0.25, "--out", model) == 0
        assert run_cli("density", "--model", model, "--grid-min", -2,
                       "--grid-max", 2, "--steps", 4, "--out", out) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "x1,x2,density"
        assert len(lines) == 17  # header + 4x4 grid

    def test_train_from_tabular_csv(self, tmp_path):
        rng = np.random.default_rng(0)
        lines = ["group_id,x1,x2"]
        for gid in ("a", "b", "c", "d"):
            center = rng.normal(size=2)
            for _ in range(8):
                x, y = (float(v) for v in center + 0.1 * rng.normal(size=2))
                lines.append(f"{gid},{x!r},{y!r}")
        data = tmp_path / "points.csv"
        data.write_text("\n".join(lines) + "\n")
        model = tmp_path / "m.json"
        scores = tmp_path / "s.csv"
        assert run_cli("train", "--data", data, "--nu", 0.5, "--out", model) == 0
        assert run_cli("score", "--model", model, "--data", data, "--out", scores) == 0
        rows = scores.read_text().splitlines()
        assert len(rows) == 5  # header + 4 groups
        assert rows[0] == "group_id,decision,score,label"  # no labels in CSV input

    def test_gram_with_level2_flag(self, tmp_path, small_dataset):
        data_path, _ = small_dataset
        out = tmp_path / "gram.csv"
        assert run_cli("gram", "--data", data_path, "--sigma-sq", 0.01,
                       "--level2", "--out", out) == 0
        rows = out.read_text().splitlines()[1:]
        diag = [float(row.split(",")[i + 1]) for i, row in enumerate(rows)]
        assert diag == [1.0] * len(rows)

    def test_flower_recipe_writes_gaussian_records(self, tmp_path):
        data = tmp_path / "flower.json"
        assert run_cli("synth", "--recipe", "flower", "--seed", 2,
                       "--points", 16, "--out", data) == 0
        loaded = io.read_groups(data)
        assert len(loaded.groups) == 16
        assert all(isinstance(g, GaussianGroup) for g in loaded.groups)

    def test_module_entry_point(self, tmp_path):
        import os
        import ocsmm
        src_dir = str(os.path.dirname(os.path.dirname(ocsmm.__file__)))
        env = dict(os.environ, PYTHONPATH=src_dir)
        out = tmp_path / "d.json"
        proc = subprocess.run(
            [sys.executable, "-m", "ocsmm", "synth", "--recipe", "rotated",
             "--seed", "5", "--out", str(out)],
            capture_output=True, text=True, env=env,
        )
        assert proc.returncode == 0, proc.stderr
        assert out.exists()


class TestCliErrors:
    def test_usage_error_bad_nu(self, tmp_path, small_dataset):
        data_path, _ = small_dataset
        code = run_cli("train", "--data", data_path, "--nu", 1.5,
                       "--out", tmp_path / "m.json")
        assert code == cli.EXIT_USAGE

    def test_usage_error_unknown_command(self):
        assert run_cli("frobnicate") == cli.EXIT_USAGE

    def test_usage_error_level2_conflict(self, tmp_path, small_dataset):
        data_path, _ = small_dataset
        code = run_cli("train", "--data", data_path, "--nu", 0.5, "--level2",
                       "--level2-gamma", 2.0, "--out", tmp_path / "m.json")
        assert code == cli.EXIT_USAGE

    def test_data_error_missing_file(self, tmp_path):
        code = run_cli("score", "--model", tmp_path / "nope.json",
                       "--data", tmp_path / "nope2.json", "--out", tmp_path / "s.csv")
        assert code == cli.EXIT_DATA

    def test_data_error_names_offending_group(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({
            "format": io.GROUPS_FORMAT, "version": 1,
            "groups": [{"id": "g-broken", "points": "nonsense"}],
        }))
        code = run_cli("train", "--data", bad, "--nu", 0.5, "--out", tmp_path / "m.json")
        assert code == cli.EXIT_DATA
        assert "g-broken" in capsys.readouterr().err

    def test_numerical_error_exit_code(self, tmp_path, small_dataset):
        data_path, _ = small_dataset
        code = run_cli("train", "--data", data_path, "--nu", 0.1,
                       "--max-iter", 1, "--kkt-tol", 1e-14,
                       "--out", tmp_path / "m.json")
        assert code == cli.EXIT_NUMERICAL

    def test_eval_needs_true_labels(self, tmp_path):
        scores = tmp_path / "scores.csv"
        scores.write_text("group_id,decision,score,label\na,0.1,-0.1,normal\n")
        assert run_cli("eval", "--scores", scores) == cli.EXIT_DATA

    def test_truncated_model_file_is_data_error(self, tmp_path):
        model = tmp_path / "m.json"
        model.write_text(json.dumps({"format": io.MODEL_FORMAT, "version": 1,
                                     "config": {"sigma_sq": 1.0}}))
        data = tmp_path / "d.json"
        io.write_groups(data, [EmpiricalGroup([[0.0, 0.0]])])
        code = run_cli("score", "--model", model, "--data", data,
                       "--out", tmp_path / "s.csv")
        assert code == cli.EXIT_DATA

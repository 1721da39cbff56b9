"""Tests for the command-line interface and the experiment runner."""

import json

import numpy as np
import pytest

from cdmd import ExperimentConfig, ParseError, run_experiment
from cdmd.cli import load_matrix, main, save_matrix


@pytest.fixture
def golden_file(tmp_path):
    path = tmp_path / "golden.txt"
    save_matrix(np.array([[1.0, 3.0, 7.0, 15.0], [1.0, 5.0, 17.0, 53.0]]), path)
    return path


class TestMatrixIO:
    def test_roundtrip(self, tmp_path):
        rng = np.random.default_rng(0)
        M = rng.standard_normal((3, 4))
        path = tmp_path / "m.txt"
        save_matrix(M, path)
        assert np.array_equal(load_matrix(path), M)

    def test_golden_fixture(self, golden_file):
        assert np.array_equal(load_matrix(golden_file), [[1, 3, 7, 15], [1, 5, 17, 53]])

    def test_row_count_mismatch(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("2 2\n1 2\n3 4\n5 6\n")
        with pytest.raises(ParseError):
            load_matrix(path)

    def test_column_count_mismatch(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("2 3\n1 2 3\n4 5\n")
        with pytest.raises(ParseError):
            load_matrix(path)

    def test_malformed_header(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("two by two\n1 2\n3 4\n")
        with pytest.raises(ParseError):
            load_matrix(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ParseError):
            load_matrix(tmp_path / "nope.txt")


class TestSubcommands:
    def test_dmd_json(self, golden_file, tmp_path, capsys):
        out = tmp_path / "res.json"
        assert main(["dmd", "--input", str(golden_file), "--out", str(out)]) == 0
        res = json.loads(out.read_text())
        assert res["method"] == "dmd" and res["rank_used"] == 2
        assert "version" in res

    def test_centered_dmd_recovers_golden(self, golden_file, tmp_path):
        out = tmp_path / "res.json"
        assert main(["centered-dmd", "--input", str(golden_file), "--out", str(out)]) == 0
        res = json.loads(out.read_text())
        eigs = sorted(e["re"] for e in res["eigenvalues"])
        assert np.allclose(eigs, [2.0, 3.0], atol=1e-9)
        assert np.allclose(res["bias"], [1.0, 2.0], atol=1e-9)
        assert np.allclose(res["fixed_point"], [-1.0, -1.0], atol=1e-9)

    def test_companion(self, golden_file, tmp_path):
        out = tmp_path / "res.json"
        assert main(["companion", "--input", str(golden_file), "--out", str(out)]) == 0
        res = json.loads(out.read_text())
        assert len(res["coefficients"]) == 3

    def test_freq_sub_unit_lambda(self, golden_file, tmp_path):
        out = tmp_path / "res.json"
        code = main(["freq-sub", "--input", str(golden_file), "--lambda", "1,0", "--out", str(out)])
        assert code == 0
        res = json.loads(out.read_text())
        eigs = sorted(e["re"] for e in res["eigenvalues"])
        assert np.allclose(eigs, [2.0, 3.0], atol=1e-8)

    def test_invalid_rank_exits_one(self, golden_file, capsys):
        assert main(["dmd", "--input", str(golden_file), "--rank", "99"]) == 1

    def test_parse_error_exits_one(self, tmp_path, capsys):
        bad = tmp_path / "bad.txt"
        bad.write_text("2 2\n1 2\n")
        assert main(["dmd", "--input", str(bad)]) == 1

    def test_usage_error_exits_two(self):
        with pytest.raises(SystemExit) as exc:
            main(["bogus"])
        assert exc.value.code == 2


class TestExperiments:
    def test_fast_experiments_pass(self, tmp_path, capsys):
        for name in ("fig2_spectra", "fig4_dft", "fig5_fixed_freq", "fig7_video"):
            code = main(["experiment", name, "--seed", "0", "--out", str(tmp_path / name)])
            assert code == 0, capsys.readouterr().out
            summary = json.loads((tmp_path / name / f"{name}_summary.json").read_text())
            assert summary["experiment"] == name
            assert all(a["passed"] for a in summary["assertions"])
            assert summary["seed"] == 0 and "version" in summary and "config" in summary

    def test_fig3_reduced_realizations(self, tmp_path):
        cfg = ExperimentConfig("fig3_noise", seed=1, overrides={"realizations": 15}, output_dir=tmp_path)
        summary = run_experiment(cfg)
        assert (tmp_path / "fig3_noise.csv").exists()
        slopes = [summary["metrics"]["slope_centered"], summary["metrics"]["slope_uncentered"]]
        assert all(abs(s - 1.0) < 0.2 for s in slopes)

    def test_determinism(self, tmp_path):
        a = run_experiment(ExperimentConfig("fig2_spectra", seed=5, output_dir=tmp_path / "a"))
        b = run_experiment(ExperimentConfig("fig2_spectra", seed=5, output_dir=tmp_path / "b"))
        a["config"]["output_dir"] = b["config"]["output_dir"] = ""
        assert a == b
        assert (tmp_path / "a" / "fig2_a.csv").read_text() == (tmp_path / "b" / "fig2_a.csv").read_text()

    def test_custom_requires_input(self, tmp_path, capsys):
        assert main(["experiment", "custom", "--out", str(tmp_path)]) == 1

    def test_custom_runs(self, golden_file, tmp_path):
        code = main(["experiment", "custom", "--input", str(golden_file), "--out", str(tmp_path)])
        assert code == 0
        summary = json.loads((tmp_path / "custom_summary.json").read_text())
        assert summary["metrics"]["consistency_residual"] > 1e-3

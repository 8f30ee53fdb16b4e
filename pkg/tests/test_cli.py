"""Command line behavior: happy paths, config strictness, exit codes,
manifest hashing, and byte-identical reruns."""

import hashlib
import json
import subprocess
import sys

import pytest

from lpflats.cli import main


def write_model(tmp_path, name="model.json", **params):
    obj = {"scenario": "small-angle-lines", "params": {"angle": 0.5, "alpha0": 0.05}}
    obj["params"].update(params)
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return path


def tree_hashes(root):
    return {
        p.relative_to(root).as_posix(): hashlib.sha256(p.read_bytes()).hexdigest()
        for p in sorted(root.rglob("*"))
        if p.is_file()
    }


class TestSample:
    def test_csv_output_with_manifest(self, tmp_path, capsys):
        cfg = write_model(tmp_path)
        out = tmp_path / "out"
        assert main(["sample", "--config", str(cfg), "--n", "200", "--seed", "3",
                     "--out", str(out)]) == 0
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["command"] == "sample" and manifest["seed"] == 3
        assert "dataset.csv" in manifest["outputs"]
        raw = (out / "dataset.csv").read_bytes()
        assert manifest["outputs"]["dataset.csv"] == hashlib.sha256(raw).hexdigest()

    def test_binary_output(self, tmp_path):
        cfg = write_model(tmp_path)
        out = tmp_path / "out"
        assert main(["sample", "--config", str(cfg), "--n", "50", "--out", str(out),
                     "--format", "binary"]) == 0
        assert (out / "dataset" / "points.npy").exists()

    def test_rerun_is_byte_identical(self, tmp_path):
        cfg = write_model(tmp_path)
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            assert main(["sample", "--config", str(cfg), "--n", "100", "--seed", "9",
                         "--out", str(out)]) == 0
        assert tree_hashes(a) == tree_hashes(b)


class TestFitAndOracle:
    def test_fit_from_model(self, tmp_path):
        cfg = write_model(tmp_path)
        out = tmp_path / "fit"
        assert main(["fit", "--config", str(cfg), "--n", "300", "--p", "1.0",
                     "--seed", "2", "--restarts", "3", "--out", str(out)]) == 0
        obj = json.loads((out / "fit.json").read_text())
        assert obj["recovery_dist"] < 0.05
        assert obj["restarts_used"] == 4

    def test_oracle_from_dataset(self, tmp_path):
        cfg = write_model(tmp_path)
        ds_dir = tmp_path / "ds"
        assert main(["sample", "--config", str(cfg), "--n", "300", "--seed", "2",
                     "--out", str(ds_dir)]) == 0
        out = tmp_path / "oracle"
        assert main(["oracle", "--data", str(ds_dir / "dataset.csv"), "--k", "2",
                     "--p", "1.0", "--out", str(out)]) == 0
        obj = json.loads((out / "oracle.json").read_text())
        assert "recovery_dist" not in obj  # no truth available from raw data
        assert obj["final_resolution"] > 0

    def test_fit_raw_data_needs_shape_flags(self, tmp_path):
        cfg = write_model(tmp_path)
        ds_dir = tmp_path / "ds"
        main(["sample", "--config", str(cfg), "--n", "60", "--out", str(ds_dir)])
        assert main(["fit", "--data", str(ds_dir / "dataset.csv"),
                     "--out", str(tmp_path / "x")]) == 2

    def test_oracle_capability_exit(self, tmp_path):
        cfg = write_model(tmp_path)
        ds_dir = tmp_path / "ds"
        main(["sample", "--config", str(cfg), "--n", "60", "--out", str(ds_dir)])
        assert main(["oracle", "--data", str(ds_dir / "dataset.csv"), "--k", "3",
                     "--out", str(tmp_path / "x")]) == 2


class TestBounds:
    def test_report_written(self, tmp_path, capsys):
        cfg = write_model(tmp_path, angle=1.0471975511965976,
                          alpha0=0.010309278350515464)
        out = tmp_path / "bounds"
        assert main(["bounds", "--config", str(cfg), "--p", "1.0",
                     "--out", str(out)]) == 0
        text = capsys.readouterr().out
        assert "tau0" in text and "EXCEEDS" in text
        obj = json.loads((out / "bounds.json").read_text())
        assert obj["tau0"] == pytest.approx(0.25 / 3.141592653589793, rel=1e-9)
        assert obj["lower_bound_consistent"] is False
        assert obj["exact_recovery"]["holds"] is True
        assert obj["noise"]["available"] is True

    def test_unknown_config_key_is_usage_error(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"scenario": "small-angle-lines", "oops": 1}')
        assert main(["bounds", "--config", str(path)]) == 2

    def test_malformed_json_is_usage_error(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        assert main(["bounds", "--config", str(path)]) == 2

    def test_missing_file_is_usage_error(self, tmp_path):
        assert main(["bounds", "--config", str(tmp_path / "absent.json")]) == 2


class TestSweep:
    def _config(self, tmp_path):
        path = tmp_path / "sweep.json"
        path.write_text(json.dumps({
            "model": {"scenario": "small-angle-lines",
                      "params": {"angle": 0.5, "alpha0": 0.05}},
            "p_values": [1.0],
            "alpha0_values": [0.05, 0.3],
            "n_values": [200],
            "trials": 2,
        }))
        return path

    def test_outputs_and_rerun_identity(self, tmp_path):
        cfg = self._config(tmp_path)
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            assert main(["sweep", "--config", str(cfg), "--seed", "1",
                         "--out", str(out)]) == 0
        assert tree_hashes(a) == tree_hashes(b)
        assert (a / "rows.csv").exists()
        assert (a / "aggregates.json").exists()
        assert (a / "success_eps0_n200.svg").exists()

    def test_workers_flag_identical(self, tmp_path):
        cfg = self._config(tmp_path)
        a, b = tmp_path / "w1", tmp_path / "w2"
        assert main(["sweep", "--config", str(cfg), "--seed", "1", "--out", str(a)]) == 0
        assert main(["sweep", "--config", str(cfg), "--seed", "1", "--out", str(b),
                     "--workers", "2"]) == 0
        assert tree_hashes(a) == tree_hashes(b)

    def test_jsonl_format(self, tmp_path):
        cfg = self._config(tmp_path)
        out = tmp_path / "jl"
        assert main(["sweep", "--config", str(cfg), "--out", str(out),
                     "--format", "jsonl"]) == 0
        lines = (out / "rows.jsonl").read_text().strip().split("\n")
        assert len(lines) == 4 and json.loads(lines[0])["trial"] == 0

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "sweep.json"
        path.write_text(json.dumps({
            "model": {"scenario": "small-angle-lines"},
            "p_values": [1.0], "alpha0_values": [0.1], "typo": True,
        }))
        assert main(["sweep", "--config", str(path), "--out", str(tmp_path / "x")]) == 2

    def test_missing_required_key_rejected(self, tmp_path):
        path = tmp_path / "sweep.json"
        path.write_text(json.dumps({"model": {"scenario": "small-angle-lines"},
                                    "p_values": [1.0]}))
        assert main(["sweep", "--config", str(path), "--out", str(tmp_path / "x")]) == 2


class TestVerify:
    def test_subset_passes(self, tmp_path, capsys):
        out = tmp_path / "v"
        code = main(["verify", "--names",
                     "energy-homogeneity,seed-derivation-stable",
                     "--out", str(out)])
        assert code == 0
        text = capsys.readouterr().out
        assert "PASS energy-homogeneity" in text
        assert "2/2 checks passed" in text
        obj = json.loads((out / "verify.json").read_text())
        assert all(c["passed"] for c in obj["checks"])

    def test_unknown_name_is_usage_error(self):
        assert main(["verify", "--names", "bogus"]) == 2


class TestEntryPoint:
    def test_installed_script(self, tmp_path):
        cfg = write_model(tmp_path)
        out = subprocess.run(
            [sys.executable, "-m", "lpflats.cli", "bounds", "--config", str(cfg)],
            capture_output=True, text=True,
        )
        assert out.returncode == 0
        assert "tau0" in out.stdout

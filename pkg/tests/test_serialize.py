"""Config and dataset round trips are exact, and unknown keys are rejected."""

import json

import numpy as np
import pytest

from lpflats import hlm, serialize
from lpflats.grassmann import line2d


def full_model():
    return hlm.HLMModel(
        truth=(line2d(0.2), line2d(1.4)),
        alphas=(0.125, 0.5, 0.375),
        inlier=hlm.InlierSpec("uniform-sphere", radius=0.7, atom_at_origin=0.1),
        noise=(
            hlm.NoiseSpec("uniform-slab", level=0.02),
            hlm.NoiseSpec("staircase-slab", level=0.05, split=0.6),
        ),
        outlier=hlm.OutlierSpec("shell", inner_radius=0.9),
    )


class TestModelConfig:
    def test_roundtrip_equality(self):
        m = full_model()
        assert serialize.model_from_config(serialize.model_to_config(m)) == m

    def test_scenario_form(self):
        obj = {"scenario": "small-angle-lines", "params": {"angle": 0.3}}
        m = serialize.model_from_config(obj)
        assert m == hlm.scenario("small-angle-lines", {"angle": 0.3})

    def test_unknown_key_rejected(self):
        obj = serialize.model_to_config(full_model())
        obj["extra"] = 1
        with pytest.raises(ValueError):
            serialize.model_from_config(obj)

    def test_nested_unknown_key_rejected(self):
        obj = serialize.model_to_config(full_model())
        obj["inlier"]["color"] = "red"
        with pytest.raises(ValueError):
            serialize.model_from_config(obj)

    def test_config_is_json_clean(self):
        text = json.dumps(serialize.model_to_config(full_model()))
        assert "NaN" not in text
        serialize.model_from_config(json.loads(text))


class TestDatasetIO:
    def _ds(self):
        return hlm.sample(hlm.scenario("fig1-noisy-strips"), 300, 17)

    def test_csv_roundtrip_exact(self, tmp_path):
        ds = self._ds()
        path = tmp_path / "d.csv"
        serialize.save_dataset_csv(ds, path)
        back = serialize.load_dataset_csv(path, seed=ds.seed)
        assert np.array_equal(back.points, ds.points)
        assert np.array_equal(back.labels, ds.labels)

    def test_binary_roundtrip_exact(self, tmp_path):
        ds = self._ds()
        serialize.save_dataset_binary(ds, tmp_path / "bin")
        back = serialize.load_dataset_binary(tmp_path / "bin")
        assert np.array_equal(back.points, ds.points)
        assert np.array_equal(back.labels, ds.labels)
        assert back.seed == ds.seed

    def test_load_dataset_dispatches(self, tmp_path):
        ds = self._ds()
        serialize.save_dataset_csv(ds, tmp_path / "d.csv")
        serialize.save_dataset_binary(ds, tmp_path / "bin")
        a = serialize.load_dataset(tmp_path / "d.csv")
        b = serialize.load_dataset(tmp_path / "bin")
        assert np.array_equal(a.points, b.points)

    def test_binary_write_is_reproducible(self, tmp_path):
        ds = self._ds()
        serialize.save_dataset_binary(ds, tmp_path / "a")
        serialize.save_dataset_binary(ds, tmp_path / "b")
        for name in ("points.npy", "labels.npy", "dataset.json"):
            assert (tmp_path / "a" / name).read_bytes() == (
                tmp_path / "b" / name
            ).read_bytes()


class TestOptResult:
    def test_roundtrip(self):
        from lpflats import optimize as opt

        rng = np.random.default_rng(0)
        pts = rng.standard_normal((60, 2))
        res = opt.multi_restart(pts, 2, 1, 1.0, n_restarts=2, seed=1)
        back = serialize.opt_result_from_dict(serialize.opt_result_to_dict(res))
        assert back.energy == res.energy
        assert back.history == res.history
        assert all(
            np.array_equal(a.basis, b.basis)
            for a, b in zip(back.subspaces, res.subspaces)
        )

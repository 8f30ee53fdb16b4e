"""Trial harness and sweep: reproducibility, table formats, aggregation."""

import json

import numpy as np
import pytest

from lpflats import experiments as ex
from lpflats import hlm


def small_model(alpha0=0.02):
    return hlm.scenario("small-angle-lines", {"angle": 0.5, "alpha0": alpha0})


def tiny_sweep_config(**overrides):
    kwargs = dict(
        model=small_model(),
        p_values=(1.0,),
        alpha0_values=(0.02, 0.3),
        n_values=(250,),
        trials=2,
        base_seed=5,
    )
    kwargs.update(overrides)
    return ex.SweepConfig(**kwargs)


class TestTrials:
    def test_trial_is_deterministic(self):
        m = small_model()
        a = ex.run_recovery_trial(m, 1.0, 400, seed=9)
        b = ex.run_recovery_trial(m, 1.0, 400, seed=9)
        assert a.recovery_dist == b.recovery_dist
        assert a.energy_found == b.energy_found

    def test_model_metadata_recorded(self):
        m = small_model(alpha0=0.1)
        r = ex.run_recovery_trial(m, 1.5, 300, seed=1)
        assert r.p == 1.5 and r.alpha0 == 0.1 and r.n == 300 and r.eps == 0.0

    def test_exact_recovery_trial_enforces_condition(self):
        bad = small_model(alpha0=0.4)
        with pytest.raises(ValueError):
            ex.exact_recovery_trial(bad, 1.0, 300, trial=0, base_seed=0, success_threshold=0.01)

    def test_noisy_trial_validates_level(self):
        m = small_model(alpha0=0.01)
        with pytest.raises(ValueError):
            ex.noisy_recovery_trial(m, 1.0, 300, trial=0, base_seed=0)  # eps = 0

    def test_bias_trial_guards(self):
        m = small_model()
        with pytest.raises(ValueError):
            ex.bias_persistence_trial(m, 1.0, 300, trial=0, base_seed=0)

    def test_with_alpha0_rebalances(self):
        m = ex.with_alpha0(small_model(), 0.4)
        assert m.alphas == (0.4, 0.3, 0.3)

    def test_with_noise_level(self):
        m = ex.with_noise_level(small_model(), 0.03)
        assert m.eps == 0.03
        assert ex.with_noise_level(m, 0.0).eps == 0.0


class TestSweep:
    def test_rows_cover_grid_in_trial_order(self):
        res = ex.phase_transition_sweep(tiny_sweep_config())
        assert len(res.rows) == 4
        assert [r.trial for r in res.rows] == [0, 1, 2, 3]
        assert {r.alpha0 for r in res.rows} == {0.02, 0.3}

    def test_worker_count_does_not_change_output(self):
        cfg = tiny_sweep_config()
        a = ex.phase_transition_sweep(cfg, workers=1)
        b = ex.phase_transition_sweep(cfg, workers=2)
        assert ex.rows_to_csv_text(a.rows) == ex.rows_to_csv_text(b.rows)

    def test_aggregates(self):
        res = ex.phase_transition_sweep(tiny_sweep_config())
        assert len(res.aggregates) == 2
        for agg in res.aggregates:
            cell = [r for r in res.rows if r.alpha0 == agg.alpha0]
            assert agg.trials == 2
            assert agg.success_rate == pytest.approx(np.mean([r.success for r in cell]))
            assert agg.mean_recovery == pytest.approx(
                np.mean([r.recovery_dist for r in cell])
            )


class TestTables:
    def _rows(self):
        return ex.phase_transition_sweep(tiny_sweep_config()).rows

    def test_csv_shape(self):
        text = ex.rows_to_csv_text(self._rows())
        lines = text.strip().split("\n")
        assert lines[0] == ex.CSV_HEADER
        assert len(lines) == 5
        first = lines[1].split(",")
        assert len(first) == len(ex.CSV_HEADER.split(","))
        assert first[-1] == "0"  # wall time suppressed by default

    def test_csv_roundtrips_floats(self):
        rows = self._rows()
        text = ex.rows_to_csv_text(rows)
        cells = text.strip().split("\n")[1].split(",")
        assert float(cells[6]) == rows[0].recovery_dist

    def test_jsonl(self):
        rows = self._rows()
        lines = ex.rows_to_jsonl_text(rows).strip().split("\n")
        objs = [json.loads(s) for s in lines]
        assert len(objs) == 4
        assert objs[0]["recovery_dist"] == rows[0].recovery_dist
        assert objs[0]["wall_ms"] == 0

    def test_heatmap_svg_deterministic(self):
        res = ex.phase_transition_sweep(tiny_sweep_config())
        a = ex.success_heatmap_svg(res, eps=0.0, n=250)
        b = ex.success_heatmap_svg(res, eps=0.0, n=250)
        assert a == b
        assert a.startswith("<svg") and a.rstrip().endswith("</svg>")
        assert a.count("<rect") == 2

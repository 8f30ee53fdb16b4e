"""Experiment harness: recovery trials, parameter sweeps, result tables.

Every trial derives its own seed from (base_seed, trial_index) with a
stable hash, so sweeps are reproducible row for row regardless of worker
count or execution order.
"""

from __future__ import annotations

import dataclasses
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from lpflats.energy import dataset_energy
from lpflats.grassmann import recovery_distance
from lpflats.hlm import (
    HLMModel,
    NoiseSpec,
    exact_recovery_condition,
    noise_recovery_bounds,
    sample,
    scenario,
)
from lpflats.optimize import GridSpec, OptResult, grid_search_global, multi_restart
from lpflats.seeding import derive_seed

DEFAULT_GRID = GridSpec(np.deg2rad(0.5), levels=2)
DEFAULT_SUCCESS_THRESHOLD = 0.02  # radians


@dataclass(frozen=True)
class TrialResult:
    trial: int
    seed: int
    p: float
    alpha0: float
    eps: float
    n: int
    recovery_dist: float
    energy_found: float
    energy_truth: float
    success: bool
    wall_ms: float


def with_alpha0(model: HLMModel, alpha0: float) -> HLMModel:
    """Same model with the outlier fraction set to alpha0 and the remainder
    split evenly across components."""
    k = model.K
    return dataclasses.replace(
        model, alphas=(alpha0,) + ((1.0 - alpha0) / k,) * k
    )


def with_noise_level(
    model: HLMModel, eps: float, kind: str = "uniform-slab"
) -> HLMModel:
    """Same model with every component's noise replaced by the given level."""
    if eps == 0:
        return dataclasses.replace(model, noise=NoiseSpec())
    return dataclasses.replace(model, noise=NoiseSpec(kind, level=eps))


def run_recovery_trial(
    model: HLMModel,
    p: float,
    n: int,
    seed: int,
    trial: int = 0,
    optimizer: str = "grid-oracle",
    grid: GridSpec = DEFAULT_GRID,
    n_restarts: int = 8,
    success_threshold: float = DEFAULT_SUCCESS_THRESHOLD,
) -> TrialResult:
    """Sample once, minimize, and compare against the planted truth."""
    ds = sample(model, n, seed)
    t0 = time.perf_counter()
    if optimizer == "grid-oracle":
        res = grid_search_global(ds.points, model.K, p, grid)
    elif optimizer == "multi-restart":
        res = multi_restart(ds.points, model.K, model.d, p, n_restarts=n_restarts, seed=seed)
    else:
        raise ValueError(f"unknown optimizer {optimizer!r}")
    wall_ms = (time.perf_counter() - t0) * 1000.0
    dist, _ = recovery_distance(res.subspaces, model.truth)
    e_truth = dataset_energy(ds.points, model.truth, p).total
    return TrialResult(
        trial=trial,
        seed=int(seed),
        p=float(p),
        alpha0=float(model.alphas[0]),
        eps=float(model.eps),
        n=int(n),
        recovery_dist=float(dist),
        energy_found=float(res.energy),
        energy_truth=float(e_truth),
        success=bool(dist < success_threshold),
        wall_ms=float(wall_ms),
    )


def exact_recovery_trial(
    model: HLMModel,
    p: float,
    n: int,
    trial: int,
    base_seed: int,
    success_threshold: float,
    grid: GridSpec = DEFAULT_GRID,
    require_condition: bool = True,
) -> TrialResult:
    """One noiseless trial under the verified recovery condition."""
    if require_condition:
        cond = exact_recovery_condition(model, p)
        if not cond.holds:
            raise ValueError(
                f"recovery condition fails: alpha0={cond.lhs} >= rhs={cond.rhs}"
            )
    return run_recovery_trial(
        model,
        p,
        n,
        derive_seed(base_seed, trial),
        trial=trial,
        grid=grid,
        success_threshold=success_threshold,
    )


def noisy_recovery_trial(
    model: HLMModel,
    p: float,
    n: int,
    trial: int,
    base_seed: int,
    grid: GridSpec = DEFAULT_GRID,
) -> TrialResult:
    """One noisy trial; success means recovery within the bound f."""
    bounds = noise_recovery_bounds(model, p)
    if not bounds.available:
        raise ValueError(f"noise bounds unavailable: {bounds.reason}")
    cap = min(bounds.eps_max, bounds.eps_ceiling)
    if not 0 < model.eps < cap:
        raise ValueError(f"noise level {model.eps} outside (0, {cap})")
    return run_recovery_trial(
        model,
        p,
        n,
        derive_seed(base_seed, trial),
        trial=trial,
        grid=grid,
        success_threshold=bounds.f_at_eps,
    )


def bias_persistence_trial(
    model: HLMModel,
    p: float,
    n: int,
    trial: int,
    base_seed: int,
    grid: GridSpec = DEFAULT_GRID,
    success_threshold: float = DEFAULT_SUCCESS_THRESHOLD,
) -> TrialResult:
    """Records the minimizer's distance from truth for p > 1 with outliers,
    where the bias is expected to persist as n grows."""
    if p <= 1:
        raise ValueError("bias persistence trials need p > 1")
    if model.K < 2:
        raise ValueError("needs K > 1")
    return run_recovery_trial(
        model,
        p,
        n,
        derive_seed(base_seed, trial),
        trial=trial,
        grid=grid,
        success_threshold=success_threshold,
    )


def asymmetric_strips_trial(
    p: float,
    n: int,
    trial: int,
    base_seed: int,
    params: Optional[dict] = None,
    grid: GridSpec = GridSpec(np.deg2rad(0.5), levels=3),
) -> TrialResult:
    """Noisy-strips counterexample trial at refinement fine enough to
    resolve the expected bias."""
    model = scenario("fig1-noisy-strips", params)
    return run_recovery_trial(
        model, p, n, derive_seed(base_seed, trial), trial=trial, grid=grid
    )


# ---------------------------------------------------------------------------
# Sweeps


@dataclass(frozen=True)
class SweepConfig:
    model: HLMModel
    p_values: tuple[float, ...]
    alpha0_values: tuple[float, ...]
    eps_values: tuple[float, ...] = (0.0,)
    n_values: tuple[int, ...] = (1000,)
    trials: int = 10
    base_seed: int = 0
    optimizer: str = "grid-oracle"
    grid: GridSpec = DEFAULT_GRID
    n_restarts: int = 8
    noise_kind: str = "uniform-slab"
    success_threshold: float = DEFAULT_SUCCESS_THRESHOLD


@dataclass(frozen=True)
class CellAggregate:
    p: float
    alpha0: float
    eps: float
    n: int
    trials: int
    success_rate: float
    mean_recovery: float
    median_recovery: float


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[TrialResult, ...]
    aggregates: tuple[CellAggregate, ...]


def _sweep_specs(config: SweepConfig) -> list[tuple]:
    specs = []
    trial_index = 0
    for p in config.p_values:
        for a0 in config.alpha0_values:
            for eps in config.eps_values:
                for n in config.n_values:
                    for _ in range(config.trials):
                        specs.append((trial_index, p, a0, eps, n))
                        trial_index += 1
    return specs


def _run_spec(args) -> TrialResult:
    config, (trial_index, p, a0, eps, n) = args
    model = with_noise_level(with_alpha0(config.model, a0), eps, config.noise_kind)
    return run_recovery_trial(
        model,
        p,
        n,
        derive_seed(config.base_seed, trial_index),
        trial=trial_index,
        optimizer=config.optimizer,
        grid=config.grid,
        n_restarts=config.n_restarts,
        success_threshold=config.success_threshold,
    )


def phase_transition_sweep(config: SweepConfig, workers: int = 1) -> SweepResult:
    """Full grid over (p, alpha0, eps, n) with ``trials`` repeats per cell.

    Output is identical for any worker count: each row's seed depends only
    on (base_seed, trial_index) and rows are ordered by trial index.
    """
    specs = _sweep_specs(config)
    args = [(config, s) for s in specs]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_spec, args, chunksize=1))
    else:
        rows = [_run_spec(a) for a in args]
    rows.sort(key=lambda r: r.trial)
    aggregates = []
    for p in config.p_values:
        for a0 in config.alpha0_values:
            for eps in config.eps_values:
                for n in config.n_values:
                    cell = [
                        r
                        for r in rows
                        if (r.p, r.alpha0, r.eps, r.n) == (p, a0, eps, n)
                    ]
                    dists = np.array([r.recovery_dist for r in cell])
                    aggregates.append(
                        CellAggregate(
                            p=p,
                            alpha0=a0,
                            eps=eps,
                            n=n,
                            trials=len(cell),
                            success_rate=float(np.mean([r.success for r in cell])),
                            mean_recovery=float(dists.mean()),
                            median_recovery=float(np.median(dists)),
                        )
                    )
    return SweepResult(rows=tuple(rows), aggregates=tuple(aggregates))


# ---------------------------------------------------------------------------
# Result tables

CSV_HEADER = "trial,seed,p,alpha0,eps,N,recovery_dist,energy_found,energy_truth,success,wall_ms"


def _fmt(v: float) -> str:
    return f"{float(v):.17g}"


def rows_to_csv_text(rows: Sequence[TrialResult], timings: bool = False) -> str:
    """Result table; wall_ms is written as 0 unless ``timings`` is set, so
    identical seeds give byte-identical files."""
    lines = [CSV_HEADER]
    for r in rows:
        wall = int(round(r.wall_ms)) if timings else 0
        lines.append(
            ",".join(
                [
                    str(r.trial),
                    str(r.seed),
                    _fmt(r.p),
                    _fmt(r.alpha0),
                    _fmt(r.eps),
                    str(r.n),
                    _fmt(r.recovery_dist),
                    _fmt(r.energy_found),
                    _fmt(r.energy_truth),
                    str(int(r.success)),
                    str(wall),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def rows_to_jsonl_text(rows: Sequence[TrialResult], timings: bool = False) -> str:
    import json

    out = []
    for r in rows:
        obj = {
            "trial": r.trial,
            "seed": r.seed,
            "p": float(_fmt(r.p)),
            "alpha0": float(_fmt(r.alpha0)),
            "eps": float(_fmt(r.eps)),
            "N": r.n,
            "recovery_dist": float(_fmt(r.recovery_dist)),
            "energy_found": float(_fmt(r.energy_found)),
            "energy_truth": float(_fmt(r.energy_truth)),
            "success": bool(r.success),
            "wall_ms": int(round(r.wall_ms)) if timings else 0,
        }
        out.append(json.dumps(obj, sort_keys=True))
    return "\n".join(out) + "\n"


def aggregates_to_dict(result: SweepResult) -> dict:
    return {
        "cells": [
            {
                "p": float(_fmt(a.p)),
                "alpha0": float(_fmt(a.alpha0)),
                "eps": float(_fmt(a.eps)),
                "n": a.n,
                "trials": a.trials,
                "success_rate": float(_fmt(a.success_rate)),
                "mean_recovery": float(_fmt(a.mean_recovery)),
                "median_recovery": float(_fmt(a.median_recovery)),
            }
            for a in result.aggregates
        ]
    }


def success_heatmap_svg(result: SweepResult, eps: float, n: int) -> str:
    """Minimal deterministic SVG heatmap: rows are p values, columns are
    alpha0 values, cell brightness is the success rate."""
    cells = [a for a in result.aggregates if a.eps == eps and a.n == n]
    ps = sorted({a.p for a in cells})
    a0s = sorted({a.alpha0 for a in cells})
    size = 40
    width = size * (len(a0s) + 2)
    height = size * (len(ps) + 2)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        '<style>text{font-family:monospace;font-size:10px}</style>',
    ]
    for i, p in enumerate(ps):
        parts.append(
            f'<text x="2" y="{size * (i + 1) + size // 2}">p={p:g}</text>'
        )
        for j, a0 in enumerate(a0s):
            cell = next(a for a in cells if a.p == p and a.alpha0 == a0)
            shade = int(round(255 * cell.success_rate))
            color = f"rgb({255 - shade},{shade},80)"
            parts.append(
                f'<rect x="{size * (j + 1)}" y="{size * (i + 1)}" '
                f'width="{size - 2}" height="{size - 2}" fill="{color}">'
                f"<title>p={p:g} alpha0={a0:g} success={cell.success_rate:.2f}</title></rect>"
            )
    for j, a0 in enumerate(a0s):
        parts.append(
            f'<text x="{size * (j + 1)}" y="{size * (len(ps) + 1) + 12}">{a0:g}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"

"""Lossless plain-data forms of models, datasets, and optimizer results.

All floats pass through a 17-significant-digit formatter, which
round-trips IEEE doubles exactly, so serialize/parse cycles reproduce
objects bit for bit.  Unknown keys are hard errors: configs that drift
from the documented schema fail loudly instead of being half-read.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Optional

import numpy as np

from lpflats.grassmann import Subspace, subspace_from_dict, subspace_to_dict
from lpflats.hlm import (
    Dataset,
    HLMModel,
    InlierSpec,
    NoiseSpec,
    OutlierSpec,
    scenario,
)
from lpflats.optimize import OptResult


def _f(v: float) -> float:
    """Round-trip-exact float for JSON output."""
    return float(f"{float(v):.17g}")


def _check_keys(obj: dict, allowed: set[str], context: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise ValueError(f"unknown {context} key(s): {sorted(unknown)}")


def model_to_config(model: HLMModel) -> dict:
    return {
        "truth": [subspace_to_dict(l) for l in model.truth],
        "alphas": [_f(a) for a in model.alphas],
        "inlier": {
            "kind": model.inlier.kind,
            "radius": _f(model.inlier.radius),
            "atom_at_origin": _f(model.inlier.atom_at_origin),
        },
        "noise": [
            {"kind": s.kind, "level": _f(s.level), "split": _f(s.split)}
            for s in model.noise_specs
        ],
        "outlier": {
            "kind": model.outlier.kind,
            "radius": _f(model.outlier.radius),
            "inner_radius": _f(model.outlier.inner_radius),
            "subspace": (
                subspace_to_dict(model.outlier.subspace)
                if model.outlier.subspace is not None
                else None
            ),
        },
    }


def model_from_config(obj: dict) -> HLMModel:
    """Parse a model config; accepts either an explicit model or a
    ``{"scenario": name, "params": {...}}`` reference."""
    if "scenario" in obj:
        _check_keys(obj, {"scenario", "params"}, "scenario config")
        return scenario(obj["scenario"], obj.get("params"))
    _check_keys(obj, {"truth", "alphas", "inlier", "noise", "outlier"}, "model config")
    truth = tuple(subspace_from_dict(o) for o in obj["truth"])
    inl = obj.get("inlier", {})
    _check_keys(inl, {"kind", "radius", "atom_at_origin"}, "inlier")
    inlier = InlierSpec(
        kind=inl.get("kind", "uniform-ball"),
        radius=float(inl.get("radius", 1.0)),
        atom_at_origin=float(inl.get("atom_at_origin", 0.0)),
    )
    noise_obj = obj.get("noise", [{"kind": "none"}])
    if isinstance(noise_obj, dict):
        noise_obj = [noise_obj] * len(truth)
    specs = []
    for s in noise_obj:
        _check_keys(s, {"kind", "level", "split"}, "noise")
        specs.append(
            NoiseSpec(
                kind=s.get("kind", "none"),
                level=float(s.get("level", 0.0)),
                split=float(s.get("split", 0.5)),
            )
        )
    out = obj.get("outlier", {})
    _check_keys(out, {"kind", "radius", "inner_radius", "subspace"}, "outlier")
    outlier = OutlierSpec(
        kind=out.get("kind", "uniform-ball"),
        radius=float(out.get("radius", 1.0)),
        inner_radius=float(out.get("inner_radius", 0.0)),
        subspace=(
            subspace_from_dict(out["subspace"]) if out.get("subspace") else None
        ),
    )
    return HLMModel(
        truth=truth,
        alphas=tuple(float(a) for a in obj["alphas"]),
        inlier=inlier,
        noise=tuple(specs),
        outlier=outlier,
    )


# ---------------------------------------------------------------------------
# Datasets


def save_dataset_csv(ds: Dataset, path: str | Path) -> None:
    """One row per point: coordinates then the integer label."""
    path = Path(path)
    big_d = ds.points.shape[1]
    header = ",".join([f"x{i}" for i in range(big_d)] + ["label"])
    lines = [header]
    for row, lab in zip(ds.points, ds.labels):
        lines.append(",".join(f"{v:.17g}" for v in row) + f",{int(lab)}")
    path.write_text("\n".join(lines) + "\n")


def load_dataset_csv(path: str | Path, seed: int = -1) -> Dataset:
    arr = np.genfromtxt(path, delimiter=",", skip_header=1)
    if arr.ndim == 1:
        arr = arr[None, :]
    return Dataset(points=arr[:, :-1], labels=arr[:, -1].astype(int), seed=seed)


def save_dataset_binary(ds: Dataset, directory: str | Path) -> None:
    """points.npy + labels.npy + dataset.json; .npy files are byte-stable."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    np.save(directory / "points.npy", ds.points)
    np.save(directory / "labels.npy", ds.labels)
    (directory / "dataset.json").write_text(
        json.dumps({"seed": ds.seed, "n": ds.n}, indent=2) + "\n"
    )


def load_dataset_binary(directory: str | Path) -> Dataset:
    directory = Path(directory)
    meta = json.loads((directory / "dataset.json").read_text())
    return Dataset(
        points=np.load(directory / "points.npy"),
        labels=np.load(directory / "labels.npy"),
        seed=int(meta["seed"]),
    )


def load_dataset(path: str | Path) -> Dataset:
    """Load either a CSV file or a binary dataset directory."""
    path = Path(path)
    if path.is_dir():
        return load_dataset_binary(path)
    return load_dataset_csv(path)


# ---------------------------------------------------------------------------
# Optimizer results


def opt_result_to_dict(res: OptResult) -> dict:
    return {
        "subspaces": [subspace_to_dict(l) for l in res.subspaces],
        "energy": _f(res.energy),
        "iterations": res.iterations,
        "converged": res.converged,
        "history": [_f(v) for v in res.history],
        "restarts_used": res.restarts_used,
        "final_resolution": (
            _f(res.final_resolution) if res.final_resolution is not None else None
        ),
    }


def opt_result_from_dict(obj: dict) -> OptResult:
    return OptResult(
        subspaces=tuple(subspace_from_dict(o) for o in obj["subspaces"]),
        energy=float(obj["energy"]),
        iterations=int(obj["iterations"]),
        converged=bool(obj["converged"]),
        history=tuple(float(v) for v in obj["history"]),
        restarts_used=int(obj["restarts_used"]),
        final_resolution=(
            float(obj["final_resolution"])
            if obj.get("final_resolution") is not None
            else None
        ),
    )


def dump_json(obj: dict, path: str | Path) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")

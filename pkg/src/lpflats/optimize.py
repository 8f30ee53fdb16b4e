"""Minimizers of the lp energy: IRLS, alternating K-flats, and an
exhaustive planar grid oracle with local refinement.

The grid oracle is the reference optimizer for experiments in the plane:
its coarse pass is exhaustive at the requested resolution, so the result
is a certified global minimizer up to that resolution, sharpened by local
refinement afterwards.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from numpy.typing import NDArray

from lpflats._kernels import cross_min_sum, pairwise_min_sum
from lpflats.energy import dataset_energy, voronoi_labels, _as_points
from lpflats.grassmann import (
    CapabilityError,
    Subspace,
    dist_grassmann,
    geodesic_from_tangent,
    line2d,
    random_subspace,
    random_tangent,
)
from lpflats.seeding import derive_seed

IRLS_TOL = 1e-9
IRLS_MAX_ITER = 200
KFLATS_TOL = 1e-12


@dataclass(frozen=True)
class OptResult:
    """Outcome of an energy minimization run."""

    subspaces: tuple[Subspace, ...]
    energy: float
    iterations: int
    converged: bool
    history: tuple[float, ...]
    restarts_used: int = 0
    final_resolution: Optional[float] = None


def _span_points(pts: NDArray, d: int) -> Subspace:
    """Best-effort d-dimensional span of the rows of pts (svd based, rank
    tolerant: degenerate rows get padded with arbitrary orthonormal
    directions)."""
    _, _, vt = np.linalg.svd(pts, full_matrices=True)
    return Subspace(vt[:d].T)


def fit_subspace_lp(
    points: NDArray,
    d: int,
    p: float,
    init: Optional[Subspace] = None,
    max_iter: int = IRLS_MAX_ITER,
    tol: float = IRLS_TOL,
) -> Subspace:
    """Single-subspace lp fit.

    p = 2 is the exact principal subspace.  Otherwise iteratively
    reweighted least squares with weights (dist^2 + delta^2)^((p-2)/2),
    delta = 1e-8 times the median point norm; among all iterates (the
    initial one included) the one with the lowest actual lp energy is
    returned, so the result never degrades a provided ``init``.
    """
    x = _as_points(points)
    n, big_d = x.shape
    if not 1 <= d < big_d + 1:
        raise ValueError("need 1 <= d <= ambient dim")
    if n < d:
        raise ValueError(f"need at least d={d} points, got {n}")
    if p <= 0:
        raise ValueError("p must be positive")
    if p == 2:
        return _span_points(x, d)
    med = float(np.median(np.linalg.norm(x, axis=1)))
    delta = 1e-8 * max(med, 1e-12)
    current = init if init is not None else _span_points(x, d)

    def lp_energy(l: Subspace) -> float:
        return float(np.sum(l.distance(x) ** p))

    best, best_energy = current, lp_energy(current)
    for _ in range(max_iter):
        dist = current.distance(x)
        w = (dist**2 + delta**2) ** ((p - 2.0) / 2.0)
        moment = (x * w[:, None]).T @ x
        vals, vecs = np.linalg.eigh(moment)
        nxt = Subspace(vecs[:, ::-1][:, :d])
        e = lp_energy(nxt)
        if e < best_energy:
            best, best_energy = nxt, e
        step = dist_grassmann(nxt, current)
        current = nxt
        if step < tol:
            break
    return best


def lp_kflats(
    x,
    k: int,
    d: int,
    p: float,
    init: Sequence[Subspace],
    max_iter: int = IRLS_MAX_ITER,
    tol: float = KFLATS_TOL,
) -> OptResult:
    """Alternating minimization: Voronoi assignment, then per-cluster fits.

    Clusters that come up empty are re-seeded with the span of the
    currently worst-fit points (disjoint chunks per empty cluster), which
    cannot increase the energy since no point was assigned to them.  The
    recorded energy history is non-increasing.
    """
    pts = _as_points(x)
    if len(init) != k:
        raise ValueError("init must provide k subspaces")
    current = tuple(init)
    history = [dataset_energy(pts, current, p).total]
    converged = False
    iterations = 0
    for _ in range(max_iter):
        iterations += 1
        labels, _ = voronoi_labels(pts, current)
        fitted: list[Subspace] = []
        empty: list[int] = []
        for i in range(1, k + 1):
            cluster = pts[labels == i]
            if cluster.shape[0] == 0:
                empty.append(i - 1)
                fitted.append(current[i - 1])
            elif cluster.shape[0] < d:
                fitted.append(current[i - 1])
            else:
                fitted.append(fit_subspace_lp(cluster, d, p, init=current[i - 1]))
        if empty:
            from lpflats.energy import distances_to_tuple

            resid = distances_to_tuple(pts, tuple(fitted)).min(axis=1)
            order = np.argsort(-resid)
            for slot, idx in enumerate(empty):
                chunk = pts[order[slot * d : (slot + 1) * d]]
                if chunk.shape[0] == d:
                    fitted[idx] = _span_points(chunk, d)
        current = tuple(fitted)
        e = dataset_energy(pts, current, p).total
        prev = history[-1]
        history.append(e)
        if prev - e <= tol * max(abs(prev), 1e-300):
            converged = True
            break
    labels, _ = voronoi_labels(pts, current)
    return OptResult(
        subspaces=current,
        energy=history[-1],
        iterations=iterations,
        converged=converged,
        history=tuple(history),
    )


# ---------------------------------------------------------------------------
# Planar grid oracle


@dataclass(frozen=True)
class GridSpec:
    """Exhaustive angular grid: coarse ``resolution`` (radians) over
    [0, pi), then ``levels`` local refinements, each shrinking the spacing
    by ``factor`` inside a window of ``window`` times the previous spacing."""

    resolution: float
    levels: int = 2
    factor: float = 10.0
    window: float = 1.5

    def __post_init__(self) -> None:
        if not 0 < self.resolution <= np.pi / 8:
            raise ValueError("resolution must be in (0, pi/8]")
        if not 0 <= self.levels <= 4:
            raise ValueError("levels must be between 0 and 4")
        if self.factor <= 1 or self.window <= 0:
            raise ValueError("factor > 1 and window > 0 required")

    @property
    def final_resolution(self) -> float:
        return self.resolution / self.factor**self.levels


def _angle_energies(x: NDArray, thetas: NDArray, p: float) -> NDArray:
    """(m, n) matrix of per-point energies dist(x_j, line(theta_i))^p."""
    normals = np.stack([-np.sin(thetas), np.cos(thetas)], axis=1)
    return np.abs(normals @ x.T) ** p


def grid_search_global(x, k: int, p: float, grid: GridSpec) -> OptResult:
    """Certified-to-resolution global minimizer over lines in the plane.

    Supports points in R^2 and k in {1, 2}; other shapes raise
    CapabilityError.  The coarse pass evaluates every angle (pair) at
    ``grid.resolution``; refinement then zooms near the winner.
    """
    pts = _as_points(x)
    if pts.shape[1] != 2:
        raise CapabilityError("grid search requires points in the plane")
    if k not in (1, 2):
        raise CapabilityError("grid search supports k = 1 or 2")
    if p <= 0:
        raise ValueError("p must be positive")
    res = grid.resolution
    thetas = np.arange(0.0, np.pi, res)
    dp = _angle_energies(pts, thetas, p)
    history: list[float] = []
    if k == 1:
        sums = dp.sum(axis=1)
        i = int(np.argmin(sums))
        best_angles = [float(thetas[i])]
        best_energy = float(sums[i])
    else:
        e = pairwise_min_sum(dp)
        i, j = np.unravel_index(int(np.argmin(e)), e.shape)
        best_angles = [float(thetas[i]), float(thetas[j])]
        best_energy = float(e[i, j])
    history.append(best_energy)
    for _ in range(grid.levels):
        span = grid.window * res
        res = res / grid.factor
        local = [
            a + np.arange(-span, span + res / 2, res) for a in best_angles
        ]
        if k == 1:
            dp1 = _angle_energies(pts, local[0], p)
            sums = dp1.sum(axis=1)
            i = int(np.argmin(sums))
            best_angles = [float(local[0][i])]
            best_energy = float(sums[i])
        else:
            da = _angle_energies(pts, local[0], p)
            db = _angle_energies(pts, local[1], p)
            e = cross_min_sum(da, db)
            i, j = np.unravel_index(int(np.argmin(e)), e.shape)
            best_angles = [float(local[0][i]), float(local[1][j])]
            best_energy = float(e[i, j])
        history.append(best_energy)
    subspaces = tuple(line2d(a % np.pi) for a in best_angles)
    return OptResult(
        subspaces=subspaces,
        energy=best_energy,
        iterations=grid.levels + 1,
        converged=True,
        history=tuple(history),
        final_resolution=res,
    )


# ---------------------------------------------------------------------------
# Restarted local search


def _farthest_point_init(pts: NDArray, k: int, d: int) -> tuple[Subspace, ...]:
    """Deterministic seed tuple: each subspace spans greedily chosen points
    that are far from everything chosen before it."""
    n = pts.shape[0]
    subspaces: list[Subspace] = []
    for _ in range(k):
        if subspaces:
            from lpflats.energy import distances_to_tuple

            score = distances_to_tuple(pts, tuple(subspaces)).min(axis=1)
        else:
            score = np.linalg.norm(pts, axis=1)
        chosen = [pts[int(np.argmax(score))]]
        while len(chosen) < d:
            base = _span_points(np.asarray(chosen), len(chosen))
            resid = base.distance(pts)
            chosen.append(pts[int(np.argmax(resid))])
        subspaces.append(_span_points(np.asarray(chosen), d))
    return tuple(subspaces)


def multi_restart(
    x,
    k: int,
    d: int,
    p: float,
    n_restarts: int = 10,
    seed: int = 0,
    max_iter: int = IRLS_MAX_ITER,
    tol: float = KFLATS_TOL,
) -> OptResult:
    """Best of ``n_restarts`` random initializations plus one deterministic
    farthest-point seeding.  Restart r uses the child seed derived from
    (seed, r), so enlarging n_restarts keeps earlier restarts identical
    and the best energy non-increasing.
    """
    pts = _as_points(x)
    big_d = pts.shape[1]
    best: Optional[OptResult] = None
    inits = [_farthest_point_init(pts, k, d)]
    for r in range(n_restarts):
        rng = np.random.default_rng(derive_seed(seed, r))
        inits.append(tuple(random_subspace(big_d, d, rng) for _ in range(k)))
    for init in inits:
        res = lp_kflats(pts, k, d, p, init, max_iter=max_iter, tol=tol)
        if best is None or res.energy < best.energy:
            best = res
    assert best is not None
    return OptResult(
        subspaces=best.subspaces,
        energy=best.energy,
        iterations=best.iterations,
        converged=best.converged,
        history=best.history,
        restarts_used=n_restarts + 1,
    )


# ---------------------------------------------------------------------------
# Certificates


@dataclass(frozen=True)
class LocalMinCertificate:
    """Randomized probe: energies at arc length ``step`` along random
    product-geodesic directions, compared with the center energy."""

    is_local_min: bool
    worst_gap: float
    energy: float
    n_directions: int
    step: float


def local_min_certificate(
    x,
    subspaces: Sequence[Subspace],
    p: float,
    n_directions: int = 64,
    step: float = 1e-3,
    seed: int = 0,
    slack: float = 1e-12,
) -> LocalMinCertificate:
    """Certify (by sampling) that no probed direction decreases the energy.

    Each probe draws an independent unit tangent per coordinate and moves
    every coordinate by ``step`` along its geodesic.  The certificate
    holds when every probed energy is >= center - slack.
    """
    if n_directions < 1 or step <= 0:
        raise ValueError("need n_directions >= 1 and step > 0")
    pts = _as_points(x)
    rng = np.random.default_rng(seed)
    e0 = dataset_energy(pts, tuple(subspaces), p).total
    worst = np.inf
    for _ in range(n_directions):
        moved = tuple(
            geodesic_from_tangent(l, random_tangent(l, rng), step) for l in subspaces
        )
        gap = dataset_energy(pts, moved, p).total - e0
        worst = min(worst, gap)
    return LocalMinCertificate(
        is_local_min=bool(worst >= -slack),
        worst_gap=float(worst),
        energy=float(e0),
        n_directions=n_directions,
        step=step,
    )


@dataclass(frozen=True)
class RegionFitCheck:
    region: int
    n_points: int
    distance: Optional[float]
    skipped: bool


def restricted_best_fit_check(
    x,
    subspaces: Sequence[Subspace],
    p: float,
    seed: int = 0,
    grid: Optional[GridSpec] = None,
) -> tuple[RegionFitCheck, ...]:
    """Compare each tuple coordinate against the best single subspace for
    its own region.  At a minimizer the two coincide, so the reported
    distances should be on the order of the optimizer's resolution.
    Empty regions are skipped."""
    pts = _as_points(x)
    labels, _ = voronoi_labels(pts, subspaces)
    d = subspaces[0].dim
    out = []
    for i, l in enumerate(subspaces, start=1):
        cluster = pts[labels == i]
        if cluster.shape[0] < max(d, 1):
            out.append(RegionFitCheck(i, cluster.shape[0], None, True))
            continue
        if pts.shape[1] == 2 and d == 1:
            spec = grid or GridSpec(np.deg2rad(0.25), levels=3)
            best = grid_search_global(cluster, 1, p, spec).subspaces[0]
        else:
            best = multi_restart(cluster, 1, d, p, n_restarts=6, seed=derive_seed(seed, i)).subspaces[0]
        out.append(
            RegionFitCheck(i, cluster.shape[0], float(dist_grassmann(best, l)), False)
        )
    return tuple(out)

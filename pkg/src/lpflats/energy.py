"""lp energy of point sets against subspace tuples, and region machinery.

The central quantity is ``sum_x min_i dist(x, L_i)^p``.  The minimizing
index partitions points into regions; several diagnostics here (first
order residuals, directional derivatives, region symmetric differences)
quantify how the energy behaves around a candidate tuple.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from numpy.typing import NDArray
from scipy.stats import beta as beta_dist

from lpflats.grassmann import (
    Subspace,
    dist_grassmann,
    geodesic,
    principal_angles,
)

TIE_TOL = 1e-12
ON_SUBSPACE_REL_TOL = 1e-12


def _as_points(x) -> NDArray:
    pts = x.points if hasattr(x, "points") else x
    pts = np.asarray(pts, dtype=float)
    if pts.ndim == 1:
        pts = pts[None, :]
    return pts


def distances_to_tuple(x, subspaces: Sequence[Subspace]) -> NDArray:
    """(N, K) matrix of point-to-subspace distances."""
    pts = _as_points(x)
    cols = []
    for l in subspaces:
        proj = (pts @ l.basis) @ l.basis.T
        cols.append(np.linalg.norm(pts - proj, axis=1))
    return np.stack(cols, axis=1)


def point_energy(x: NDArray, subspaces: Sequence[Subspace], p: float) -> float:
    """min_i dist(x, L_i)^p for a single point."""
    if p <= 0:
        raise ValueError("p must be positive")
    d = distances_to_tuple(np.asarray(x, dtype=float)[None, :], subspaces)
    return float(d.min() ** p)


@dataclass(frozen=True)
class EnergyValues:
    total: float
    n: int

    @property
    def mean(self) -> float:
        if self.n == 0:
            raise ValueError("mean energy of an empty dataset is undefined")
        return self.total / self.n


def dataset_energy(x, subspaces: Sequence[Subspace], p: float) -> EnergyValues:
    """Summed and per-point lp energy; an empty dataset has total 0 and no mean."""
    if p <= 0:
        raise ValueError("p must be positive")
    pts = _as_points(x)
    if pts.shape[0] == 0:
        return EnergyValues(total=0.0, n=0)
    d = distances_to_tuple(pts, subspaces).min(axis=1)
    return EnergyValues(total=float(np.sum(d**p)), n=pts.shape[0])


def voronoi_labels(
    x, subspaces: Sequence[Subspace], tie_tol: float = TIE_TOL
) -> tuple[NDArray, NDArray]:
    """Nearest-subspace labels in {1..K} plus a tie flag per point.

    Ties (second-nearest within ``tie_tol`` of the minimum) resolve to the
    smallest index.
    """
    d = distances_to_tuple(x, subspaces)
    idx = np.argmin(d, axis=1)
    dmin = d[np.arange(d.shape[0]), idx]
    near = np.abs(d - dmin[:, None]) <= tie_tol
    ties = near.sum(axis=1) > 1
    return idx.astype(np.int64) + 1, ties


def d_matrix(l: Subspace, x: NDArray, p: float) -> NDArray:
    """The matrix P_L(x) P_L_perp(x)^T dist(x, L)^(p-2).

    Undefined for points on the subspace when p < 2 (the power diverges);
    for p >= 2 such points contribute the zero matrix.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError("d_matrix takes a single point")
    return d_matrix_batch(l, x[None, :], p)[0]


def d_matrix_batch(l: Subspace, x: NDArray, p: float) -> NDArray:
    """(N, D, D) stack of d_matrix values; raises if p < 2 hits the subspace."""
    if p <= 0:
        raise ValueError("p must be positive")
    pts = _as_points(x)
    proj = (pts @ l.basis) @ l.basis.T
    resid = pts - proj
    dist = np.linalg.norm(resid, axis=1)
    scale = 1.0 + np.linalg.norm(pts, axis=1)
    on = dist <= ON_SUBSPACE_REL_TOL * scale
    if p < 2 and np.any(on):
        raise ValueError(
            f"d_matrix undefined for {int(on.sum())} point(s) on the subspace when p < 2"
        )
    w = np.zeros_like(dist)
    w[~on] = dist[~on] ** (p - 2.0)
    return np.einsum("ni,nj->nij", proj, resid) * w[:, None, None]


@dataclass(frozen=True)
class FirstOrderResidual:
    """Mean d_matrix over one region; the first-order condition says the
    population version vanishes at a minimizing tuple."""

    matrix: Optional[NDArray]
    fro_norm: Optional[float]
    n_region: int
    n_skipped: int

    @property
    def empty(self) -> bool:
        return self.matrix is None


def first_order_residual(
    x, subspaces: Sequence[Subspace], region: int, p: float
) -> FirstOrderResidual:
    """Mean of d_matrix(L_region, x, p) over points whose region is ``region``.

    ``region`` is 1-based like the Voronoi labels.  For p < 2 points lying
    on the subspace are skipped and counted instead of raising.
    """
    if not 1 <= region <= len(subspaces):
        raise ValueError("region index out of range")
    pts = _as_points(x)
    labels, _ = voronoi_labels(pts, subspaces)
    sel = pts[labels == region]
    n_region = sel.shape[0]
    if n_region == 0:
        return FirstOrderResidual(None, None, 0, 0)
    l = subspaces[region - 1]
    dist = l.distance(sel)
    on = dist <= ON_SUBSPACE_REL_TOL * (1.0 + np.linalg.norm(sel, axis=1))
    skipped = 0
    if p < 2:
        skipped = int(on.sum())
        sel = sel[~on]
    if sel.shape[0] == 0:
        return FirstOrderResidual(None, None, n_region, skipped)
    mats = d_matrix_batch(l, sel, p)
    mean = mats.mean(axis=0)
    return FirstOrderResidual(mean, float(np.linalg.norm(mean)), n_region, skipped)


# ---------------------------------------------------------------------------
# Paths of tuples and directional derivatives


def tuple_geodesic_point(
    a: Sequence[Subspace], b: Sequence[Subspace], t: float
) -> tuple[Subspace, ...]:
    """Coordinate-wise geodesic from tuple ``a`` toward ``b``.

    Parametrized so the fastest coordinate moves at unit speed: at
    parameter t the tuple is at max-metric distance t from ``a``
    (t in [0, dist_tuple(a, b)] reaches ``b``).
    """
    dists = [dist_grassmann(la, lb) for la, lb in zip(a, b)]
    tmax = max(dists)
    if tmax == 0.0:
        return tuple(a)
    return tuple(
        geodesic(la, lb, t * di / tmax) if di > 0 else la
        for la, lb, di in zip(a, b, dists)
    )


def directional_derivative(
    x, a: Sequence[Subspace], b: Sequence[Subspace], p: float, h: float = 1e-4
) -> float:
    """One-sided p-th order difference quotient of the energy from ``a`` toward ``b``.

    Returns (E(path(h)) - E(path(0))) / h^p, the discrete stand-in for the
    t^p-derivative.  Zero when the tuples coincide.
    """
    if h <= 0:
        raise ValueError("h must be positive")
    if max(dist_grassmann(la, lb) for la, lb in zip(a, b)) == 0.0:
        return 0.0
    e0 = dataset_energy(x, tuple(a), p).total
    e1 = dataset_energy(x, tuple_geodesic_point(a, b, h), p).total
    return (e1 - e0) / h**p


# ---------------------------------------------------------------------------
# Region symmetric differences under perturbation


def _theta_dstar(f: Subspace, g: Subspace) -> float:
    """The d*-th largest principal angle, d* = min(d, D - d).

    Positive exactly when the subspaces are in general position (their
    intersection has the minimum possible dimension).
    """
    d = f.dim
    dstar = min(d, f.ambient_dim - d)
    ang = principal_angles(f, g)
    return float(ang[d - dstar])


@dataclass(frozen=True)
class RegionPerturbationHypotheses:
    """Generic-position conditions under which perturbing the second
    subspace provably moves the first region by positive measure."""

    satisfied: bool
    perturbed_generic: bool
    truth_generic: bool
    dominance: bool
    min_perturbed_angle: float
    min_truth_angle: float


def region_perturbation_hypotheses(
    truth: Sequence[Subspace], perturbed_second: Subspace
) -> RegionPerturbationHypotheses:
    """Check the angle conditions for the region-perturbation statement.

    Needs (a) the perturbed copy of the second subspace in general
    position with every truth subspace except the second, (b) the truth
    subspaces pairwise generic, and (c) neither the perturbed copy nor the
    true second subspace farther from the first subspace (in the d*-angle)
    than any other truth subspace.
    """
    k = len(truth)
    if k < 2:
        raise ValueError("needs at least two subspaces")
    pert_angles = [_theta_dstar(perturbed_second, truth[j]) for j in range(k) if j != 1]
    perturbed_generic = min(pert_angles) > 0.0
    truth_angles = [
        _theta_dstar(truth[i], truth[j]) for i in range(k) for j in range(i + 1, k)
    ]
    truth_generic = min(truth_angles) > 0.0
    lhs = max(_theta_dstar(perturbed_second, truth[0]), _theta_dstar(truth[1], truth[0]))
    rhs = min(
        (_theta_dstar(truth[i], truth[0]) for i in range(2, k)), default=np.inf
    )
    dominance = lhs <= rhs
    return RegionPerturbationHypotheses(
        satisfied=perturbed_generic and truth_generic and dominance,
        perturbed_generic=perturbed_generic,
        truth_generic=truth_generic,
        dominance=dominance,
        min_perturbed_angle=float(min(pert_angles)),
        min_truth_angle=float(min(truth_angles)),
    )


@dataclass(frozen=True)
class SymmetricDifferenceEstimate:
    """Monte Carlo measure of a region's symmetric difference between two
    tuples, under the uniform law on the unit ball, with a 99% CI."""

    fraction: float
    ci_low: float
    ci_high: float
    hits: int
    n: int

    @property
    def positive(self) -> bool:
        return self.ci_low > 0.0


def voronoi_symmetric_difference(
    a: Sequence[Subspace],
    b: Sequence[Subspace],
    region: int = 1,
    mc_budget: int = 100_000,
    seed: int = 0,
) -> SymmetricDifferenceEstimate:
    """Estimate the unit-ball measure of region ``region`` differing between
    tuples ``a`` and ``b`` (exact Clopper-Pearson 99% interval)."""
    if mc_budget < 1000:
        raise ValueError("mc_budget below 1000 is too small to report")
    big_d = a[0].ambient_dim
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((mc_budget, big_d))
    g /= np.maximum(np.linalg.norm(g, axis=1, keepdims=True), 1e-300)
    pts = g * (rng.random(mc_budget) ** (1.0 / big_d))[:, None]
    la, _ = voronoi_labels(pts, a)
    lb, _ = voronoi_labels(pts, b)
    diff = (la == region) != (lb == region)
    hits = int(diff.sum())
    n = mc_budget
    lo = 0.0 if hits == 0 else float(beta_dist.ppf(0.005, hits, n - hits + 1))
    hi = 1.0 if hits == n else float(beta_dist.ppf(0.995, hits + 1, n - hits))
    return SymmetricDifferenceEstimate(
        fraction=hits / n, ci_low=lo, ci_high=hi, hits=hits, n=n
    )

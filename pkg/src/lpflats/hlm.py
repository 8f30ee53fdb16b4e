"""Hybrid linear model: K subspaces plus outliers, with bound calculators.

A model is a mixture ``alpha_0 mu_0 + sum_i alpha_i (mu_i x nu_i)`` where
``mu_i`` lives on the i-th subspace, ``nu_i`` is bounded noise in the
orthogonal complement, and ``mu_0`` is the outlier component.  Alongside
sampling, this module computes the recoverability constant ``tau0``, the
exact-recovery condition on the outlier fraction, and the noisy-case
perturbation bounds.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from numpy.typing import NDArray
from scipy.special import betainc

from lpflats.grassmann import (
    Subspace,
    SubspaceTuple,
    dist_grassmann,
    line2d,
)

ALPHA_SUM_TOL = 1e-12
DISTINCT_TOL = 1e-6
PSI_BISECT_TOL = 1e-12

INLIER_KINDS = ("uniform-ball", "uniform-sphere")
NOISE_KINDS = ("none", "uniform-slab", "uniform-orthogonal-ball", "staircase-slab")
OUTLIER_KINDS = ("uniform-ball", "on-subspace", "shell")


@dataclass(frozen=True)
class InlierSpec:
    """Spherically symmetric distribution on a subspace, radius <= 1.

    ``atom_at_origin`` is the probability mass placed exactly at 0;
    the rest is uniform on the ball or sphere of the given radius.
    """

    kind: str = "uniform-ball"
    radius: float = 1.0
    atom_at_origin: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in INLIER_KINDS:
            raise ValueError(f"unknown inlier kind {self.kind!r}")
        if not 0 < self.radius <= 1.0:
            raise ValueError("inlier radius must be in (0, 1]")
        if not 0 <= self.atom_at_origin < 1:
            raise ValueError("atom mass must be in [0, 1)")


@dataclass(frozen=True)
class NoiseSpec:
    """Bounded noise in the orthogonal complement; support radius = level.

    Kinds:
      none                    no displacement
      uniform-slab            uniform on [-level, level] along one fixed
                              complement direction
      uniform-orthogonal-ball uniform on the complement ball of radius level
      staircase-slab          offset sign tied to the position along the
                              subspace (fraction ``split`` of positions on
                              the positive side), magnitude uniform on
                              (0, level]; needs dim-1 subspaces

    Every kind satisfies E ||nu||^p <= level^p for p in (0, 2] because the
    support radius is level.
    """

    kind: str = "none"
    level: float = 0.0
    split: float = 0.5

    def __post_init__(self) -> None:
        if self.kind not in NOISE_KINDS:
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if self.level < 0:
            raise ValueError("noise level must be >= 0")
        if self.kind != "none" and self.level == 0:
            object.__setattr__(self, "kind", "none")
        if not 0 < self.split < 1:
            raise ValueError("split must be in (0, 1)")


@dataclass(frozen=True)
class OutlierSpec:
    """Outlier component distribution in the ambient ball."""

    kind: str = "uniform-ball"
    radius: float = 1.0
    inner_radius: float = 0.0
    subspace: Optional[Subspace] = None

    def __post_init__(self) -> None:
        if self.kind not in OUTLIER_KINDS:
            raise ValueError(f"unknown outlier kind {self.kind!r}")
        if not 0 < self.radius <= 1.0:
            raise ValueError("outlier radius must be in (0, 1]")
        if self.kind == "shell" and not 0 <= self.inner_radius < self.radius:
            raise ValueError("need 0 <= inner_radius < radius for shell outliers")
        if self.kind == "on-subspace" and self.subspace is None:
            raise ValueError("on-subspace outliers need a subspace")


@dataclass(frozen=True)
class HLMModel:
    """Mixture of K subspace components and one outlier component.

    ``alphas`` has K+1 entries ordered (outlier, component 1, ..., K); the
    inlier entries must be strictly positive and the whole vector sums to
    one.  ``noise`` is either one spec shared by all components or a
    K-tuple of per-component specs.
    """

    truth: SubspaceTuple
    alphas: tuple[float, ...]
    inlier: InlierSpec = InlierSpec()
    noise: NoiseSpec | tuple[NoiseSpec, ...] = NoiseSpec()
    outlier: OutlierSpec = OutlierSpec()

    def __post_init__(self) -> None:
        truth = tuple(self.truth)
        object.__setattr__(self, "truth", truth)
        if not truth:
            raise ValueError("need at least one subspace")
        big_d, d = truth[0].ambient_dim, truth[0].dim
        for l in truth:
            if (l.ambient_dim, l.dim) != (big_d, d):
                raise ValueError("all subspaces must share the same (D, d)")
        for i in range(len(truth)):
            for j in range(i + 1, len(truth)):
                if dist_grassmann(truth[i], truth[j]) <= DISTINCT_TOL:
                    raise ValueError(f"subspaces {i} and {j} are not distinct")
        alphas = tuple(float(a) for a in self.alphas)
        object.__setattr__(self, "alphas", alphas)
        if len(alphas) != len(truth) + 1:
            raise ValueError("alphas must have K+1 entries (outlier first)")
        if alphas[0] < 0 or any(a <= 0 for a in alphas[1:]):
            raise ValueError("alpha_0 >= 0 and alpha_i > 0 for components")
        if abs(sum(alphas) - 1.0) > ALPHA_SUM_TOL:
            raise ValueError("alphas must sum to 1")
        noise = self.noise
        if isinstance(noise, NoiseSpec):
            noise_t = (noise,) * len(truth)
        else:
            noise_t = tuple(noise)
            if len(noise_t) != len(truth):
                raise ValueError("per-component noise needs K specs")
        object.__setattr__(self, "noise", noise_t)
        for spec in noise_t:
            if spec.kind == "staircase-slab" and d != 1:
                raise ValueError("staircase-slab noise needs dim-1 subspaces")
        if self.outlier.kind == "on-subspace":
            if self.outlier.subspace.ambient_dim != big_d:
                raise ValueError("outlier subspace has wrong ambient dimension")

    @property
    def K(self) -> int:
        return len(self.truth)

    @property
    def D(self) -> int:
        return self.truth[0].ambient_dim

    @property
    def d(self) -> int:
        return self.truth[0].dim

    @property
    def noise_specs(self) -> tuple[NoiseSpec, ...]:
        if isinstance(self.noise, NoiseSpec):
            return (self.noise,) * self.K
        return self.noise

    @property
    def eps(self) -> float:
        """Noise support radius: max level across components."""
        return max(spec.level for spec in self.noise_specs)

    def noiseless(self) -> "HLMModel":
        return dataclasses.replace(self, noise=NoiseSpec())


@dataclass(frozen=True)
class Dataset:
    """Sampled points with ground-truth component labels (0 = outlier)."""

    points: NDArray[np.floating]
    labels: NDArray[np.integer]
    seed: int

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=float)
        labs = np.asarray(self.labels)
        if pts.ndim != 2 or labs.shape != (pts.shape[0],):
            raise ValueError("points must be (N, D) with one label per row")
        pts = pts.copy()
        pts.flags.writeable = False
        labs = labs.astype(np.int64)
        labs.flags.writeable = False
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "labels", labs)

    @property
    def n(self) -> int:
        return self.points.shape[0]


def _ball_points(k: int, dim: int, radius: float, rng: np.random.Generator) -> NDArray:
    g = rng.standard_normal((k, dim))
    g /= np.maximum(np.linalg.norm(g, axis=1, keepdims=True), 1e-300)
    r = radius * rng.random(k) ** (1.0 / dim)
    return g * r[:, None]


def _sphere_points(k: int, dim: int, radius: float, rng: np.random.Generator) -> NDArray:
    g = rng.standard_normal((k, dim))
    g /= np.maximum(np.linalg.norm(g, axis=1, keepdims=True), 1e-300)
    return radius * g


def _inlier_coords(spec: InlierSpec, d: int, k: int, rng: np.random.Generator) -> NDArray:
    if spec.kind == "uniform-ball":
        coords = _ball_points(k, d, spec.radius, rng)
    else:
        coords = _sphere_points(k, d, spec.radius, rng)
    if spec.atom_at_origin > 0:
        coords[rng.random(k) < spec.atom_at_origin] = 0.0
    return coords


def _noise_offsets(
    spec: NoiseSpec,
    l: Subspace,
    coords: NDArray,
    inlier_radius: float,
    rng: np.random.Generator,
) -> NDArray:
    k = coords.shape[0]
    if spec.kind == "none" or spec.level == 0:
        return np.zeros((k, l.ambient_dim))
    comp = l.orthonormal_complement()
    if comp.shape[1] == 0:
        raise ValueError("noise requires a proper subspace (d < D)")
    if spec.kind == "uniform-slab":
        s = rng.uniform(-spec.level, spec.level, k)
        return s[:, None] * comp[:, 0][None, :]
    if spec.kind == "uniform-orthogonal-ball":
        return _ball_points(k, comp.shape[1], spec.level, rng) @ comp.T
    # staircase-slab: sign from the position along the line
    s0 = (1.0 - 2.0 * spec.split) * inlier_radius
    sign = np.where(coords[:, 0] >= s0, 1.0, -1.0)
    mag = rng.uniform(0.0, spec.level, k)
    return (sign * mag)[:, None] * comp[:, 0][None, :]


def sample(model: HLMModel, n: int, seed: int) -> Dataset:
    """Draw ``n`` points; identical seeds give bit-identical datasets.

    The seed is kept on the returned Dataset so result rows can cite it.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    rng = np.random.default_rng(seed)
    labels = rng.choice(model.K + 1, size=n, p=np.array(model.alphas))
    pts = np.zeros((n, model.D))
    out_mask = labels == 0
    k0 = int(out_mask.sum())
    if k0:
        spec = model.outlier
        if spec.kind == "uniform-ball":
            pts[out_mask] = _ball_points(k0, model.D, spec.radius, rng)
        elif spec.kind == "on-subspace":
            sub = spec.subspace
            pts[out_mask] = _ball_points(k0, sub.dim, spec.radius, rng) @ sub.basis.T
        else:  # shell
            g = rng.standard_normal((k0, model.D))
            g /= np.maximum(np.linalg.norm(g, axis=1, keepdims=True), 1e-300)
            lo, hi = spec.inner_radius**model.D, spec.radius**model.D
            r = (lo + rng.random(k0) * (hi - lo)) ** (1.0 / model.D)
            pts[out_mask] = g * r[:, None]
    for i, (l, nspec) in enumerate(zip(model.truth, model.noise_specs), start=1):
        mask = labels == i
        k = int(mask.sum())
        if k == 0:
            continue
        coords = _inlier_coords(model.inlier, model.d, k, rng)
        offsets = _noise_offsets(nspec, l, coords, model.inlier.radius, rng)
        pts[mask] = coords @ l.basis.T + offsets
    return Dataset(points=pts, labels=labels, seed=int(seed))


# ---------------------------------------------------------------------------
# psi and the recoverability constant tau0


def psi(inlier: InlierSpec, d: int, t: float) -> float:
    """Mass of {x : |<x, v>| < t} under the inlier law, for unit v in the span.

    Spherical symmetry makes the value independent of v.  The continuous
    kinds have Beta-distribution marginals: for the uniform ball
    ``<x,v>^2 / r^2 ~ Beta(1/2, (d+1)/2)`` and for the uniform sphere
    ``Beta(1/2, (d-1)/2)`` (d >= 2).  A dim-1 sphere is the two-point
    distribution, so psi jumps straight from the atom mass to 1 at t = r.
    An atom at the origin is inside {|<x,v>| < t} for every t > 0.
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    atom, r = inlier.atom_at_origin, inlier.radius
    if t <= 0:
        return 0.0
    if t >= r:
        return 1.0
    if inlier.kind == "uniform-ball":
        base = float(betainc(0.5, (d + 1) / 2.0, (t / r) ** 2))
    elif d == 1:
        base = 0.0
    else:
        base = float(betainc(0.5, (d - 1) / 2.0, (t / r) ** 2))
    return atom + (1.0 - atom) * base


def psi_inverse(inlier: InlierSpec, d: int, q: float) -> float:
    """Generalized inverse of psi by monotone bisection on [0, radius].

    Defined for q in (atom mass, 1]; converges to |psi(t) - q| <= 1e-12
    for the continuous marginals and to the jump location otherwise.
    """
    atom, r = inlier.atom_at_origin, inlier.radius
    if not atom < q <= 1.0:
        raise ValueError(f"q must be in ({atom}, 1], got {q}")
    lo, hi = 0.0, r
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        v = psi(inlier, d, mid)
        if abs(v - q) <= PSI_BISECT_TOL:
            return mid
        if v >= q:
            hi = mid
        else:
            lo = mid
        if hi - lo <= 1e-17 * r:
            break
    return hi


def tau0_value(inlier: InlierSpec, d: int, k: int, p: float) -> float:
    """Recoverability constant for a spherically symmetric inlier law.

    tau0 = (1 - a) 2^(p-1) psi^{-1}((1 + (2K-1) a) / (2K))^p / (pi sqrt(d))^p
    with a the atom mass at the origin.  Defined for p in (0, 1].
    """
    if not 0 < p <= 1:
        raise ValueError("tau0 is defined for p in (0, 1]")
    if k < 1:
        raise ValueError("need K >= 1")
    a = inlier.atom_at_origin
    q = (1.0 + (2.0 * k - 1.0) * a) / (2.0 * k)
    t = psi_inverse(inlier, d, q)
    return (1.0 - a) * 2.0 ** (p - 1.0) * t**p / (np.pi * np.sqrt(d)) ** p


def tau0(model: HLMModel, p: float) -> float:
    return tau0_value(model.inlier, model.d, model.K, p)


def tau0_lower_bound_uniform(d: int, k: int, p: float, r1: float = 1.0, r2: float = 1.0) -> float:
    """Closed-form lower estimate of tau0 for uniform-ball inliers of radius
    r1 and outliers supported in B(0, r2).

    Known to exceed the exact tau0 in some regimes (see the bounds report),
    so it is surfaced for comparison and flagged, never asserted against.
    """
    if not 0 < p <= 1:
        raise ValueError("defined for p in (0, 1]")
    return r1**p / (2.0 ** (p + 1.0) * k**p * d ** (1.5 * p) * r2**p)


# ---------------------------------------------------------------------------
# Recovery conditions


@dataclass(frozen=True)
class RecoveryCondition:
    """Exact-recovery check: holds iff lhs (= alpha_0) < rhs."""

    holds: bool
    lhs: float
    rhs: float
    tau0: float
    min_alpha: float
    min_pairwise_dist: float


def _condition_rhs(model: HLMModel, p: float) -> tuple[float, float, float, float]:
    t0 = tau0(model, p)
    min_alpha = min(model.alphas[1:])
    if model.K >= 2:
        dists = [
            dist_grassmann(model.truth[i], model.truth[j])
            for i in range(model.K)
            for j in range(i + 1, model.K)
        ]
        min_dist = min(dists)
        clamp = min(1.0, min_dist**p / 2.0**p)
    else:
        min_dist = float("inf")
        clamp = 1.0
    return t0, min_alpha, min_dist, t0 * min_alpha * clamp


def exact_recovery_condition(model: HLMModel, p: float) -> RecoveryCondition:
    """Whether the outlier fraction is below the recoverability threshold.

    Only meaningful for noiseless models; raises when any component
    carries noise.
    """
    if model.eps > 0:
        raise ValueError("exact recovery condition applies to noiseless models")
    t0, min_alpha, min_dist, rhs = _condition_rhs(model, p)
    return RecoveryCondition(
        holds=bool(model.alphas[0] < rhs),
        lhs=float(model.alphas[0]),
        rhs=float(rhs),
        tau0=float(t0),
        min_alpha=float(min_alpha),
        min_pairwise_dist=float(min_dist),
    )


@dataclass(frozen=True)
class NoiseBounds:
    """Near-recovery bounds for noisy models.

    ``available`` is False when the underlying margin is not positive, in
    which case the dependent fields are None rather than NaN.
    """

    available: bool
    reason: str
    eps_max: Optional[float]
    eps_ceiling: Optional[float]
    f_slope: Optional[float]
    f_at_eps: Optional[float]
    margin: float
    margin_clamped: float
    tau0: float


def noise_recovery_bounds(model: HLMModel, p: float) -> NoiseBounds:
    """Admissible noise radius and the recovery-distance bound f = slope * eps.

    margin_clamped = tau0 min_i alpha_i min(1, min dist^p / 2^p) - alpha_0
    controls eps_max; margin = tau0 min_i alpha_i - alpha_0 controls the
    slope of f and the ceiling pi sqrt(d) margin^{1/p} / (2 * 3^{1/p}).
    """
    t0, min_alpha, _, rhs = _condition_rhs(model, p)
    margin_clamped = rhs - model.alphas[0]
    margin = t0 * min_alpha - model.alphas[0]
    if margin_clamped <= 0 or margin <= 0:
        return NoiseBounds(
            available=False,
            reason="outlier fraction at or above the recovery threshold",
            eps_max=None,
            eps_ceiling=None,
            f_slope=None,
            f_at_eps=None,
            margin=margin,
            margin_clamped=margin_clamped,
            tau0=t0,
        )
    eps_max = 3.0 ** (-1.0 / p) * margin_clamped ** (1.0 / p)
    eps_ceiling = np.pi * np.sqrt(model.d) * 3.0 ** (-1.0 / p) * margin ** (1.0 / p) / 2.0
    f_slope = 3.0 ** (1.0 / p) * margin ** (-1.0 / p)
    return NoiseBounds(
        available=True,
        reason="",
        eps_max=float(eps_max),
        eps_ceiling=float(eps_ceiling),
        f_slope=float(f_slope),
        f_at_eps=float(f_slope * model.eps),
        margin=float(margin),
        margin_clamped=float(margin_clamped),
        tau0=t0,
    )


# ---------------------------------------------------------------------------
# Scenario library


def _check_params(params: dict, allowed: dict) -> dict:
    merged = dict(allowed)
    for key, value in (params or {}).items():
        if key not in allowed:
            raise ValueError(f"unknown scenario parameter {key!r}; allowed: {sorted(allowed)}")
        merged[key] = value
    return merged


def scenario(name: str, params: Optional[dict] = None) -> HLMModel:
    """Named model constructions used by the experiment harness.

    fig1-noisy-strips       two lines in the plane, one with a symmetric
                            noise strip, one with two disjoint offset
                            rectangles arranged asymmetrically along the
                            line (set symmetric=True for the control
                            variant with both strips symmetric)
    small-angle-lines       two clean lines at +-angle with disk outliers
    on-subspace-outliers    outliers concentrated on a third line, with
                            alpha_0 exceeding the inlier fractions
    large-magnitude-outlier small-radius inliers plus far-shell outliers
    """
    if name == "fig1-noisy-strips":
        prm = _check_params(
            params,
            {
                "opening_deg": 60.0,
                "half_width": 0.08,
                "split": 0.7,
                "alpha0": 0.0,
                "symmetric": False,
            },
        )
        w = float(prm["half_width"])
        a0 = float(prm["alpha0"])
        truth = (line2d(0.0), line2d(np.deg2rad(float(prm["opening_deg"]))))
        sym = NoiseSpec("uniform-slab", level=w)
        second = sym if prm["symmetric"] else NoiseSpec(
            "staircase-slab", level=w, split=float(prm["split"])
        )
        return HLMModel(
            truth=truth,
            alphas=(a0, (1 - a0) / 2, (1 - a0) / 2),
            inlier=InlierSpec("uniform-ball", radius=1.0),
            noise=(sym, second),
            outlier=OutlierSpec("uniform-ball"),
        )
    if name == "small-angle-lines":
        prm = _check_params(params, {"angle": 0.05, "alpha0": 1.0 / 3.0})
        a0 = float(prm["alpha0"])
        theta = float(prm["angle"])
        truth = (line2d(theta), line2d(-theta))
        return HLMModel(
            truth=truth,
            alphas=(a0, (1 - a0) / 2, (1 - a0) / 2),
            inlier=InlierSpec("uniform-ball"),
            outlier=OutlierSpec("uniform-ball"),
        )
    if name == "on-subspace-outliers":
        prm = _check_params(
            params,
            {"angles_deg": (0.0, 60.0), "outlier_angle_deg": 150.0, "alpha0": 0.4},
        )
        a0 = float(prm["alpha0"])
        angles = [np.deg2rad(float(a)) for a in prm["angles_deg"]]
        truth = tuple(line2d(a) for a in angles)
        k = len(truth)
        return HLMModel(
            truth=truth,
            alphas=(a0,) + ((1 - a0) / k,) * k,
            inlier=InlierSpec("uniform-ball"),
            outlier=OutlierSpec(
                "on-subspace", subspace=line2d(np.deg2rad(float(prm["outlier_angle_deg"])))
            ),
        )
    if name == "large-magnitude-outlier":
        prm = _check_params(
            params,
            {
                "angles_deg": (0.0, 60.0),
                "inlier_radius": 0.1,
                "shell_inner": 0.9,
                "alpha0": 0.05,
            },
        )
        a0 = float(prm["alpha0"])
        angles = [np.deg2rad(float(a)) for a in prm["angles_deg"]]
        truth = tuple(line2d(a) for a in angles)
        k = len(truth)
        return HLMModel(
            truth=truth,
            alphas=(a0,) + ((1 - a0) / k,) * k,
            inlier=InlierSpec("uniform-ball", radius=float(prm["inlier_radius"])),
            outlier=OutlierSpec("shell", inner_radius=float(prm["shell_inner"])),
        )
    raise ValueError(
        f"unknown scenario {name!r}; known: fig1-noisy-strips, small-angle-lines, "
        "on-subspace-outliers, large-magnitude-outlier"
    )


# ---------------------------------------------------------------------------
# Monte Carlo lower bounds for the stability constants


@dataclass(frozen=True)
class RegionBound:
    region: int
    weight: float
    energy_truth: float
    energy_best: float
    gap: float
    se: float


@dataclass(frozen=True)
class DeltaKappaBounds:
    """Monte Carlo lower bounds for the local stability constants.

    ``bound_general`` applies for every p in (0, 2); ``bound_p_ge_2`` only
    for p >= 2 and is None otherwise.  Standard errors come from the same
    sample; budgets below 1000 are rejected as too noisy to report.
    """

    bound_general: float
    bound_general_se: float
    bound_p_ge_2: Optional[float]
    regions: tuple[RegionBound, ...]
    mc_budget: int


def delta_kappa_lower_bounds(
    model: HLMModel,
    p: float,
    mc_budget: int = 100_000,
    seed: int = 0,
) -> DeltaKappaBounds:
    """Estimate the stability lower bounds by Monte Carlo on the noiseless mixture.

    For each region Y_i of the truth tuple the general bound needs
    E[e(x, L_i) 1{Y_i}] minus the best achievable restricted energy
    min_L E[e(x, L) 1{Y_i}]; the maximum gap over regions divided by 4p is
    the bound.  For p >= 2 the first-order matrix bound is also computed.
    """
    from lpflats import energy as energy_mod
    from lpflats import optimize as optimize_mod

    if mc_budget < 1000:
        raise ValueError("mc_budget below 1000 is too small to report")
    if p <= 0:
        raise ValueError("p must be positive")
    ds = sample(model.noiseless(), mc_budget, seed)
    x = ds.points
    labels, _ = energy_mod.voronoi_labels(x, model.truth)
    m = x.shape[0]
    regions = []
    best_gap = 0.0
    best_se = 0.0
    for i in range(1, model.K + 1):
        mask = labels == i
        weight = float(mask.mean())
        pts = x[mask]
        e_truth_terms = np.zeros(m)
        e_truth_terms[mask] = model.truth[i - 1].distance(pts) ** p
        term_truth = float(e_truth_terms.mean())
        e_best_terms = np.zeros(m)
        if pts.shape[0] >= model.d + 1:
            if model.D == 2 and model.d == 1:
                res = optimize_mod.grid_search_global(
                    pts, 1, p, optimize_mod.GridSpec(np.deg2rad(0.25), levels=2)
                )
                best = res.subspaces[0]
            else:
                res = optimize_mod.multi_restart(
                    pts, 1, model.d, p, n_restarts=8, seed=seed + 7 * i
                )
                best = res.subspaces[0]
            e_best_terms[mask] = best.distance(pts) ** p
            term_best = float(e_best_terms.mean())
        else:
            term_best = 0.0
        gap = term_truth - term_best
        se = float(np.std(e_truth_terms - e_best_terms) / np.sqrt(m))
        regions.append(
            RegionBound(
                region=i,
                weight=weight,
                energy_truth=term_truth,
                energy_best=term_best,
                gap=gap,
                se=se,
            )
        )
        if gap > best_gap:
            best_gap, best_se = gap, se
    bound_general = best_gap / (4.0 * p)
    bound_p2 = None
    if p >= 2:
        l1 = model.truth[0]
        best_norm2 = 0.0
        for i in range(1, model.K + 1):
            mask = labels == i
            if not np.any(mask):
                continue
            mats = energy_mod.d_matrix_batch(l1, x[mask], p)
            mean_mat = mats.sum(axis=0) / m
            norm2 = float(np.linalg.norm(mean_mat, 2) ** 2)
            best_norm2 = max(best_norm2, norm2)
        bound_p2 = best_norm2 / (p * model.d * model.D * 2.0 ** (p + 5.0))
    return DeltaKappaBounds(
        bound_general=float(bound_general),
        bound_general_se=float(best_se / (4.0 * p)),
        bound_p_ge_2=bound_p2,
        regions=tuple(regions),
        mc_budget=mc_budget,
    )

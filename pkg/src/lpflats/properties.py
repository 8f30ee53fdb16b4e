"""Invariant battery: machine-checkable properties of every module.

Each check is a named function returning a PropertyResult; the ``verify``
command runs the whole battery and the test suite asserts the same checks
one by one.  Checks are deterministic given the seed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.stats import kstest

from lpflats import energy as en
from lpflats import hlm
from lpflats import optimize as opt
from lpflats import serialize
from lpflats.grassmann import (
    Subspace,
    dist_grassmann,
    dist_tuple,
    geodesic,
    line2d,
    principal_angles,
    random_subspace,
    recovery_distance,
    subspace_from_dict,
    subspace_to_dict,
)
from lpflats.seeding import derive_seed


@dataclass(frozen=True)
class PropertyResult:
    name: str
    passed: bool
    detail: str


def _result(name: str, passed: bool, detail: str) -> PropertyResult:
    return PropertyResult(name=name, passed=bool(passed), detail=detail)


# ---------------------------------------------------------------------------
# Subspace geometry


def check_metric_axioms(seed: int = 0) -> PropertyResult:
    """Nonnegativity, identity, exact symmetry, triangle inequality on 1000
    random triples with D <= 8, d <= 3."""
    rng = np.random.default_rng(derive_seed(seed, 1))
    worst_tri = -np.inf
    for _ in range(1000):
        big_d = int(rng.integers(2, 9))
        d = int(rng.integers(1, min(big_d, 3) + 1))
        f, g, h = (random_subspace(big_d, d, rng) for _ in range(3))
        dfg, dgf = dist_grassmann(f, g), dist_grassmann(g, f)
        if dfg != dgf:
            return _result("metric-axioms", False, f"symmetry broken: {dfg} != {dgf}")
        if dfg < 0 or dist_grassmann(f, f) != 0.0:
            return _result("metric-axioms", False, "nonnegativity or identity broken")
        tri = dfg - (dist_grassmann(f, h) + dist_grassmann(h, g))
        worst_tri = max(worst_tri, tri)
        if tri > 1e-12:
            return _result("metric-axioms", False, f"triangle violated by {tri:.3e}")
    return _result("metric-axioms", True, f"worst triangle slack {worst_tri:.3e}")


def check_point_distance_lipschitz(seed: int = 0) -> PropertyResult:
    """|dist(x, L1) - dist(x, L2)| <= ||x|| dG(L1, L2) + 1e-9 on 1e4 draws."""
    rng = np.random.default_rng(derive_seed(seed, 2))
    worst = -np.inf
    for _ in range(10_000):
        big_d = int(rng.integers(2, 7))
        d = int(rng.integers(1, big_d))
        l1 = random_subspace(big_d, d, rng)
        l2 = random_subspace(big_d, d, rng)
        x = rng.standard_normal(big_d)
        x /= max(np.linalg.norm(x), 1e-12)
        x *= rng.random()
        gap = abs(l1.distance(x) - l2.distance(x)) - np.linalg.norm(x) * dist_grassmann(l1, l2)
        worst = max(worst, gap)
        if gap > 1e-9:
            return _result("point-distance-lipschitz", False, f"violated by {gap:.3e}")
    return _result("point-distance-lipschitz", True, f"worst slack {worst:.3e}")


def check_geodesic_arc_length(seed: int = 0) -> PropertyResult:
    """dist(geodesic(0), geodesic(t)) == t within 1e-8 on 100 pairs x 10 t,
    and the endpoint reproduces the target subspace."""
    rng = np.random.default_rng(derive_seed(seed, 3))
    worst = 0.0
    for _ in range(100):
        big_d = int(rng.integers(2, 8))
        d = int(rng.integers(1, min(big_d - 1, 3) + 1))
        f = random_subspace(big_d, d, rng)
        g = random_subspace(big_d, d, rng)
        total = dist_grassmann(f, g)
        if np.any(np.abs(principal_angles(f, g) - np.pi / 2) < 1e-6):
            continue
        for t in np.linspace(0.0, total, 10):
            err = abs(dist_grassmann(f, geodesic(f, g, t)) - t)
            worst = max(worst, err)
            if err > 1e-8:
                return _result("geodesic-arc-length", False, f"error {err:.3e} at t={t}")
        end_err = dist_grassmann(geodesic(f, g, total), g)
        worst = max(worst, end_err)
        if end_err > 1e-8:
            return _result("geodesic-arc-length", False, f"endpoint off by {end_err:.3e}")
    return _result("geodesic-arc-length", True, f"worst error {worst:.3e}")


def check_recovery_distance_axioms(seed: int = 0) -> PropertyResult:
    """Permutation invariance, symmetry, and domination by the ordered
    tuple metric."""
    rng = np.random.default_rng(derive_seed(seed, 4))
    for _ in range(200):
        big_d = int(rng.integers(2, 6))
        d = int(rng.integers(1, big_d))
        k = int(rng.integers(1, 5))
        a = tuple(random_subspace(big_d, d, rng) for _ in range(k))
        b = tuple(random_subspace(big_d, d, rng) for _ in range(k))
        perm = rng.permutation(k)
        shuffled = tuple(a[i] for i in perm)
        d_shuf, _ = recovery_distance(a, shuffled)
        if d_shuf != 0.0:
            return _result(
                "recovery-distance-axioms", False, f"shuffle distance {d_shuf}"
            )
        dab, _ = recovery_distance(a, b)
        dba, _ = recovery_distance(b, a)
        if abs(dab - dba) > 1e-15:
            return _result("recovery-distance-axioms", False, "asymmetric")
        if dab > dist_tuple(a, b) + 1e-15:
            return _result("recovery-distance-axioms", False, "exceeds ordered metric")
    return _result("recovery-distance-axioms", True, "200 random tuple pairs")


def check_random_subspace_moments(seed: int = 0) -> PropertyResult:
    """Mean projector of uniform subspaces approximates (d/D) I within 0.01."""
    rng = np.random.default_rng(derive_seed(seed, 5))
    big_d, d, n = 4, 2, 100_000
    g = rng.standard_normal((n, big_d, d))
    q, _ = np.linalg.qr(g)
    mean_proj = np.einsum("nik,njk->ij", q, q) / n
    err = np.abs(mean_proj - (d / big_d) * np.eye(big_d)).max()
    return _result("random-subspace-moments", err <= 0.01, f"max deviation {err:.4f}")


def check_principal_angle_distribution(seed: int = 0) -> PropertyResult:
    """Angle between two uniform lines in the plane is uniform on [0, pi/2]."""
    rng = np.random.default_rng(derive_seed(seed, 6))
    n = 20_000
    u = rng.standard_normal((n, 2))
    v = rng.standard_normal((n, 2))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    ang = np.arccos(np.clip(np.abs(np.sum(u * v, axis=1)), 0, 1))
    stat = kstest(ang, lambda x: np.clip(x / (np.pi / 2), 0, 1))
    return _result(
        "principal-angle-distribution",
        stat.pvalue > 1e-3,
        f"KS p-value {stat.pvalue:.4f}",
    )


def check_subspace_serialization(seed: int = 0) -> PropertyResult:
    rng = np.random.default_rng(derive_seed(seed, 7))
    for _ in range(100):
        big_d = int(rng.integers(1, 7))
        d = int(rng.integers(1, big_d + 1))
        l = random_subspace(big_d, d, rng)
        back = subspace_from_dict(subspace_to_dict(l))
        if not np.array_equal(back.basis, l.basis):
            return _result("subspace-serialization", False, "basis not bit-identical")
    return _result("subspace-serialization", True, "100 exact round trips")


# ---------------------------------------------------------------------------
# Model and bounds


def check_psi_shape_and_inverse(seed: int = 0) -> PropertyResult:
    """psi is a cdf-like function (0 at 0, 1 at the radius, nondecreasing)
    and bisection inverts it to 1e-10 on a 9-point grid."""
    for kind in ("uniform-ball", "uniform-sphere"):
        for d in (1, 2, 3, 5):
            for atom in (0.0, 0.2):
                spec = hlm.InlierSpec(kind, radius=1.0, atom_at_origin=atom)
                ts = np.linspace(0, 1, 201)
                vals = [hlm.psi(spec, d, t) for t in ts]
                if vals[0] != 0.0 or abs(vals[-1] - 1.0) > 0:
                    return _result("psi-shape-and-inverse", False, f"endpoints wrong {kind} d={d}")
                if np.any(np.diff(vals) < -1e-15):
                    return _result("psi-shape-and-inverse", False, f"not monotone {kind} d={d}")
                if kind == "uniform-sphere" and d == 1:
                    for q in (0.3, 0.9, 1.0):
                        if q <= atom:
                            continue
                        if abs(hlm.psi_inverse(spec, d, q) - 1.0) > 1e-9:
                            return _result(
                                "psi-shape-inverse", False, "two-point inverse not at radius"
                            )
                    continue
                for q in np.linspace(0.1, 0.9, 9):
                    if q <= atom:
                        continue
                    t = hlm.psi_inverse(spec, d, q)
                    if abs(hlm.psi(spec, d, t) - q) > 1e-10:
                        return _result(
                            "psi-shape-inverse",
                            False,
                            f"roundtrip off at {kind} d={d} q={q:.2f}",
                        )
    return _result("psi-shape-and-inverse", True, "ball/sphere, d in {1,2,3,5}, with atoms")


def check_tau0_monotone_in_k(seed: int = 0) -> PropertyResult:
    spec = hlm.InlierSpec()
    vals = [hlm.tau0_value(spec, 2, k, 1.0) for k in range(1, 7)]
    ok = all(a > b > 0 for a, b in zip(vals, vals[1:]))
    return _result("tau0-monotone-in-k", ok, f"values {[f'{v:.4f}' for v in vals]}")


def _sample_models() -> list[hlm.HLMModel]:
    models = [
        hlm.scenario("fig1-noisy-strips"),
        hlm.scenario("small-angle-lines"),
        hlm.scenario("on-subspace-outliers"),
        hlm.scenario("large-magnitude-outlier"),
    ]
    rng = np.random.default_rng(123)
    truth = tuple(random_subspace(4, 2, rng) for _ in range(3))
    models.append(
        hlm.HLMModel(
            truth=truth,
            alphas=(0.1, 0.3, 0.3, 0.3),
            inlier=hlm.InlierSpec("uniform-sphere", radius=0.9, atom_at_origin=0.1),
            noise=hlm.NoiseSpec("uniform-orthogonal-ball", level=0.05),
            outlier=hlm.OutlierSpec("shell", inner_radius=0.8),
        )
    )
    return models


def check_sample_support(seed: int = 0) -> PropertyResult:
    """Every sample lies in the slightly inflated unit ball and inliers lie
    within eps of their labelled subspace."""
    for i, model in enumerate(_sample_models()):
        ds = hlm.sample(model, 4000, derive_seed(seed, 8, i))
        eps = model.eps
        norms = np.linalg.norm(ds.points, axis=1)
        if norms.max() > (1.0 + eps) * (1 + 1e-12):
            return _result("sample-support", False, f"norm {norms.max()} too large")
        if ds.labels.min() < 0 or ds.labels.max() > model.K:
            return _result("sample-support", False, "label out of range")
        for j, l in enumerate(model.truth, start=1):
            pts = ds.points[ds.labels == j]
            if pts.shape[0] and l.distance(pts).max() > model.noise_specs[j - 1].level + 1e-12:
                return _result("sample-support", False, f"inlier too far in model {i}")
    return _result("sample-support", True, "5 models x 4000 samples")


def check_sample_determinism(seed: int = 0) -> PropertyResult:
    model = hlm.scenario("fig1-noisy-strips")
    a = hlm.sample(model, 2000, derive_seed(seed, 9))
    b = hlm.sample(model, 2000, derive_seed(seed, 9))
    same = np.array_equal(a.points, b.points) and np.array_equal(a.labels, b.labels)
    return _result("sample-determinism", same, "bit-identical resample")


def check_bounds_no_nan(seed: int = 0) -> PropertyResult:
    """Infeasible margins surface as unavailable flags, never as NaN."""
    model = hlm.scenario("small-angle-lines", {"alpha0": 0.4})
    nb = hlm.noise_recovery_bounds(model, 1.0)
    if nb.available or nb.eps_max is not None or nb.f_slope is not None:
        return _result("bounds-no-nan", False, "infeasible margins not flagged")
    cond = hlm.exact_recovery_condition(model, 1.0)
    if cond.holds or not np.isfinite(cond.rhs):
        return _result("bounds-no-nan", False, "condition check wrong")
    tight = hlm.scenario("small-angle-lines", {"alpha0": 0.001, "angle": 0.5})
    nb2 = hlm.noise_recovery_bounds(tight, 1.0)
    ok = nb2.available and nb2.eps_max > 0 and nb2.eps_ceiling > 0 and nb2.f_slope > 0
    return _result("bounds-no-nan", ok, f"feasible case eps_max={nb2.eps_max}")


def check_staircase_asymmetry(seed: int = 0) -> PropertyResult:
    """The asymmetric strips scenario has a nonzero mean signed offset from
    its second line (detectable at 1e5 samples)."""
    model = hlm.scenario("fig1-noisy-strips")
    ds = hlm.sample(model, 100_000, derive_seed(seed, 10))
    l2 = model.truth[1]
    normal = l2.orthonormal_complement()[:, 0]
    off = ds.points[ds.labels == 2] @ normal
    se = off.std() / np.sqrt(off.size)
    m = off.mean()
    sym = hlm.scenario("fig1-noisy-strips", {"symmetric": True})
    ds2 = hlm.sample(sym, 100_000, derive_seed(seed, 10))
    off2 = ds2.points[ds2.labels == 2] @ normal
    ok = abs(m) > 5 * se and abs(off2.mean()) < 5 * off2.std() / np.sqrt(off2.size)
    return _result(
        "staircase-asymmetry", ok, f"mean offset {m:.5f} (se {se:.5f}), control {off2.mean():.5f}"
    )


# ---------------------------------------------------------------------------
# Energy


def check_energy_homogeneity(seed: int = 0) -> PropertyResult:
    rng = np.random.default_rng(derive_seed(seed, 11))
    x = rng.standard_normal((300, 3))
    tup = tuple(random_subspace(3, 1, rng) for _ in range(2))
    c = 2.5
    for p in (0.5, 1.0, 1.7, 2.0, 3.0):
        e1 = en.dataset_energy(c * x, tup, p).total
        e2 = c**p * en.dataset_energy(x, tup, p).total
        if abs(e1 - e2) > 1e-12 * max(abs(e1), abs(e2)):
            return _result("energy-homogeneity", False, f"p={p}: {e1} vs {e2}")
    return _result("energy-homogeneity", True, "scaling exact to 1e-12 relative")


def check_voronoi_consistency(seed: int = 0) -> PropertyResult:
    rng = np.random.default_rng(derive_seed(seed, 12))
    x = rng.standard_normal((500, 2))
    tup = (line2d(0.0), line2d(np.pi / 3))
    labels, ties = en.voronoi_labels(x, tup)
    d = en.distances_to_tuple(x, tup)
    if not np.array_equal(labels - 1, np.argmin(d, axis=1)):
        return _result("voronoi-consistency", False, "labels differ from argmin")
    # Exact tie on the bisector resolves to the smaller index and is flagged.
    bisector = np.array([[np.cos(np.pi / 6), np.sin(np.pi / 6)]])
    lab_tie, tie_flag = en.voronoi_labels(bisector, tup)
    if lab_tie[0] != 1 or not tie_flag[0]:
        return _result("voronoi-consistency", False, "tie handling wrong")
    pt = np.array([[np.cos(np.pi / 3), np.sin(np.pi / 3)]])
    lab_on, _ = en.voronoi_labels(pt, tup)
    if lab_on[0] != 2:
        return _result("voronoi-consistency", False, "point on second line mislabeled")
    return _result("voronoi-consistency", True, "argmin, ties, and membership agree")


def check_d_matrix_structure(seed: int = 0) -> PropertyResult:
    """Rows of D live in the subspace and columns in its complement:
    P_perp D = 0 and D P = 0."""
    rng = np.random.default_rng(derive_seed(seed, 13))
    worst = 0.0
    for _ in range(200):
        big_d = int(rng.integers(2, 6))
        d = int(rng.integers(1, big_d))
        l = random_subspace(big_d, d, rng)
        x = rng.standard_normal(big_d)
        for p in (0.5, 1.0, 2.0, 3.0):
            m = en.d_matrix(l, x, p)
            proj = l.basis @ l.basis.T
            scale = max(1.0, np.abs(m).max())
            left = np.abs((np.eye(big_d) - proj) @ m).max() / scale
            right = np.abs(m @ proj).max() / scale
            worst = max(worst, left, right)
            if left > 1e-12 or right > 1e-12:
                return _result("d-matrix-structure", False, f"residual {max(left, right):.2e}")
    return _result("d-matrix-structure", True, f"worst residual {worst:.2e}")


def check_gradient_consistency_p2(seed: int = 0) -> PropertyResult:
    """For p=2, K=1, the energy derivative along a plane rotation matches
    -2 N u^T mean(D) w; one-sided quotients at h=1e-4, 1e-5 converge at
    first order and their Richardson extrapolation agrees to 1e-5."""
    rng = np.random.default_rng(derive_seed(seed, 14))
    big_d, d, n = 4, 2, 400
    x = rng.standard_normal((n, big_d))
    l = random_subspace(big_d, d, rng)
    u = l.basis[:, 0]
    w = l.orthonormal_complement()[:, 0]

    def rotate(t: float) -> Subspace:
        r = (
            np.eye(big_d)
            + np.sin(t) * (np.outer(w, u) - np.outer(u, w))
            + (np.cos(t) - 1.0) * (np.outer(u, u) + np.outer(w, w))
        )
        return Subspace.from_matrix(r @ l.basis)

    def e(t: float) -> float:
        return en.dataset_energy(x, (rotate(t),), 2.0).total

    analytic = -2.0 * n * float(u @ en.d_matrix_batch(l, x, 2.0).mean(axis=0) @ w)
    h1, h2 = 1e-4, 1e-5
    q1 = (e(h1) - e(0.0)) / h1
    q2 = (e(h2) - e(0.0)) / h2
    richardson = (h1 * q2 - h2 * q1) / (h1 - h2)
    scale = max(1.0, abs(analytic))
    err_r = abs(richardson - analytic) / scale
    ratio = abs(q1 - analytic) / max(abs(q2 - analytic), 1e-300)
    ok = err_r <= 1e-5 and 3.0 <= ratio <= 30.0
    return _result(
        "gradient-consistency-p2",
        ok,
        f"richardson err {err_r:.2e}, first-order ratio {ratio:.1f}",
    )


def check_derivative_point_bound(seed: int = 0) -> PropertyResult:
    """One-sided difference quotients of a single point's distance along
    any tuple path are bounded by the point norm."""
    rng = np.random.default_rng(derive_seed(seed, 15))
    worst = -np.inf
    for _ in range(200):
        big_d = int(rng.integers(2, 5))
        d = int(rng.integers(1, big_d))
        a = (random_subspace(big_d, d, rng),)
        b = (random_subspace(big_d, d, rng),)
        x = rng.standard_normal((1, big_d))
        q = en.directional_derivative(x, a, b, 1.0, h=1e-4)
        slack = abs(q) - np.linalg.norm(x)
        worst = max(worst, slack)
        if slack > 1e-9:
            return _result("derivative-point-bound", False, f"violated by {slack:.2e}")
    return _result("derivative-point-bound", True, f"worst slack {worst:.2e}")


def check_first_order_symmetric(seed: int = 0) -> PropertyResult:
    """Mirror-symmetric data about a line has vanishing first-order residual."""
    rng = np.random.default_rng(derive_seed(seed, 16))
    a = rng.random(100) * 2 - 1
    b = rng.random(100) * 0.3 + 0.1
    pts = np.concatenate(
        [np.stack([a, b], axis=1), np.stack([a, -b], axis=1)], axis=0
    )
    res = en.first_order_residual(pts, (line2d(0.0),), 1, p=2.0)
    ok = res.fro_norm is not None and res.fro_norm < 1e-12
    return _result("first-order-symmetric", ok, f"fro norm {res.fro_norm}")


# ---------------------------------------------------------------------------
# Optimizers


def check_irls_p2_exact(seed: int = 0) -> PropertyResult:
    rng = np.random.default_rng(derive_seed(seed, 17))
    x = rng.standard_normal((300, 5))
    l = opt.fit_subspace_lp(x, 2, 2.0)
    _, _, vt = np.linalg.svd(x, full_matrices=False)
    ref = Subspace(vt[:2].T)
    d = dist_grassmann(l, ref)
    return _result("irls-p2-exact", d < 1e-9, f"distance to principal plane {d:.2e}")


def check_kflats_monotone(seed: int = 0) -> PropertyResult:
    """Alternating descent histories never increase (30 random instances)."""
    rng = np.random.default_rng(derive_seed(seed, 18))
    worst = 0.0
    for i in range(30):
        big_d = int(rng.integers(2, 5))
        d = int(rng.integers(1, big_d))
        k = int(rng.integers(1, 4))
        n = int(rng.integers(40, 120))
        x = rng.standard_normal((n, big_d))
        p = float(rng.choice([0.5, 1.0, 1.5, 2.0]))
        init = tuple(random_subspace(big_d, d, rng) for _ in range(k))
        res = opt.lp_kflats(x, k, d, p, init)
        diffs = np.diff(res.history)
        worst = max(worst, diffs.max() if diffs.size else 0.0)
        if diffs.size and diffs.max() > 1e-9 * max(1.0, res.history[0]):
            return _result("kflats-monotone", False, f"increase {diffs.max():.2e} (instance {i})")
    return _result("kflats-monotone", True, f"worst increase {worst:.2e}")


def check_multi_restart_nested(seed: int = 0) -> PropertyResult:
    rng = np.random.default_rng(derive_seed(seed, 19))
    x = rng.standard_normal((150, 3))
    energies = [
        opt.multi_restart(x, 2, 1, 1.0, n_restarts=r, seed=7).energy for r in (0, 2, 5)
    ]
    ok = energies[0] >= energies[1] - 1e-12 and energies[1] >= energies[2] - 1e-12
    return _result("multi-restart-nested", ok, f"energies {energies}")


def check_oracle_certificate(seed: int = 0) -> PropertyResult:
    """The p=1 oracle energy is within the Lipschitz slack of the truth
    energy: E(found) <= E(truth) + sum ||x|| * final_resolution."""
    model = hlm.scenario("small-angle-lines", {"angle": 0.4, "alpha0": 0.05})
    ds = hlm.sample(model, 1500, derive_seed(seed, 20))
    res = opt.grid_search_global(ds.points, 2, 1.0, opt.GridSpec(np.deg2rad(0.5), 2))
    e_truth = en.dataset_energy(ds.points, model.truth, 1.0).total
    slack = np.linalg.norm(ds.points, axis=1).sum() * res.final_resolution
    ok = res.energy <= e_truth + slack
    return _result(
        "oracle-certificate", ok, f"E_found={res.energy:.4f} E_truth={e_truth:.4f}"
    )


def check_truth_local_min_clean(seed: int = 0) -> PropertyResult:
    """With clean inliers only, the planted tuple certifies as a local
    minimum of the p=1 energy."""
    model = hlm.scenario("small-angle-lines", {"angle": 0.5, "alpha0": 0.01})
    ds = hlm.sample(model, 800, derive_seed(seed, 21))
    cert = opt.local_min_certificate(
        ds.points, model.truth, 1.0, n_directions=32, step=1e-3, seed=derive_seed(seed, 22)
    )
    return _result(
        "truth-local-min-clean", cert.is_local_min, f"worst gap {cert.worst_gap:.3e}"
    )


# ---------------------------------------------------------------------------
# Serialization and determinism


def check_model_config_roundtrip(seed: int = 0) -> PropertyResult:
    for i, model in enumerate(_sample_models()):
        back = serialize.model_from_config(serialize.model_to_config(model))
        if back != model:
            return _result("model-config-roundtrip", False, f"model {i} differs")
    return _result("model-config-roundtrip", True, "5 models equal after round trip")


def check_dataset_io_roundtrip(seed: int = 0) -> PropertyResult:
    import tempfile

    model = hlm.scenario("on-subspace-outliers")
    ds = hlm.sample(model, 500, derive_seed(seed, 23))
    with tempfile.TemporaryDirectory() as tmp:
        csv_path = f"{tmp}/data.csv"
        serialize.save_dataset_csv(ds, csv_path)
        back = serialize.load_dataset_csv(csv_path, seed=ds.seed)
        if not np.array_equal(back.points, ds.points) or not np.array_equal(
            back.labels, ds.labels
        ):
            return _result("dataset-io-roundtrip", False, "csv round trip differs")
        serialize.save_dataset_binary(ds, f"{tmp}/bin")
        back2 = serialize.load_dataset_binary(f"{tmp}/bin")
        if not np.array_equal(back2.points, ds.points) or back2.seed != ds.seed:
            return _result("dataset-io-roundtrip", False, "binary round trip differs")
    return _result("dataset-io-roundtrip", True, "csv and binary forms exact")


def check_seed_derivation_stable(seed: int = 0) -> PropertyResult:
    """Frozen reference values guard against platform- or version-dependent
    seed derivation."""
    ok = (
        derive_seed(0, 0) == 7689419447139100721
        and derive_seed(7, 3) == 6148384659390418248
        and derive_seed(0, 0) != derive_seed(0, 1)
        and 0 <= derive_seed(123, 456) < 2**63
    )
    return _result("seed-derivation-stable", ok, "blake2b child seeds")


def check_sweep_determinism(seed: int = 0) -> PropertyResult:
    from lpflats import experiments as ex

    model = hlm.scenario("small-angle-lines", {"angle": 0.4, "alpha0": 0.02})
    config = ex.SweepConfig(
        model=model,
        p_values=(1.0,),
        alpha0_values=(0.02, 0.2),
        n_values=(300,),
        trials=2,
        base_seed=derive_seed(seed, 24),
    )
    a = ex.rows_to_csv_text(ex.phase_transition_sweep(config).rows)
    b = ex.rows_to_csv_text(ex.phase_transition_sweep(config).rows)
    return _result("sweep-determinism", a == b, "rerun produces identical csv text")


PROPERTY_CHECKS: dict[str, Callable[[int], PropertyResult]] = {
    fn.__name__.removeprefix("check_").replace("_", "-"): fn
    for fn in (
        check_metric_axioms,
        check_point_distance_lipschitz,
        check_geodesic_arc_length,
        check_recovery_distance_axioms,
        check_random_subspace_moments,
        check_principal_angle_distribution,
        check_subspace_serialization,
        check_psi_shape_and_inverse,
        check_tau0_monotone_in_k,
        check_sample_support,
        check_sample_determinism,
        check_bounds_no_nan,
        check_staircase_asymmetry,
        check_energy_homogeneity,
        check_voronoi_consistency,
        check_d_matrix_structure,
        check_gradient_consistency_p2,
        check_derivative_point_bound,
        check_first_order_symmetric,
        check_irls_p2_exact,
        check_kflats_monotone,
        check_multi_restart_nested,
        check_oracle_certificate,
        check_truth_local_min_clean,
        check_model_config_roundtrip,
        check_dataset_io_roundtrip,
        check_seed_derivation_stable,
        check_sweep_determinism,
    )
}


def run_property_suite(seed: int = 0, names: Optional[list[str]] = None) -> list[PropertyResult]:
    selected = names or list(PROPERTY_CHECKS)
    unknown = [n for n in selected if n not in PROPERTY_CHECKS]
    if unknown:
        raise ValueError(f"unknown property check(s): {unknown}")
    return [PROPERTY_CHECKS[n](seed) for n in selected]

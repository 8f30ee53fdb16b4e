"""Energy, Voronoi regions, first-order matrices, and perturbation
measures."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lpflats import energy as en
from lpflats.grassmann import Subspace, geodesic, line2d, random_subspace
from lpflats.hlm import HLMModel, sample, scenario


def basis(*cols):
    return Subspace(np.array(cols, dtype=float).T)


class TestEnergy:
    def test_single_point_hand_case(self):
        tup = (line2d(0.0), line2d(np.pi / 2))
        x = np.array([1.0, 0.5])
        # nearest is the x axis at distance 0.5
        assert en.point_energy(x, tup, 1.0) == pytest.approx(0.5, abs=1e-15)
        assert en.point_energy(x, tup, 0.5) == pytest.approx(np.sqrt(0.5), abs=1e-15)

    def test_matches_brute_force(self):
        rng = np.random.default_rng(2)
        pts = rng.standard_normal((200, 3))
        tup = tuple(random_subspace(3, 1, rng) for _ in range(3))
        for p in (0.5, 1.0, 2.0):
            brute = sum(
                min(l.distance(x) for l in tup) ** p for x in pts
            )
            assert en.dataset_energy(pts, tup, p).total == pytest.approx(brute, rel=1e-12)

    def test_mean_requires_points(self):
        vals = en.dataset_energy(np.empty((0, 2)), (line2d(0.1),), 1.0)
        assert vals.total == 0.0
        with pytest.raises(ValueError):
            vals.mean

    def test_invalid_p(self):
        with pytest.raises(ValueError):
            en.dataset_energy(np.ones((1, 2)), (line2d(0.0),), 0.0)

    @given(
        st.floats(0.25, 3.0),
        st.floats(0.1, 4.0),
    )
    @settings(max_examples=100, deadline=None)
    def test_homogeneity(self, p, c):
        rng = np.random.default_rng(11)
        pts = rng.standard_normal((40, 2))
        tup = (line2d(0.3), line2d(1.4))
        e_scaled = en.dataset_energy(c * pts, tup, p).total
        assert e_scaled == pytest.approx(c**p * en.dataset_energy(pts, tup, p).total, rel=1e-10)


class TestVoronoi:
    def test_labels_match_argmin(self):
        rng = np.random.default_rng(3)
        pts = rng.standard_normal((300, 2))
        tup = (line2d(0.0), line2d(1.1), line2d(2.0))
        labels, ties = en.voronoi_labels(pts, tup)
        dists = en.distances_to_tuple(pts, tup)
        assert np.array_equal(labels, np.argmin(dists, axis=1) + 1)
        assert labels.min() >= 1 and labels.max() <= 3

    def test_tie_flag_on_bisector(self):
        tup = (line2d(0.0), line2d(np.pi / 3))
        on_bisector = np.array([[np.cos(np.pi / 6), np.sin(np.pi / 6)]])
        labels, ties = en.voronoi_labels(on_bisector, tup)
        assert labels[0] == 1 and bool(ties[0])

    def test_origin_ties_everywhere(self):
        tup = (line2d(0.2), line2d(1.0))
        labels, ties = en.voronoi_labels(np.zeros((1, 2)), tup)
        assert labels[0] == 1 and bool(ties[0])


class TestDMatrix:
    def test_hand_values(self):
        l = line2d(0.0)
        x = np.array([3.0, 4.0])
        # projection (3,0), residual (0,4), distance 4
        assert np.allclose(en.d_matrix(l, x, 2.0), [[0.0, 12.0], [0.0, 0.0]])
        assert np.allclose(en.d_matrix(l, x, 1.0), [[0.0, 3.0], [0.0, 0.0]])
        assert np.allclose(en.d_matrix(l, x, 3.0), [[0.0, 48.0], [0.0, 0.0]])

    def test_on_subspace_point(self):
        l = line2d(0.0)
        x = np.array([2.0, 0.0])
        assert np.allclose(en.d_matrix(l, x, 2.0), 0.0)
        assert np.allclose(en.d_matrix(l, x, 3.0), 0.0)
        with pytest.raises(ValueError):
            en.d_matrix(l, x, 1.0)

    def test_batch_matches_single(self):
        rng = np.random.default_rng(4)
        l = random_subspace(4, 2, rng)
        pts = rng.standard_normal((30, 4))
        batch = en.d_matrix_batch(l, pts, 1.5)
        for i in range(30):
            assert np.allclose(batch[i], en.d_matrix(l, pts[i], 1.5), atol=1e-14)


class TestFirstOrderResidual:
    def test_symmetric_data_vanishes(self):
        a = np.linspace(-1, 1, 60)
        pts = np.concatenate(
            [np.stack([a, np.full_like(a, 0.2)], 1), np.stack([a, np.full_like(a, -0.2)], 1)]
        )
        res = en.first_order_residual(pts, (line2d(0.0),), 1, p=2.0)
        assert res.fro_norm == pytest.approx(0.0, abs=1e-14)
        assert res.n_region == 120

    def test_empty_region(self):
        pts = np.array([[1.0, 0.01]])
        res = en.first_order_residual(pts, (line2d(0.0), line2d(np.pi / 2)), 2, p=2.0)
        assert res.fro_norm is None and res.n_region == 0 and res.empty

    def test_one_sided_data_does_not_vanish(self):
        pts = np.stack([np.linspace(0.1, 1, 50), np.full(50, 0.2)], 1)
        res = en.first_order_residual(pts, (line2d(0.0),), 1, p=2.0)
        assert res.fro_norm > 1e-3


class TestDirectionalDerivative:
    def test_quotient_definition(self):
        rng = np.random.default_rng(5)
        pts = rng.standard_normal((20, 2))
        a = (line2d(0.1),)
        b = (line2d(0.9),)
        h, p = 1e-4, 1.0
        mid = (geodesic(a[0], b[0], h),)
        expect = (
            en.dataset_energy(pts, mid, p).total - en.dataset_energy(pts, a, p).total
        ) / h**p
        assert en.directional_derivative(pts, a, b, p, h=h) == pytest.approx(expect, rel=1e-12)

    def test_single_point_bounded_by_norm(self):
        rng = np.random.default_rng(6)
        for _ in range(50):
            x = rng.standard_normal((1, 3)) * rng.random()
            a = (random_subspace(3, 1, rng),)
            b = (random_subspace(3, 1, rng),)
            q = en.directional_derivative(x, a, b, 1.0, h=1e-5)
            assert abs(q) <= np.linalg.norm(x) + 1e-9

    def test_gradient_p2_single_subspace(self):
        # Richardson-extrapolated one-sided quotients match the closed-form
        # derivative along a plane rotation
        rng = np.random.default_rng(7)
        n = 200
        pts = rng.standard_normal((n, 3))
        l = random_subspace(3, 1, rng)
        u = l.basis[:, 0]
        w = l.orthonormal_complement()[:, 0]

        def rot(t):
            r = (
                np.eye(3)
                + np.sin(t) * (np.outer(w, u) - np.outer(u, w))
                + (np.cos(t) - 1) * (np.outer(u, u) + np.outer(w, w))
            )
            return Subspace.from_matrix(r @ l.basis)

        e = lambda t: en.dataset_energy(pts, (rot(t),), 2.0).total
        analytic = -2.0 * n * float(u @ en.d_matrix_batch(l, pts, 2.0).mean(0) @ w)
        h1, h2 = 1e-4, 1e-5
        q1 = (e(h1) - e(0)) / h1
        q2 = (e(h2) - e(0)) / h2
        richardson = (h1 * q2 - h2 * q1) / (h1 - h2)
        assert richardson == pytest.approx(analytic, rel=1e-6)
        # leading error is linear in h
        assert abs(q1 - analytic) / abs(q2 - analytic) == pytest.approx(10, rel=0.3)


class TestRegionPerturbation:
    def _truth(self):
        return (line2d(0.0), line2d(0.5), line2d(1.2))

    def test_satisfied_for_small_perturbation(self):
        truth = self._truth()
        pert = line2d(0.55)
        hyp = en.region_perturbation_hypotheses(truth, pert)
        assert hyp.satisfied
        assert hyp.min_perturbed_angle > 0

    def test_degenerate_perturbation_rejected(self):
        truth = self._truth()
        hyp = en.region_perturbation_hypotheses(truth, line2d(0.0))
        assert not hyp.perturbed_generic and not hyp.satisfied

    def test_dominance_violation(self):
        # moving the second line past the third breaks the ordering
        truth = (line2d(0.0), line2d(0.4), line2d(0.8))
        hyp = en.region_perturbation_hypotheses(truth, line2d(1.3))
        assert not hyp.dominance and not hyp.satisfied

    def test_needs_two(self):
        with pytest.raises(ValueError):
            en.region_perturbation_hypotheses((line2d(0.0),), line2d(0.1))


class TestSymmetricDifference:
    def test_identical_tuples(self):
        tup = (line2d(0.1), line2d(1.2))
        est = en.voronoi_symmetric_difference(tup, tup, mc_budget=5000, seed=0)
        assert est.hits == 0 and not est.positive and est.ci_low == 0.0

    def test_perturbation_detected(self):
        a = (line2d(0.0), line2d(1.0))
        b = (line2d(0.0), line2d(1.15))
        est = en.voronoi_symmetric_difference(a, b, mc_budget=20_000, seed=0)
        assert est.positive
        assert est.ci_low <= est.fraction <= est.ci_high

    def test_budget_floor(self):
        tup = (line2d(0.1), line2d(1.2))
        with pytest.raises(ValueError):
            en.voronoi_symmetric_difference(tup, tup, mc_budget=100)

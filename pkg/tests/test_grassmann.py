"""Subspace geometry: constructions with known answers plus randomized
metric properties."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lpflats.grassmann import (
    MAX_TUPLE_LEN,
    CapabilityError,
    Subspace,
    dist_grassmann,
    dist_tuple,
    geodesic,
    line2d,
    line2d_angle,
    orthogonal_subtraction,
    principal_angles,
    random_subspace,
    recovery_distance,
    subspace_from_dict,
    subspace_to_dict,
)

RNG = np.random.default_rng(20240811)


def basis(*cols):
    return Subspace(np.array(cols, dtype=float).T)


class TestSubspace:
    def test_rejects_non_orthonormal(self):
        with pytest.raises(ValueError):
            Subspace(np.array([[1.0, 1.0], [0.0, 1.0]]))

    def test_rejects_bad_shape(self):
        with pytest.raises(ValueError):
            Subspace(np.ones((2, 3)))

    def test_basis_is_read_only(self):
        l = line2d(0.3)
        with pytest.raises(ValueError):
            l.basis[0, 0] = 2.0

    def test_from_matrix_orthonormalizes(self):
        m = np.array([[1.0, 2.0], [0.0, 1.0], [1.0, 0.0]])
        l = Subspace.from_matrix(m)
        assert l.dim == 2
        # same span: original columns project to themselves
        proj = l.project(m.T)
        assert np.allclose(proj, m.T, atol=1e-12)

    def test_from_matrix_rank_deficient(self):
        m = np.array([[1.0, 2.0], [1.0, 2.0]])
        with pytest.raises(ValueError):
            Subspace.from_matrix(m)

    def test_projection_and_distance_hand_case(self):
        l = line2d(0.0)  # x axis
        x = np.array([3.0, 4.0])
        assert np.allclose(l.project(x), [3.0, 0.0])
        assert l.distance(x) == pytest.approx(4.0, abs=1e-15)

    def test_distance_batched(self):
        l = basis([1, 0, 0], [0, 1, 0])
        pts = RNG.standard_normal((50, 3))
        expected = np.abs(pts[:, 2])
        assert np.allclose(l.distance(pts), expected, atol=1e-12)

    def test_orthonormal_complement(self):
        l = basis([1, 0, 0])
        c = l.orthonormal_complement()
        assert c.shape == (3, 2)
        assert np.allclose(c.T @ c, np.eye(2), atol=1e-12)
        assert np.allclose(l.basis.T @ c, 0, atol=1e-12)

    def test_equality_and_hash(self):
        a = line2d(0.7)
        b = line2d(0.7)
        assert a == b and hash(a) == hash(b)
        assert a != line2d(0.8)


class TestPrincipalAngles:
    def test_lines_in_plane(self):
        for a, b in [(0.0, 0.3), (0.2, 1.2), (0.1, 2.0)]:
            expect = abs(a - b)
            if expect > np.pi / 2:
                expect = np.pi - expect
            got = principal_angles(line2d(a), line2d(b))
            assert got.shape == (1,)
            assert got[0] == pytest.approx(expect, abs=1e-12)

    def test_planes_sharing_a_direction(self):
        t = 0.7
        f = basis([1, 0, 0], [0, 1, 0])
        g = basis([1, 0, 0], [0, np.cos(t), np.sin(t)])
        ang = principal_angles(f, g)
        assert np.allclose(ang, [0.0, t], atol=1e-12)

    def test_small_angle_accuracy(self):
        # rotations by t are recovered with relative accuracy ~1e-12 even
        # for t where arccos of the cosine would lose everything
        f = basis([1, 0, 0], [0, 1, 0])
        for t in (1e-3, 1e-6, 1e-9, 1e-12):
            g = basis([1, 0, 0], [0, np.cos(t), np.sin(t)])
            ang = principal_angles(f, g)
            assert ang[-1] == pytest.approx(t, rel=1e-6)

    def test_mixed_dimensions(self):
        f = basis([1, 0, 0], [0, 1, 0])
        g = basis([0, 0, 1])
        ang = principal_angles(f, g)
        assert ang.shape == (1,)
        assert ang[0] == pytest.approx(np.pi / 2, abs=1e-12)

    def test_contained_line(self):
        f = basis([1, 0, 0], [0, 1, 0])
        g = basis([np.cos(0.4), np.sin(0.4), 0])
        assert principal_angles(f, g)[0] == pytest.approx(0.0, abs=1e-12)

    def test_identical_exactly_zero(self):
        l = random_subspace(5, 2, RNG)
        assert np.all(principal_angles(l, l) == 0.0)

    def test_swap_is_bit_identical(self):
        for _ in range(50):
            f = random_subspace(4, 2, RNG)
            g = random_subspace(4, 2, RNG)
            assert np.array_equal(principal_angles(f, g), principal_angles(g, f))

    def test_ambient_mismatch(self):
        with pytest.raises(ValueError):
            principal_angles(line2d(0.0), basis([1, 0, 0]))


class TestDistances:
    def test_orthogonal_planes_in_r4(self):
        f = basis([1, 0, 0, 0], [0, 1, 0, 0])
        g = basis([0, 0, 1, 0], [0, 0, 0, 1])
        assert dist_grassmann(f, g) == pytest.approx(np.sqrt(2) * np.pi / 2, abs=1e-12)

    def test_dim_mismatch(self):
        with pytest.raises(ValueError):
            dist_grassmann(basis([1, 0, 0]), basis([1, 0, 0], [0, 1, 0]))

    def test_tuple_metric_is_max(self):
        a = (line2d(0.0), line2d(1.0))
        b = (line2d(0.1), line2d(1.3))
        assert dist_tuple(a, b) == pytest.approx(0.3, abs=1e-12)

    @given(st.floats(0.0, np.pi), st.floats(0.0, np.pi), st.floats(0.0, np.pi))
    @settings(max_examples=200, deadline=None)
    def test_triangle_inequality_lines(self, a, b, c):
        f, g, h = line2d(a), line2d(b), line2d(c)
        assert dist_grassmann(f, g) <= dist_grassmann(f, h) + dist_grassmann(h, g) + 1e-12


class TestGeodesic:
    def test_endpoints(self):
        f = random_subspace(5, 2, RNG)
        g = random_subspace(5, 2, RNG)
        total = dist_grassmann(f, g)
        assert dist_grassmann(geodesic(f, g, 0.0), f) < 1e-12
        assert dist_grassmann(geodesic(f, g, total), g) < 1e-8

    def test_arc_length_parametrization(self):
        f = line2d(0.2)
        g = line2d(1.1)
        total = dist_grassmann(f, g)
        for t in np.linspace(0, total, 7):
            assert dist_grassmann(f, geodesic(f, g, t)) == pytest.approx(t, abs=1e-10)

    def test_lines_rotate_linearly(self):
        mid = geodesic(line2d(0.2), line2d(0.8), 0.3)
        assert line2d_angle(mid) == pytest.approx(0.5, abs=1e-12)

    def test_right_angle_rejected(self):
        f = basis([1, 0])
        g = basis([0, 1])
        with pytest.raises(ValueError):
            geodesic(f, g, 0.1)


class TestOrthogonalSubtraction:
    def test_removes_shared_direction(self):
        star = basis([1, 0, 0], [0, 1, 0])
        l = basis([1, 0, 0])
        out = orthogonal_subtraction(star, l)
        assert out is not None
        assert dist_grassmann(out, basis([0, 1, 0])) < 1e-12

    def test_full_overlap_gives_none(self):
        star = basis([1, 0, 0], [0, 1, 0])
        assert orthogonal_subtraction(star, star) is None

    def test_disjoint_is_identity(self):
        star = basis([1, 0, 0, 0])
        l = basis([0, 0, 1, 0], [0, 0, 0, 1])
        out = orthogonal_subtraction(star, l)
        assert dist_grassmann(out, star) < 1e-12

    def test_result_orthogonal_to_removed_part(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            star = random_subspace(5, 3, rng)
            l = random_subspace(5, 2, rng)
            out = orthogonal_subtraction(star, l)
            if out is None:
                continue
            # every surviving direction keeps its angle to l away from 0
            ang = principal_angles(out, l)
            assert ang.min() > 1e-6


class TestRecoveryDistance:
    def test_identity_permutation(self):
        a = (line2d(0.1), line2d(1.0))
        d, perm = recovery_distance(a, a)
        assert d == 0.0
        assert perm == (0, 1)

    def test_finds_best_permutation(self):
        a = (line2d(0.1), line2d(1.0))
        b = (line2d(1.0 + 0.02), line2d(0.1 + 0.01))
        d, perm = recovery_distance(a, b)
        assert perm == (1, 0)
        assert d == pytest.approx(0.02, abs=1e-12)

    def test_matches_brute_force(self):
        from itertools import permutations

        rng = np.random.default_rng(17)
        for _ in range(20):
            k = int(rng.integers(2, 5))
            a = tuple(random_subspace(3, 1, rng) for _ in range(k))
            b = tuple(random_subspace(3, 1, rng) for _ in range(k))
            d, perm = recovery_distance(a, b)
            brute = min(
                max(dist_grassmann(a[pi], b[i]) for i, pi in enumerate(pm))
                for pm in permutations(range(k))
            )
            assert d == pytest.approx(brute, abs=1e-14)
            assert max(dist_grassmann(a[perm[i]], b[i]) for i in range(k)) == pytest.approx(
                d, abs=1e-14
            )

    def test_large_tuples_rejected(self):
        a = tuple(line2d(0.01 * i) for i in range(MAX_TUPLE_LEN + 1))
        with pytest.raises(CapabilityError):
            recovery_distance(a, a)

    def test_eight_component_chunked_path(self):
        rng = np.random.default_rng(3)
        a = tuple(random_subspace(3, 1, rng) for _ in range(8))
        perm = rng.permutation(8)
        b = tuple(a[i] for i in perm)
        d, _ = recovery_distance(a, b)
        assert d == 0.0


class TestSerialization:
    def test_roundtrip_bit_exact(self):
        for _ in range(20):
            big_d = int(RNG.integers(1, 6))
            d = int(RNG.integers(1, big_d + 1))
            l = random_subspace(big_d, d, RNG)
            back = subspace_from_dict(subspace_to_dict(l))
            assert np.array_equal(back.basis, l.basis)

    def test_dict_shape(self):
        obj = subspace_to_dict(line2d(0.25))
        assert set(obj) == {"ambient_dim", "dim", "basis_column_major"}
        assert obj["ambient_dim"] == 2 and obj["dim"] == 1

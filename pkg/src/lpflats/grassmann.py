"""Geometry of linear subspaces: principal angles, metrics, geodesics.

A subspace of R^D is represented by an orthonormal basis matrix of shape
(D, d).  All distances are geodesic distances on the Grassmannian,
``sqrt(sum of squared principal angles)``, and tuples of subspaces carry
the max-over-coordinates product metric.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import permutations
from typing import Iterable, Sequence

import numpy as np
from numpy.typing import NDArray

ORTHONORMAL_TOL = 1e-10
RANK_REL_TOL = 1e-8
RIGHT_ANGLE_TOL = 1e-9
MAX_TUPLE_LEN = 10


class CapabilityError(ValueError):
    """Input exceeds a documented size limit of the implementation."""


@dataclass(frozen=True, eq=False)
class Subspace:
    """A d-dimensional linear subspace of R^D with an orthonormal basis.

    Distances compare spans, so any orthonormal basis of the same span is
    at distance zero; ``==`` compares the stored basis entries exactly
    (what serialization round-trips preserve).  The basis array is frozen.
    """

    basis: NDArray[np.floating]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return np.array_equal(self.basis, other.basis)

    def __hash__(self) -> int:
        return hash((self.basis.shape, self.basis.tobytes()))

    def __post_init__(self) -> None:
        b = np.asarray(self.basis, dtype=float)
        if b.ndim != 2:
            raise ValueError(f"basis must be 2-d, got shape {b.shape}")
        big_d, d = b.shape
        if not 1 <= d <= big_d:
            raise ValueError(f"need 1 <= dim <= ambient dim, got ({big_d}, {d})")
        gram_err = np.abs(b.T @ b - np.eye(d)).max()
        if gram_err > ORTHONORMAL_TOL:
            raise ValueError(
                f"basis columns not orthonormal (max Gram deviation {gram_err:.3e})"
            )
        b = b.copy()
        b.flags.writeable = False
        object.__setattr__(self, "basis", b)

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @classmethod
    def from_matrix(cls, a: NDArray) -> "Subspace":
        """Span of the columns of ``a``; raises if columns are rank deficient."""
        a = np.asarray(a, dtype=float)
        if a.ndim == 1:
            a = a[:, None]
        u, s, _ = np.linalg.svd(a, full_matrices=False)
        rank = int(np.sum(s > RANK_REL_TOL * s[0])) if s[0] > 0 else 0
        if rank < a.shape[1]:
            raise ValueError(f"columns have rank {rank} < {a.shape[1]}")
        return cls(u[:, : a.shape[1]])

    def project(self, x: NDArray) -> NDArray:
        """Orthogonal projection of point(s) ``x`` onto the subspace."""
        x = np.asarray(x, dtype=float)
        return (x @ self.basis) @ self.basis.T

    def distance(self, x: NDArray) -> NDArray | float:
        """Euclidean distance of point(s) ``x`` to the subspace."""
        x = np.asarray(x, dtype=float)
        r = x - self.project(x)
        return np.linalg.norm(r, axis=-1) if r.ndim > 1 else float(np.linalg.norm(r))

    def orthonormal_complement(self) -> NDArray:
        """A (D, D-d) orthonormal basis of the orthogonal complement."""
        big_d, d = self.basis.shape
        if d == big_d:
            return np.zeros((big_d, 0))
        full, _ = np.linalg.qr(self.basis, mode="complete")
        # Columns beyond the first d span the complement up to sign noise;
        # project out the subspace explicitly to be safe.
        comp = full[:, d:]
        comp = comp - self.basis @ (self.basis.T @ comp)
        q, _ = np.linalg.qr(comp)
        return q


SubspaceTuple = tuple[Subspace, ...]


def line2d(theta: float) -> Subspace:
    """The line through the origin in R^2 at angle ``theta`` to the x-axis."""
    return Subspace(np.array([[np.cos(theta)], [np.sin(theta)]]))


def line2d_angle(line: Subspace) -> float:
    """Angle in [0, pi) of a 1-dimensional subspace of R^2."""
    if line.ambient_dim != 2 or line.dim != 1:
        raise ValueError("line2d_angle needs a line in R^2")
    v = line.basis[:, 0]
    return float(np.arctan2(v[1], v[0]) % np.pi)


def principal_angles(f: Subspace, g: Subspace) -> NDArray:
    """Principal angles between two subspaces, ascending, in [0, pi/2].

    Large angles come from arccos of the singular values of ``B_f^T B_g``;
    angles below pi/4 are recomputed from the sine-based factorization,
    which keeps small angles accurate (arccos alone loses them to rounding
    near 1).  The operand order is canonicalized internally so the result
    is bit-identical under argument swap, and identical bases give exact
    zeros.
    """
    if f.ambient_dim != g.ambient_dim:
        raise ValueError("ambient dimensions differ")
    a, b = f.basis, g.basis
    if b.tobytes() < a.tobytes():
        a, b = b, a
    if a.shape == b.shape and np.array_equal(a, b):
        return np.zeros(a.shape[1])
    m = a.T @ b
    s = np.clip(np.linalg.svd(m, compute_uv=False), -1.0, 1.0)
    theta = np.arccos(s)  # ascending, since s is descending
    small = s**2 >= 0.5
    if np.any(small):
        # Singular values of b - a(a^T b) are the sines of the principal
        # angles (plus ones for directions beyond span(a) when d_b > d_a),
        # so the smallest theta.size of them align with theta's order.
        s_sin = np.linalg.svd(b - a @ m, compute_uv=False)
        sines = np.clip(np.sort(s_sin)[: theta.size], -1.0, 1.0)
        theta = np.where(small, np.arcsin(sines), theta)
    return np.sort(theta)


def dist_grassmann(f: Subspace, g: Subspace) -> float:
    """Geodesic distance sqrt(theta_1^2 + ... + theta_d^2)."""
    if f.dim != g.dim:
        raise ValueError("dimensions differ")
    return float(np.sqrt(np.sum(principal_angles(f, g) ** 2)))


def dist_tuple(a: Sequence[Subspace], b: Sequence[Subspace]) -> float:
    """Max over coordinates of dist_grassmann (product metric)."""
    if len(a) != len(b):
        raise ValueError("tuple lengths differ")
    return max(dist_grassmann(x, y) for x, y in zip(a, b))


def recovery_distance(
    a: Sequence[Subspace], b: Sequence[Subspace]
) -> tuple[float, tuple[int, ...]]:
    """Distance between unordered tuples: min over permutations of dist_tuple.

    Returns ``(dist, perm)`` where ``perm`` matches ``a[perm[i]]`` with
    ``b[i]`` and is lexicographically smallest among minimizers.  Tuples
    longer than 10 raise CapabilityError (the search is exhaustive).
    """
    k = len(a)
    if len(b) != k:
        raise ValueError("tuple lengths differ")
    if k > MAX_TUPLE_LEN:
        raise CapabilityError(f"tuples of length {k} > {MAX_TUPLE_LEN} unsupported")
    dmat = np.array([[dist_grassmann(x, y) for y in b] for x in a])
    best = np.inf
    best_perm: tuple[int, ...] = tuple(range(k))
    # itertools.permutations yields in lexicographic order, so a strict
    # improvement test keeps the lexicographically smallest minimizer.
    if k <= 7:
        for perm in permutations(range(k)):
            v = max(dmat[perm[i], i] for i in range(k))
            if v < best:
                best, best_perm = v, perm
    else:
        cols = np.arange(k)
        chunk: list[tuple[int, ...]] = []
        for perm in permutations(range(k)):
            chunk.append(perm)
            if len(chunk) == 100_000:
                best, best_perm = _best_perm_chunk(dmat, chunk, cols, best, best_perm)
                chunk.clear()
        if chunk:
            best, best_perm = _best_perm_chunk(dmat, chunk, cols, best, best_perm)
    return float(best), best_perm


def _best_perm_chunk(dmat, chunk, cols, best, best_perm):
    arr = np.asarray(chunk)
    vals = dmat[arr, cols[None, :]].max(axis=1)
    i = int(np.argmin(vals))
    if vals[i] < best:
        return float(vals[i]), tuple(int(x) for x in arr[i])
    return best, best_perm


def geodesic(f: Subspace, g: Subspace, t: float) -> Subspace:
    """Point at arc length ``t`` on the geodesic from ``f`` toward ``g``.

    Built from principal vectors: column i travels
    ``u_i cos(theta_i t / T) + w_i sin(theta_i t / T)`` where ``T`` is the
    total geodesic distance, ``u_i`` are principal vectors of ``f`` and
    ``w_i`` the matched orthonormal directions orthogonal to ``f``.
    Raises when some principal angle is within 1e-9 of pi/2, where the
    matched direction is not unique enough for a stable construction.
    """
    if f.ambient_dim != g.ambient_dim or f.dim != g.dim:
        raise ValueError("shape mismatch")
    u_mat, s, vt = np.linalg.svd(f.basis.T @ g.basis)
    s = np.clip(s, -1.0, 1.0)
    theta = np.arccos(s)
    if np.any(np.abs(theta - np.pi / 2) < RIGHT_ANGLE_TOL):
        raise ValueError("geodesic undefined: a principal angle is at pi/2")
    total = float(np.sqrt(np.sum(theta**2)))
    u = f.basis @ u_mat
    if total == 0.0:
        return f
    gv = g.basis @ vt.T
    resid = gv - u * np.cos(theta)[None, :]
    w = np.zeros_like(u)
    nz = theta > 1e-12
    w[:, nz] = resid[:, nz] / np.sin(theta[nz])[None, :]
    phi = theta * (t / total)
    cols = u * np.cos(phi)[None, :] + w * np.sin(phi)[None, :]
    q, _ = np.linalg.qr(cols)
    return Subspace(q)


def random_tangent(l: Subspace, rng: np.random.Generator) -> NDArray:
    """A random unit-speed tangent at ``l``: (D, d), columns orthogonal to ``l``.

    Normalized so that following it for arc length t moves the subspace by
    geodesic distance t.
    """
    h = rng.standard_normal(l.basis.shape)
    h -= l.basis @ (l.basis.T @ h)
    norm = np.linalg.norm(h)
    if norm < 1e-12:
        return random_tangent(l, rng)
    return h / norm


def geodesic_from_tangent(l: Subspace, tangent: NDArray, t: float) -> Subspace:
    """Exponential map: geodesic from ``l`` with velocity ``tangent``, at time t.

    For a unit-Frobenius-norm tangent the parameter t is arc length.
    """
    u, s, vt = np.linalg.svd(tangent, full_matrices=False)
    base = l.basis @ vt.T
    cols = base * np.cos(s * t)[None, :] + u * np.sin(s * t)[None, :]
    q, _ = np.linalg.qr(cols)
    return Subspace(q)


def orthogonal_subtraction(l_star: Subspace, l: Subspace) -> Subspace | None:
    """The part of ``l_star`` orthogonal to its intersection with ``l``.

    Returns ``l_star intersect (l intersect l_star)^perp``, or None when
    the result is the zero subspace (l_star contained in l).  Membership
    in the intersection is decided by singular values within 1e-8 of 1.
    """
    if l_star.ambient_dim != l.ambient_dim:
        raise ValueError("ambient dimensions differ")
    # Full svd: vt is a complete rotation of l_star's coordinates, so the
    # principal vectors below form an orthonormal basis of all of l_star;
    # columns beyond len(s) are orthogonal to l automatically.
    _, s, vt = np.linalg.svd(l.basis.T @ l_star.basis)
    s = np.clip(s, -1.0, 1.0)
    pv = l_star.basis @ vt.T
    keep = np.ones(l_star.dim, dtype=bool)
    keep[: s.size] = s < 1.0 - RANK_REL_TOL
    if not np.any(keep):
        return None
    return Subspace(pv[:, keep])


def random_subspace(ambient_dim: int, dim: int, rng: np.random.Generator) -> Subspace:
    """Uniform (rotation invariant) random subspace: QR of a Gaussian matrix."""
    if not 1 <= dim <= ambient_dim:
        raise ValueError("need 1 <= dim <= ambient_dim")
    g = rng.standard_normal((ambient_dim, dim))
    q, _ = np.linalg.qr(g)
    return Subspace(q)


def subspace_to_dict(l: Subspace) -> dict:
    """Lossless plain-data form: dims plus column-major basis entries."""
    return {
        "ambient_dim": l.ambient_dim,
        "dim": l.dim,
        "basis_column_major": [float(f"{v:.17g}") for v in l.basis.T.ravel()],
    }


def subspace_from_dict(obj: dict) -> Subspace:
    big_d, d = int(obj["ambient_dim"]), int(obj["dim"])
    flat = np.array(obj["basis_column_major"], dtype=float)
    if flat.size != big_d * d:
        raise ValueError("basis entry count does not match dims")
    return Subspace(flat.reshape(d, big_d).T)


def tuple_to_json(subspaces: Sequence[Subspace]) -> str:
    return json.dumps({"subspaces": [subspace_to_dict(l) for l in subspaces]}, indent=2)


def tuple_from_json(text: str) -> SubspaceTuple:
    obj = json.loads(text)
    return tuple(subspace_from_dict(o) for o in obj["subspaces"])

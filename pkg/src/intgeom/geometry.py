"""Euclidean frames, Grassmann manifolds and Haar sampling.

Subspaces are carried as orthonormal frames (``n x m`` arrays whose columns
span the subspace).  The Monte Carlo code in the rest of the package works on
stacks of frames of shape ``(N, n, m)``; the helpers here produce both.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gamma, pi

import numpy as np
from scipy.linalg import subspace_angles

ORTHO_TOL = 1e-12
EQUAL_TOL = 1e-9
_DEGENERATE_GRAM = 1e-14


def sphere_area(m: int) -> float:
    """Surface area of the unit sphere S^m in R^{m+1}."""
    if m < 0:
        raise ValueError(f"sphere dimension must be >= 0, got {m}")
    return 2.0 * pi ** ((m + 1) / 2) / gamma((m + 1) / 2)


def ball_volume(m: int) -> float:
    """Volume of the Euclidean unit ball D_m."""
    if m < 0:
        raise ValueError(f"ball dimension must be >= 0, got {m}")
    return pi ** (m / 2) / gamma(m / 2 + 1)


def grassmann_volume(a: int, b: int) -> float:
    """Volume |G(a,b)| of the Grassmann manifold, normalized as in Miles.

    |G(a,b)| = (|S^{a-1}| ... |S^{a-b}|) / (|S^{b-1}| ... |S^0|), with the
    empty product (b = 0) equal to 1.
    """
    if a < 0 or b < 0 or b > a:
        raise ValueError(f"need 0 <= b <= a, got a={a}, b={b}")
    num = 1.0
    den = 1.0
    for i in range(b):
        num *= sphere_area(a - 1 - i)
        den *= sphere_area(i)
    return num / den


# ---------------------------------------------------------------------------
# Random streams


@dataclass(frozen=True)
class RngStream:
    """Counter-based random stream keyed by ``(seed, stream_id)``.

    Every call to :meth:`generator` returns a fresh Philox generator with the
    same key, so identical keys reproduce identical draws.  Child streams for
    chunked work are derived with :meth:`child`.
    """

    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        key = np.array([self.seed % 2**64, self.stream_id % 2**64], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    def child(self, index: int) -> "RngStream":
        ss = np.random.SeedSequence(entropy=self.stream_id % 2**64, spawn_key=(int(index),))
        return RngStream(self.seed, int(ss.generate_state(1, np.uint64)[0]))


def as_generator(rng) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    if rng is None or isinstance(rng, (int, np.integer)):
        return RngStream(0 if rng is None else int(rng)).generator()
    raise TypeError(f"cannot build a generator from {type(rng).__name__}")


# ---------------------------------------------------------------------------
# Subspaces


@dataclass(frozen=True, eq=False)
class Subspace:
    """An element of G(n, m) stored as an orthonormal ``(n, m)`` frame."""

    frame: np.ndarray = field(repr=False)

    def __post_init__(self):
        frame = np.array(self.frame, dtype=float)
        if frame.ndim != 2:
            raise ValueError("frame must be a 2-d array of column vectors")
        m = frame.shape[1]
        gram = frame.T @ frame
        if m and np.max(np.abs(gram - np.eye(m))) > 1e-10:
            raise ValueError("frame columns are not orthonormal")
        frame.setflags(write=False)
        object.__setattr__(self, "frame", frame)

    @classmethod
    def span(cls, vectors) -> "Subspace":
        """Subspace spanned by the given vectors (rows or a single vector)."""
        v = np.atleast_2d(np.asarray(vectors, dtype=float))
        q, r = np.linalg.qr(v.T)
        rank = int(np.sum(np.abs(np.diag(r)) > 1e-12 * max(1.0, np.abs(r).max())))
        if rank < v.shape[0]:
            raise ValueError("vectors are linearly dependent")
        return cls(q)

    @classmethod
    def coordinate(cls, n: int, indices) -> "Subspace":
        return cls(np.eye(n)[:, list(indices)])

    @property
    def ambient_dim(self) -> int:
        return self.frame.shape[0]

    @property
    def dim(self) -> int:
        return self.frame.shape[1]

    def projector(self) -> np.ndarray:
        return self.frame @ self.frame.T

    def project(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return (x @ self.frame) @ self.frame.T

    def contains(self, other: "Subspace", tol: float = 1e-10) -> bool:
        resid = other.frame - self.frame @ (self.frame.T @ other.frame)
        return bool(np.max(np.abs(resid), initial=0.0) < tol)

    def distance(self, other: "Subspace") -> float:
        """Spectral norm of the difference of orthogonal projectors."""
        if self.ambient_dim != other.ambient_dim:
            raise ValueError("subspaces live in different ambient spaces")
        if self.dim != other.dim:
            return 1.0
        return float(np.linalg.norm(self.projector() - other.projector(), 2))

    def equals(self, other: "Subspace", tol: float = EQUAL_TOL) -> bool:
        return self.dim == other.dim and self.distance(other) <= tol

    def rebased(self, rng=None) -> "Subspace":
        """Same subspace with the frame rotated by a Haar element of O(m)."""
        u = haar_orthogonal(self.dim, rng)
        return Subspace(self.frame @ u)


def haar_orthogonal(m: int, rng=None) -> np.ndarray:
    """Haar-distributed element of O(m)."""
    if m == 0:
        return np.zeros((0, 0))
    g = as_generator(rng)
    q, r = np.linalg.qr(g.standard_normal((m, m)))
    return q * np.sign(np.diag(r))


def _orthonormal_columns(z: np.ndarray, g: np.random.Generator) -> np.ndarray:
    """QR-orthonormalize stacked Gaussian matrices, redrawing degenerate ones."""
    m = z.shape[-1]
    while True:
        q, r = np.linalg.qr(z)
        diag = np.abs(np.diagonal(r, axis1=-2, axis2=-1))
        bad = np.prod(diag, axis=-1) ** 2 < _DEGENERATE_GRAM if m else np.zeros(z.shape[:-2], bool)
        if not np.any(bad):
            return q
        z = z.copy()
        z[bad] = g.standard_normal(z[bad].shape)


def haar_frames(n: int, m: int, size: int, rng=None) -> np.ndarray:
    """Stack of ``size`` Haar-distributed orthonormal frames, shape (size, n, m)."""
    if not 0 <= m <= n:
        raise ValueError(f"need 0 <= m <= n, got n={n}, m={m}")
    g = as_generator(rng)
    if m == 0:
        return np.zeros((size, n, 0))
    return _orthonormal_columns(g.standard_normal((size, n, m)), g)


def haar_subspace(n: int, m: int, rng=None) -> Subspace:
    """Haar-distributed element of G(n, m).

    The frame comes from orthonormalizing ``m`` independent standard Gaussian
    vectors.  Passing the same :class:`RngStream` twice returns the same
    subspace.
    """
    if not 0 <= m <= n:
        raise ValueError(f"need 0 <= m <= n, got n={n}, m={m}")
    if m == n:
        return Subspace(np.eye(n))
    return Subspace(haar_frames(n, m, 1, rng)[0])


def complement_frame(frame: np.ndarray) -> np.ndarray:
    """Orthonormal frame(s) of the orthogonal complement; works on stacks."""
    frame = np.asarray(frame, dtype=float)
    n, m = frame.shape[-2:]
    if m == 0:
        return np.broadcast_to(np.eye(n), frame.shape[:-2] + (n, n)).copy()
    q, _ = np.linalg.qr(frame, mode="complete")
    return q[..., m:]


def fiber_frames(base: np.ndarray, m: int, size: int | None = None, rng=None) -> np.ndarray:
    """Haar frames of m-dimensional subspaces containing the span of ``base``.

    ``base`` is either one frame ``(n, d)`` (then ``size`` draws are made) or
    a stack ``(N, n, d)`` (one draw per base).  The first ``d`` columns of
    each returned frame are the base frame itself.
    """
    base = np.asarray(base, dtype=float)
    single = base.ndim == 2
    if single:
        if size is None:
            raise ValueError("size is required for a single base frame")
        base = np.broadcast_to(base, (size,) + base.shape)
    n, d = base.shape[-2:]
    if not d <= m <= n:
        raise ValueError(f"need dim(base) <= m <= n, got d={d}, m={m}, n={n}")
    g = as_generator(rng)
    if m == d:
        return np.array(base)
    comp = complement_frame(base[:1]) if single else complement_frame(base)
    inner = haar_frames(n - d, m - d, base.shape[0], g)
    extra = comp @ inner
    return np.concatenate([base, extra], axis=-1)


def haar_in_fiber(F: Subspace, m: int, rng=None) -> Subspace:
    """Haar-distributed E in G(n, m) with F contained in E."""
    if m < F.dim:
        raise ValueError(f"target dimension {m} is smaller than dim F = {F.dim}")
    return Subspace(fiber_frames(F.frame, m, 1, rng)[0])


def perp(E: Subspace) -> Subspace:
    """Orthogonal complement E^perp."""
    return Subspace(complement_frame(E.frame))


def principal_angles(E: Subspace, F: Subspace) -> np.ndarray:
    """Principal angles between two subspaces, ascending."""
    return np.sort(subspace_angles(E.frame, F.frame))


def parallelepiped_volume(vectors) -> float:
    """m-dimensional volume of the parallelepiped spanned by the vectors.

    Square root of the Gram determinant; zero for dependent sets.
    """
    v = np.atleast_2d(np.asarray(vectors, dtype=float))
    if v.shape[0] == 0:
        raise ValueError("need at least one vector")
    det = np.linalg.det(v @ v.T)
    return float(np.sqrt(max(det, 0.0)))


def omega_frames(complements: list[np.ndarray]) -> np.ndarray:
    """Omega for stacks of complement frames; each entry has shape (..., n, k_i)."""
    stacked = np.concatenate(complements, axis=-1)
    gram = np.swapaxes(stacked, -1, -2) @ stacked
    det = np.linalg.det(gram)
    return np.sqrt(np.clip(det, 0.0, None))


def omega(subspaces) -> float:
    """Volume spanned by unit volume elements of E_1^perp, ..., E_r^perp.

    The result lies in [0, 1] and does not depend on the orthonormal bases
    chosen for the complements.
    """
    subspaces = list(subspaces)
    if not subspaces:
        raise ValueError("need at least one subspace")
    n = subspaces[0].ambient_dim
    codims = [n - E.dim for E in subspaces]
    if sum(codims) > n:
        raise ValueError(f"codimensions {codims} over-fill R^{n}")
    comps = [complement_frame(E.frame) for E in subspaces]
    if sum(codims) == 0:
        return 1.0
    return float(omega_frames(comps))

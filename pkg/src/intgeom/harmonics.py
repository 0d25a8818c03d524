"""Quadrature on S^{n-1} and spherical-harmonic analysis of even functions.

Each harmonic space H_j (j even) gets an orthonormal basis built from zonal
reproducing kernels Z_j(<x, y_i>) at a deterministic node set {y_i}.  The
nodes are picked greedily (pivoted Cholesky of the kernel Gram matrix) from a
seeded candidate pool, so the Gram matrix is well conditioned and its
Cholesky factor ``C`` turns ``C^{-1} Z_j(<., y_i>)`` into an orthonormal
basis of H_j with respect to the normalized measure sigma.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import comb

import numpy as np
from numpy.polynomial import chebyshev as cheb
from scipy.linalg import solve_triangular
from scipy.special import roots_chebyt, roots_gegenbauer

from .geometry import RngStream, as_generator

_CHUNK = 4096


def harmonic_dim(n: int, j: int) -> int:
    """Dimension of the space H_j of degree-j spherical harmonics on S^{n-1}."""
    if j < 0:
        return 0
    if n == 1:
        return 1 if j <= 1 else 0
    lower = comb(j + n - 3, n - 1) if j >= 2 else 0
    return comb(j + n - 1, n - 1) - lower


def normalized_gegenbauer(n: int, j: int, t) -> np.ndarray:
    """C_j^a(t) / C_j^a(1) with a = (n-2)/2, by the three-term recurrence.

    The normalized recurrence P_{m+1} = ((2m + 2a) t P_m - m P_{m-1}) / (m + 2a)
    covers n = 2 (Chebyshev) and n = 3 (Legendre) alike.
    """
    t = np.asarray(t, dtype=float)
    if j == 0:
        return np.ones_like(t)
    a2 = n - 2.0
    prev, cur = np.ones_like(t), t.copy()
    for m in range(1, j):
        nxt = np.multiply(t, cur)
        nxt *= (2 * m + a2) / (m + a2)
        prev *= m / (m + a2)
        nxt -= prev
        prev, cur = cur, nxt
    return cur


def zonal(n: int, j: int, t) -> np.ndarray:
    """Reproducing kernel Z_j(t) of H_j for the probability measure sigma.

    ``Z_j(1) = dim H_j`` and ``int Z_j(<x,y>) h(y) dsigma(y) = h(x)`` for
    h in H_j.
    """
    t = np.clip(np.asarray(t, dtype=float), -1.0, 1.0)
    if n < 2:
        raise ValueError("zonal kernels need n >= 2")
    return harmonic_dim(n, j) * normalized_gegenbauer(n, j, t)


def even_degrees(L: int) -> range:
    return range(0, L + 1, 2)


# ---------------------------------------------------------------------------
# Quadrature


@dataclass(frozen=True, eq=False)
class SphereQuadrature:
    """Nodes and positive weights for the probability measure on S^{n-1}.

    With ``even_only`` set, only one node of each antipodal pair is kept (with
    doubled weight); the rule is then exact for *even* polynomials of degree
    up to ``exactness_degree``.
    """

    n: int
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    exactness_degree: int
    even_only: bool = False

    def __len__(self):
        return len(self.weights)

    def integrate(self, values) -> np.ndarray:
        return np.tensordot(self.weights, np.asarray(values), axes=(0, 0))


def _gegenbauer_rule(m: int, n: int):
    """Nodes/weights in t = x_1 for the marginal of sigma on S^{n-1}."""
    alpha = (n - 2) / 2
    t, w = roots_gegenbauer(m, alpha)
    return t, w / w.sum()


def _circle_rule(count: int):
    phi = 2 * np.pi * np.arange(count) / count
    return np.column_stack([np.cos(phi), np.sin(phi)]), np.full(count, 1.0 / count)


def _product_rule(n: int, degree: int, circle_count: int):
    if n == 2:
        return _circle_rule(circle_count)
    sub_nodes, sub_w = _product_rule(n - 1, degree, circle_count)
    t, w = _gegenbauer_rule(degree // 2 + 1, n)
    s = np.sqrt(1.0 - t * t)
    nodes = np.concatenate(
        [np.repeat(t, len(sub_w))[:, None], (s[:, None, None] * sub_nodes[None]).reshape(-1, n - 1)],
        axis=1,
    )
    return nodes, np.outer(w, sub_w).ravel()


def build_quadrature(n: int, target_degree: int, even: bool = False) -> SphereQuadrature:
    """Product Gauss-Gegenbauer rule on S^{n-1} exact to ``target_degree``.

    Hyperspherical coordinates: one Gauss-Gegenbauer factor per polar angle
    and an equispaced rule on the final circle.
    """
    if n < 2:
        raise ValueError(f"quadrature needs n >= 2, got {n}")
    if target_degree < 0:
        raise ValueError("target degree must be non-negative")
    circle = target_degree + 1
    if even and circle % 2:
        circle += 1
    nodes, weights = _product_rule(n, target_degree, circle)
    if even:
        # antipode of (t_1..t_{n-2}, phi) is (-t_1..-t_{n-2}, phi + pi): keep phi < pi
        keep = np.tile(np.arange(circle) < circle // 2, len(weights) // circle)
        nodes, weights = nodes[keep], 2.0 * weights[keep]
    weights = weights / weights.sum()
    return SphereQuadrature(n, nodes, weights, target_degree, even)


@lru_cache(maxsize=32)
def default_quadrature(n: int, degree: int, even: bool = True) -> SphereQuadrature:
    return build_quadrature(n, degree, even=even)


def section_average(func, frames: np.ndarray, degree: int) -> np.ndarray:
    """Average of ``func`` over S^{n-1} cap E for a stack of frames (N, n, m).

    Uses an m-dimensional rule exact to ``degree``; m = 1 averages the two
    antipodal points.
    """
    frames = np.asarray(frames, dtype=float)
    single = frames.ndim == 2
    if single:
        frames = frames[None]
    N, n, m = frames.shape
    if m < 1:
        raise ValueError("cannot average over a 0-dimensional section")
    if m == 1:
        pts = frames[:, :, 0]
        out = 0.5 * (func(pts) + func(-pts))
    else:
        q = default_quadrature(m, degree, even=False)
        pts = np.einsum("bnm,qm->bqn", frames, q.nodes).reshape(-1, n)
        out = (func(pts).reshape(N, len(q)) @ q.weights)
    return out[0] if single else out


# ---------------------------------------------------------------------------
# Zonal kernels given by coefficient sequences


@dataclass(frozen=True, eq=False)
class ZonalKernel:
    """K(t) = sum_j coef_j Z_j(t), stored as a Chebyshev series in t."""

    n: int
    coefs: dict
    series: np.ndarray = field(repr=False)

    @classmethod
    def from_coefficients(cls, n: int, coefs: dict) -> "ZonalKernel":
        L = max(coefs)
        x = np.cos(np.pi * (np.arange(L + 1) + 0.5) / (L + 1))
        vals = sum(c * zonal(n, j, x) for j, c in coefs.items())
        series = cheb.chebfit(x, vals, L)
        return cls(n, dict(coefs), series)

    def __call__(self, t):
        return cheb.chebval(np.clip(t, -1.0, 1.0), self.series)

    def derivative(self, t):
        return cheb.chebval(np.clip(t, -1.0, 1.0), cheb.chebder(self.series))


def funk_hecke_coefficients(n: int, profile, L: int, nodes: int = 200) -> dict:
    """lambda_j with int profile(<x,y>) h(y) dsigma(y) = lambda_j h(x), h in H_j."""
    if n == 2:
        t, w = roots_chebyt(nodes)
    else:
        t, w = roots_gegenbauer(nodes, (n - 2) / 2)
    w = w / w.sum()
    p = profile(t)
    return {j: float(np.sum(w * p * zonal(n, j, t)) / harmonic_dim(n, j)) for j in even_degrees(L)}


# ---------------------------------------------------------------------------
# Harmonic bases


@dataclass(frozen=True, eq=False)
class HarmonicBlock:
    n: int
    degree: int
    nodes: np.ndarray = field(repr=False)
    chol: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return len(self.nodes)

    def kernel_matrix(self, X) -> np.ndarray:
        """Z_j(<x, y_i>) for rows x of X, shape (len(X), dim)."""
        return zonal(self.n, self.degree, np.asarray(X) @ self.nodes.T)

    def evaluate(self, X) -> np.ndarray:
        """Orthonormal basis values, shape (len(X), dim)."""
        return solve_triangular(self.chol, self.kernel_matrix(X).T, lower=True).T


def _pivoted_cholesky(n: int, j: int, pool: np.ndarray, rank: int):
    diag = np.full(len(pool), float(harmonic_dim(n, j)))
    cols = np.zeros((len(pool), rank))
    chosen = []
    for i in range(rank):
        p = int(np.argmax(diag))
        if diag[p] <= 1e-10 * harmonic_dim(n, j):
            raise RuntimeError(f"candidate pool too small for H_{j} on S^{n - 1}")
        col = zonal(n, j, pool @ pool[p]) - cols[:, :i] @ cols[p, :i]
        col /= np.sqrt(diag[p])
        cols[:, i] = col
        diag = diag - col * col
        diag[p] = 0.0
        chosen.append(p)
    return np.array(chosen), cols[chosen]


@lru_cache(maxsize=None)
def harmonic_block(n: int, j: int) -> HarmonicBlock:
    if j % 2:
        raise ValueError("only even degrees are supported")
    N = harmonic_dim(n, j)
    if j == 0:
        return HarmonicBlock(n, 0, np.eye(n)[:1], np.ones((1, 1)))
    g = RngStream(seed=0x5EED, stream_id=1000 * n + j).generator()
    pool = g.standard_normal((2 * N + 32, n))
    pool /= np.linalg.norm(pool, axis=1, keepdims=True)
    idx, chol = _pivoted_cholesky(n, j, pool, N)
    return HarmonicBlock(n, j, pool[idx], chol)


# ---------------------------------------------------------------------------
# Spectra and functions


@dataclass(frozen=True, eq=False)
class EvenSpectrum:
    """Coefficients of an even function in the H_j bases, j = 0, 2, ..., L.

    ``blocks[i]`` holds the coefficients of degree ``2 i``.  ``residual`` is
    the L2 norm of the part of the analyzed function not captured up to L
    (zero for synthetic spectra), and ``evenness_defect`` the sup of
    |f(x) - f(-x)| over the analysis nodes.
    """

    n: int
    L: int
    blocks: tuple
    residual: float = 0.0
    evenness_defect: float = 0.0

    def __post_init__(self):
        if self.L % 2:
            raise ValueError("truncation degree must be even")
        if len(self.blocks) != self.L // 2 + 1:
            raise ValueError("wrong number of degree blocks")
        for j, b in zip(self.degrees, self.blocks):
            if b.shape[0] != harmonic_dim(self.n, j):
                raise ValueError(f"block {j} has {b.shape[0]} coefficients, expected {harmonic_dim(self.n, j)}")

    @property
    def degrees(self) -> range:
        return even_degrees(self.L)

    def block(self, j: int) -> np.ndarray:
        return self.blocks[j // 2]

    def block_norms(self) -> np.ndarray:
        return np.array([np.linalg.norm(b, axis=0) for b in self.blocks])

    def l2_norm(self) -> float:
        return float(np.sqrt(sum(np.sum(b * b) for b in self.blocks)))

    def inner(self, other: "EvenSpectrum") -> float:
        return float(sum(np.sum(a * b) for a, b in zip(self.blocks, other.blocks)))

    def scaled(self, factors) -> "EvenSpectrum":
        """Multiply block j by ``factors(j)`` (callable) or ``factors[j]``."""
        get = factors if callable(factors) else factors.__getitem__
        return EvenSpectrum(self.n, self.L, tuple(get(j) * b for j, b in zip(self.degrees, self.blocks)))

    def __add__(self, other: "EvenSpectrum") -> "EvenSpectrum":
        return EvenSpectrum(self.n, self.L, tuple(a + b for a, b in zip(self.blocks, other.blocks)))

    def __mul__(self, c: float) -> "EvenSpectrum":
        return EvenSpectrum(self.n, self.L, tuple(c * b for b in self.blocks))

    __rmul__ = __mul__

    def max_abs_diff(self, other: "EvenSpectrum") -> float:
        return float(max(np.max(np.abs(a - b)) for a, b in zip(self.blocks, other.blocks)))


class EvenFunction:
    """An even function on S^{n-1} given by a vectorized evaluation rule.

    ``func`` maps an ``(N, n)`` array of unit vectors to ``N`` values.
    """

    def __init__(self, n: int, func, spectrum: EvenSpectrum | None = None, name: str = ""):
        self.n = n
        self.func = func
        self.spectrum = spectrum
        self.name = name

    def __call__(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            return self.func(X[None])[0]
        return self.func(X)

    def __repr__(self):
        return f"EvenFunction(n={self.n}{', ' + self.name if self.name else ''})"

    @classmethod
    def constant(cls, n: int, c: float = 1.0) -> "EvenFunction":
        return cls(n, lambda X: np.full(len(X), float(c)), name=f"const {c}")

    def evenness_defect(self, X) -> float:
        return float(np.max(np.abs(self(X) - self(-np.asarray(X)))))


def _block_projections(values: np.ndarray, q: SphereQuadrature, L: int) -> list:
    """Per-degree coefficient arrays for values (Q,) or (Q, B) at nodes of q."""
    wv = q.weights.reshape(-1, *([1] * (values.ndim - 1))) * values
    out = []
    for j in even_degrees(L):
        blk = harmonic_block(q.n, j)
        proj = np.zeros((blk.dim,) + values.shape[1:])
        for s in range(0, len(q), _CHUNK):
            proj += blk.kernel_matrix(q.nodes[s:s + _CHUNK]).T @ wv[s:s + _CHUNK]
        out.append(solve_triangular(blk.chol, proj, lower=True))
    return out


def analyze(f, L: int, q: SphereQuadrature | None = None) -> EvenSpectrum:
    """Project an even function onto H_0, H_2, ..., H_L.

    ``f`` is an :class:`EvenFunction` (or any callable on (N, n) arrays).
    The quadrature must be exact to degree 2L; an under-resolved rule raises.
    """
    if L % 2:
        raise ValueError("truncation degree must be even")
    n = f.n if isinstance(f, EvenFunction) else (q.n if q is not None else None)
    if q is None:
        q = default_quadrature(n, 2 * L)
    if q.exactness_degree < 2 * L:
        raise ValueError(f"quadrature exact to degree {q.exactness_degree} cannot resolve L={L}")
    values = np.asarray(f(q.nodes), dtype=float)
    blocks = tuple(_block_projections(values, q, L))
    defect = float(np.max(np.abs(values - np.asarray(f(-q.nodes)))))
    s = EvenSpectrum(q.n, L, blocks, 0.0, defect)
    resid = values - evaluate_spectrum(s, q.nodes)
    return EvenSpectrum(q.n, L, blocks, float(np.sqrt(q.weights @ resid**2)), defect)


def analyze_values(values, q: SphereQuadrature, L: int) -> list:
    """Batch analysis of sampled values (Q,) or (Q, B); returns raw blocks."""
    if q.exactness_degree < 2 * L:
        raise ValueError(f"quadrature exact to degree {q.exactness_degree} cannot resolve L={L}")
    return _block_projections(np.asarray(values, dtype=float), q, L)


def evaluate_spectrum(s: EvenSpectrum, X) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    out = np.zeros(len(X))
    for j, c in zip(s.degrees, s.blocks):
        blk = harmonic_block(s.n, j)
        v = solve_triangular(blk.chol, c, lower=True, trans="T")
        for a in range(0, len(X), _CHUNK):
            out[a:a + _CHUNK] += blk.kernel_matrix(X[a:a + _CHUNK]) @ v
    return out


def synthesize(s: EvenSpectrum) -> EvenFunction:
    """Pointwise evaluator of the band-limited function with spectrum ``s``."""
    return EvenFunction(s.n, lambda X: evaluate_spectrum(s, X), spectrum=s, name=f"band-limited L={s.L}")


def random_spectrum(n: int, L: int, rng=None, decay: float = 1.0) -> EvenSpectrum:
    """Gaussian coefficients, block j scaled by (1 + j)^-decay / sqrt(dim H_j)."""
    g = as_generator(rng)
    blocks = tuple(
        g.standard_normal(harmonic_dim(n, j)) * (1.0 + j) ** -decay / np.sqrt(harmonic_dim(n, j))
        for j in even_degrees(L)
    )
    return EvenSpectrum(n, L, blocks)

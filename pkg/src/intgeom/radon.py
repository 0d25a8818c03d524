"""Spherical Radon transforms on Grassmannians and their duals.

R_m f(E) is the mean of f over the great subsphere S^{n-1} cap E, computed
with a deterministic rule in E's frame coordinates.  The dual R_m^* g(theta)
averages g over the fiber of m-subspaces containing theta and is estimated by
Monte Carlo, since those fibers have no cheap product quadrature.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import sqrt

import numpy as np

from .geometry import RngStream, Subspace, as_generator, complement_frame, fiber_frames, haar_frames, perp
from .harmonics import (
    EvenFunction,
    ZonalKernel,
    analyze,
    build_quadrature,
    evaluate_spectrum,
    section_average,
)
from .homogeneous_fourier import MultiplierTable, c_constant, fourier_extend
from .montecarlo import Estimate, control_variate, draw_chunked, mc_estimate

DEFAULT_SECTION_DEGREE = 24


def _frames_of(E) -> np.ndarray:
    if isinstance(E, Subspace):
        return E.frame[None]
    E = np.asarray(E, dtype=float)
    return E[None] if E.ndim == 2 else E


def sphere_points(frames: np.ndarray, g: np.random.Generator) -> np.ndarray:
    """One uniform point on S^{n-1} cap E for each frame in a stack."""
    z = g.standard_normal(frames.shape[::2])
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    return np.einsum("bnm,bm->bn", frames, z)


# ---------------------------------------------------------------------------
# Functions and measures on G(n, m)


class GrassmannFunction:
    """A function on G(n, m), evaluated on stacks of frames (N, n, m).

    ``func`` must depend only on the subspace, not on the frame; every
    constructor below goes through the projector or a frame-invariant
    determinant.
    """

    def __init__(self, n: int, m: int, func, name: str = ""):
        if not 0 <= m <= n:
            raise ValueError(f"need 0 <= m <= n, got n={n}, m={m}")
        self.n, self.m, self.func, self.name = n, m, func, name

    def __call__(self, E):
        frames = _frames_of(E)
        if frames.shape[1:] != (self.n, self.m):
            raise ValueError(f"expected frames of shape (n, m) = ({self.n}, {self.m}), got {frames.shape[1:]}")
        out = np.asarray(self.func(frames), dtype=float)
        single = isinstance(E, Subspace) or np.ndim(E) == 2
        return float(out[0]) if single else out

    def __repr__(self):
        return f"GrassmannFunction(G({self.n},{self.m}){', ' + self.name if self.name else ''})"

    @classmethod
    def constant(cls, n: int, m: int, c: float = 1.0) -> "GrassmannFunction":
        return cls(n, m, lambda F: np.full(len(F), float(c)), name=f"const {c}")

    @classmethod
    def projection_profile(cls, n: int, m: int, u, profile) -> "GrassmannFunction":
        """g(E) = profile(|P_E u|^2), a zonal function about the axis u."""
        u = np.asarray(u, dtype=float)
        u = u / np.linalg.norm(u)
        return cls(n, m, lambda F: profile(np.sum((u @ F) ** 2, axis=-1)), name="zonal profile")

    @classmethod
    def section_form(cls, n: int, m: int, A, power: float = -0.5) -> "GrassmannFunction":
        """g(E) = det(U^T A U)^power for an orthonormal frame U of E.

        With power -1/2 this is the volume ratio of the central section of
        the ellipsoid {<Ax, x> <= 1} by E.
        """
        A = np.asarray(A, dtype=float)
        return cls(n, m, lambda F: np.linalg.det(np.swapaxes(F, 1, 2) @ A @ F) ** power, name="section form")

    @classmethod
    def from_sphere(cls, f: EvenFunction) -> "GrassmannFunction":
        """Identify an even sphere function with a function on G(n, 1)."""
        return cls(f.n, 1, lambda F: f(F[:, :, 0]), name=f"lines {f.name}")

    @classmethod
    def random_smooth(cls, n: int, m: int, rng=None, terms: int = 3) -> "GrassmannFunction":
        """exp(sum_i a_i |P_E u_i|^2) with random axes and a_i in (-1, 1)."""
        g = as_generator(rng)
        U = g.standard_normal((terms, n))
        U /= np.linalg.norm(U, axis=1, keepdims=True)
        a = g.uniform(-1.0, 1.0, terms)

        def func(F):
            proj = np.sum((U @ F) ** 2, axis=-1)
            return np.exp(proj @ a)

        return cls(n, m, func, name="random smooth")


@dataclass(frozen=True, eq=False)
class GrassmannMeasure:
    """A finite atomic measure sum_j w_j delta_{E_j} on G(n, m)."""

    frames: np.ndarray = field(repr=False)
    weights: np.ndarray
    nonnegative: bool = False

    def __post_init__(self):
        frames = np.asarray(self.frames, dtype=float)
        weights = np.asarray(self.weights, dtype=float).ravel()
        if frames.ndim != 3 or len(frames) != len(weights):
            raise ValueError("need a stack of frames and one weight per atom")
        if not np.all(np.isfinite(weights)):
            raise ValueError("weights must be finite")
        if self.nonnegative and np.any(weights < 0):
            raise ValueError("non-negative measure has negative weights")
        object.__setattr__(self, "frames", frames)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def from_atoms(cls, atoms, nonnegative: bool = False) -> "GrassmannMeasure":
        atoms = list(atoms)
        return cls(np.stack([E.frame for E, _ in atoms]), np.array([w for _, w in atoms]), nonnegative)

    @property
    def n(self) -> int:
        return self.frames.shape[1]

    @property
    def m(self) -> int:
        return self.frames.shape[2]

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum())

    def atoms(self):
        return [(Subspace(F), float(w)) for F, w in zip(self.frames, self.weights)]

    def integrate(self, g: GrassmannFunction) -> float:
        return float(self.weights @ g(self.frames))


# ---------------------------------------------------------------------------
# Transforms


def _section_degree(f, q) -> int:
    if q is not None:
        return q.exactness_degree
    if getattr(f, "spectrum", None) is not None:
        return max(f.spectrum.L, 1)
    return DEFAULT_SECTION_DEGREE


def radon_frames(f, frames: np.ndarray, degree: int = DEFAULT_SECTION_DEGREE) -> np.ndarray:
    """R_m f on a stack of frames (N, n, m)."""
    frames = np.asarray(frames, dtype=float)
    if frames.shape[-1] < 1:
        raise ValueError("the Radon transform needs subspaces of dimension >= 1")
    return section_average(f, frames, degree)


def radon_transform(f, E: Subspace, q=None) -> float:
    """R_m f(E): the mean of f over S^{n-1} cap E for the probability measure.

    ``q`` is an optional m-dimensional :class:`SphereQuadrature`; by default a
    rule exact to the band limit of ``f`` (or degree 24) is used.
    """
    if E.dim < 1:
        raise ValueError("the Radon transform needs subspaces of dimension >= 1")
    if q is not None and E.dim > 1:
        if q.n != E.dim:
            raise ValueError(f"quadrature lives on S^{q.n - 1}, section is S^{E.dim - 1}")
        return float(q.weights @ np.asarray(f(q.nodes @ E.frame.T)))
    return float(radon_frames(f, E.frame, _section_degree(f, q)))


def radon_dual(g: GrassmannFunction, theta, samples: int, rng) -> Estimate:
    """R_m^* g(theta) by Monte Carlo over the fiber of subspaces through theta."""
    theta = np.asarray(theta, dtype=float)
    theta = theta / np.linalg.norm(theta)

    def draw(gen, size):
        return g(fiber_frames(theta[:, None], g.m, size, gen))

    return mc_estimate(draw, samples, rng)


def pair_dual_discrete(mu: GrassmannMeasure, f, q=None) -> float:
    """<R_m^* mu, f> = sum_j w_j R_m f(E_j), exactly up to section quadrature."""
    if mu.m > 1 and q is not None:
        pts = np.einsum("bnm,qm->bqn", mu.frames, q.nodes).reshape(-1, mu.n)
        vals = np.asarray(f(pts)).reshape(len(mu.weights), -1) @ q.weights
    else:
        vals = radon_frames(f, mu.frames, _section_degree(f, q))
    return float(mu.weights @ vals)


def perp_transport(x):
    """I g(E) = g(E^perp) for functions, mu^perp(A) = mu(A^perp) for measures."""
    if isinstance(x, GrassmannFunction):
        return GrassmannFunction(x.n, x.n - x.m, lambda F: x.func(complement_frame(F)), name=f"perp {x.name}")
    if isinstance(x, GrassmannMeasure):
        return GrassmannMeasure(complement_frame(x.frames), x.weights.copy(), x.nonnegative)
    raise TypeError(f"cannot transport {type(x).__name__}")


def duality_pairings(g: GrassmannFunction, f, samples: int, rng, degree: int = DEFAULT_SECTION_DEGREE):
    """Both sides of <R_m^* g, f>_S = <g, R_m f>_G as independent estimates.

    The left side draws theta uniform and E Haar in the fiber of theta; the
    right side draws E Haar on G(n, m) and integrates f over the section.
    """
    stream = rng if isinstance(rng, RngStream) else RngStream(int(as_generator(rng).integers(2**63)))
    n, m = g.n, g.m

    def left(gen, size):
        theta = gen.standard_normal((size, n))
        theta /= np.linalg.norm(theta, axis=1, keepdims=True)
        return g(fiber_frames(theta[:, :, None], m, rng=gen)) * f(theta)

    def right(gen, size):
        F = haar_frames(n, m, size, gen)
        return g(F) * radon_frames(f, F, degree)

    return mc_estimate(left, samples, stream.child(0)), mc_estimate(right, samples, stream.child(1))


# ---------------------------------------------------------------------------
# Wedge identities


def wedge_radon_residual(f: EvenFunction, k: int, H: Subspace, q=None, L: int | None = None) -> float:
    """Defect of R_{n-k}(E_{-k}^ f)(H) = c(n,k) R_k f(H^perp) for dim H = n - k.

    ``f`` must be band-limited (its spectrum, or ``L``, fixes the degree).
    ``q`` optionally replaces the default (n-k)-dimensional section rule.
    The residual is |lhs - rhs| / (c(n,k) max(|R_k f(H^perp)|, ||f||_2)); the
    norm in the denominator keeps it meaningful when the right side is near 0.
    """
    n = f.n
    if not 1 <= k <= n - 1:
        raise ValueError(f"need 1 <= k <= n - 1, got k={k}")
    if H.dim != n - k:
        raise ValueError(f"H must have dimension n - k = {n - k}, got {H.dim}")
    if f.spectrum is not None and (L is None or L <= f.spectrum.L):
        spec = f.spectrum
    else:
        spec = analyze(f, L if L is not None else 8)
    Lb = max(spec.L, 1)
    transformed = fourier_extend(spec, k)
    g = EvenFunction(n, lambda X: evaluate_spectrum(transformed, X))
    lhs = radon_transform(g, H, q) if q is not None else float(radon_frames(g, H.frame, Lb))
    rhs_core = float(radon_frames(f, perp(H).frame, Lb))
    c = c_constant(n, k)
    norm = sqrt(spec.l2_norm() ** 2 + spec.residual**2)
    return abs(lhs - c * rhs_core) / (c * max(abs(rhs_core), norm))


@dataclass(frozen=True)
class DualWedgeResult:
    """Pointwise comparison of E_{-m}^ R_{n-m}^* g and c(n,m) R_m^*(g^perp)."""

    points: np.ndarray = field(repr=False)
    lhs: tuple
    rhs: tuple
    max_z: float
    max_rel_dev: float
    verdict: str

    @property
    def residual(self) -> float:
        return self.max_rel_dev


def dual_wedge_residual(
    g: GrassmannFunction,
    m: int,
    points,
    samples: int,
    rng,
    L: int = 8,
    z_tol: float = 3.0,
    max_rel_se: float = 0.05,
    chunk: int = 5000,
) -> DualWedgeResult:
    """Monte Carlo check of E_{-m}^ R_{n-m}^* g = c(n,m) R_m^*(g^perp).

    ``g`` lives on G(n, n - m).  The left side at x is written as
    int K(<x, y>) R_{n-m}^* g(y) dsigma(y) with the band-limited kernel
    K = sum_{j <= L} c_j^(-m) Z_j and estimated from Haar draws E of
    G(n, n - m) as g(E) times the exact section mean of K(<x, .>) over E.
    The section mean of K(<x, .>) has known expectation c_0^(-m) over Haar
    E and serves as a control variate.  The right side draws F Haar in the
    fiber of x and averages g(F^perp).

    The verdict is ``pass`` when every point has z < z_tol, ``fail``
    otherwise, and ``inconclusive`` when the standard error is too large
    (3 se above ``max_rel_se`` of |rhs|) for the test to resolve anything.
    """
    n = g.n
    if not 1 <= m <= n - 1:
        raise ValueError(f"need 1 <= m <= n - 1, got m={m}")
    if g.m != n - m:
        raise ValueError(f"g must live on G(n, n - m) = G({n}, {n - m})")
    X = np.atleast_2d(np.asarray(points, dtype=float))
    X = X / np.linalg.norm(X, axis=1, keepdims=True)
    stream = rng if isinstance(rng, RngStream) else RngStream(int(as_generator(rng).integers(2**63)))
    table = MultiplierTable.build(n, m, L)
    kernel = ZonalKernel.from_coefficients(n, table.as_dict())
    d = n - m
    if d == 1:
        sec_nodes, sec_w = np.ones((1, 1)), np.ones(1)
    else:
        sq = build_quadrature(d, L, even=True)
        sec_nodes, sec_w = sq.nodes, sq.weights

    def left(gen, size):
        E = haar_frames(n, d, size, gen)
        ys = np.einsum("bnd,qd->bqn", E, sec_nodes)
        sec = kernel(np.einsum("bqn,xn->bxq", ys, X)) @ sec_w
        return np.concatenate([g(E)[:, None] * sec, sec - c0], axis=1)

    gperp = perp_transport(g)
    c = c_constant(n, m)
    c0 = table[0]
    vals = draw_chunked(left, samples, stream.child(0), chunk)
    G = len(X)
    lhs, rhs = [], []
    for i, x in enumerate(X):
        lhs.append(control_variate(vals[:, i], vals[:, G + i]))
        est = radon_dual(gperp, x, samples, stream.child(1).child(i))
        rhs.append(est.scaled(c))
    z = [a.z_against(b) for a, b in zip(lhs, rhs)]
    rel = [abs(a.mean - b.mean) / abs(b.mean) for a, b in zip(lhs, rhs)]
    resolving = all(3 * sqrt(a.stderr**2 + b.stderr**2) <= max_rel_se * abs(b.mean) for a, b in zip(lhs, rhs))
    if max(z) >= z_tol:
        verdict = "fail"
    elif not resolving:
        verdict = "inconclusive"
    else:
        verdict = "pass"
    return DualWedgeResult(X, tuple(lhs), tuple(rhs), float(max(z)), float(max(rel)), verdict)


# ---------------------------------------------------------------------------
# V_k = I R_{n-k} R_k^*


def _vk_draw(n: int, k: int, base: np.ndarray, gen) -> np.ndarray:
    """Draw F Haar in G_theta(n, k) with theta uniform in S^{n-1} cap E^perp."""
    comp = complement_frame(base)
    theta = sphere_points(comp, gen)
    return fiber_frames(theta[:, :, None], k, rng=gen)


def v_apply(k: int, g: GrassmannFunction, E: Subspace, samples: int, rng) -> Estimate:
    """V_k g(E) = R_{n-k}(R_k^* g)(E^perp) for E in G(n, k).

    Single-level estimator: theta uniform on S^{n-1} cap E^perp, then F Haar
    among k-subspaces containing theta, averaging g(F).
    """
    n = g.n
    if not 1 <= k <= n - 1:
        raise ValueError(f"need 1 <= k <= n - 1, got k={k}")
    if g.m != k or E.dim != k:
        raise ValueError("g and E must both live on G(n, k)")

    def draw(gen, size):
        base = np.broadcast_to(E.frame, (size, n, k))
        return g(_vk_draw(n, k, base, gen))

    return mc_estimate(draw, samples, rng)


def vk_pairing(k: int, f: GrassmannFunction, g: GrassmannFunction, samples: int, rng) -> Estimate:
    """<V_k f, g> over G(n, k) with the Haar probability measure."""
    n = f.n

    def draw(gen, size):
        E = haar_frames(n, k, size, gen)
        return f(_vk_draw(n, k, E, gen)) * g(E)

    return mc_estimate(draw, samples, rng)

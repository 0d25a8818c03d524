"""Centrally symmetric star bodies and their radial algebra.

Bodies are immutable expression trees evaluated lazily: every node knows its
radial function rho(theta) = max{r > 0 : r theta in K} on unit vectors, and
composites (k-radial sums, radial products, linear images, sections) combine
the radial functions of their children pointwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.special import betaln

from .geometry import Subspace, ball_volume, complement_frame, sphere_area
from .harmonics import EvenFunction, build_quadrature, default_quadrature, section_average

SPD_TOL = 1e-12
SINGULAR_TOL = 1e-12
DISTANCE_GRID_DEGREE = 24
SECTION_DEGREE = 32


def _unit_rows(X) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    return X / np.linalg.norm(X, axis=1, keepdims=True)


class StarBody:
    """Base class; subclasses implement :meth:`_radial` on unit rows (N, n)."""

    n: int

    def radial(self, X) -> np.ndarray:
        """rho_K at the directions given by the rows of X (normalized first)."""
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            return self._radial(_unit_rows(X))[0]
        return self._radial(_unit_rows(X))

    __call__ = radial

    def gauge(self, x) -> np.ndarray:
        """Minkowski functional ||x||_K = |x| / rho_K(x / |x|)."""
        x = np.asarray(x, dtype=float)
        X = np.atleast_2d(x)
        r = np.linalg.norm(X, axis=1)
        out = r / self._radial(X / r[:, None])
        return out[0] if x.ndim == 1 else out

    def radial_function(self, power: float = 1.0) -> EvenFunction:
        """rho_K^power as an :class:`EvenFunction`."""
        return EvenFunction(self.n, lambda X: self._radial(X) ** power, name=f"rho^{power} {self.describe()['kind']}")

    def describe(self) -> dict:
        raise NotImplementedError

    def _radial(self, X):
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class Ball(StarBody):
    n: int
    radius: float = 1.0

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("radius must be positive")

    def _radial(self, X):
        return np.full(len(X), float(self.radius))

    def describe(self):
        return {"kind": "ball", "n": self.n, "radius": self.radius}


@dataclass(frozen=True, eq=False)
class Ellipsoid(StarBody):
    """{x : <A x, x> <= 1} with A symmetric positive definite."""

    A: np.ndarray = field(repr=False)

    def __post_init__(self):
        A = np.array(self.A, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError("A must be a square matrix")
        if not np.allclose(A, A.T, rtol=0, atol=1e-12 * max(1.0, np.abs(A).max())):
            raise ValueError("A must be symmetric")
        A = 0.5 * (A + A.T)
        if np.linalg.eigvalsh(A)[0] <= SPD_TOL:
            raise ValueError("A must be positive definite")
        A.setflags(write=False)
        object.__setattr__(self, "A", A)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @classmethod
    def from_axes(cls, axes, rotation=None) -> "Ellipsoid":
        """Semi-axes ``axes`` along the columns of ``rotation`` (default: e_i)."""
        axes = np.asarray(axes, dtype=float)
        if np.any(axes <= 0):
            raise ValueError("semi-axes must be positive")
        R = np.eye(len(axes)) if rotation is None else np.asarray(rotation, dtype=float)
        return cls((R / axes**2) @ R.T)

    def _radial(self, X):
        return np.einsum("ij,jk,ik->i", X, self.A, X) ** -0.5

    def describe(self):
        return {"kind": "ellipsoid", "n": self.n, "matrix": self.A.tolist()}


@dataclass(frozen=True, eq=False)
class LpBall(StarBody):
    """Unit ball of the l_p norm, p in [1, inf]; p < 1 gives a star body too."""

    n: int
    p: float

    def __post_init__(self):
        if not self.p > 0:
            raise ValueError("p must be positive")

    def _radial(self, X):
        return 1.0 / np.linalg.norm(X, ord=self.p, axis=1)

    def describe(self):
        return {"kind": "lp_ball", "n": self.n, "p": "inf" if np.isinf(self.p) else self.p}


@dataclass(frozen=True, eq=False)
class KRadialSum(StarBody):
    """rho^k = sum_i rho_i^k."""

    parts: tuple
    k: float

    def __post_init__(self):
        if len({P.n for P in self.parts}) != 1:
            raise ValueError("summands live in different dimensions")
        if not self.k > 0:
            raise ValueError("k must be positive")

    @property
    def n(self) -> int:
        return self.parts[0].n

    def _radial(self, X):
        return sum(P._radial(X) ** self.k for P in self.parts) ** (1.0 / self.k)

    def describe(self):
        return {"kind": "k_radial_sum", "k": self.k, "parts": [P.describe() for P in self.parts]}


@dataclass(frozen=True, eq=False)
class RadialProduct(StarBody):
    """rho^{sum k_i} = prod_i rho_i^{k_i}."""

    factors: tuple
    powers: tuple

    def __post_init__(self):
        if len(self.factors) != len(self.powers) or not self.factors:
            raise ValueError("need one power per factor")
        if len({P.n for P in self.factors}) != 1:
            raise ValueError("factors live in different dimensions")
        if any(p <= 0 for p in self.powers):
            raise ValueError("powers must be positive")

    @property
    def n(self) -> int:
        return self.factors[0].n

    @property
    def level(self) -> float:
        return float(sum(self.powers))

    def _radial(self, X):
        logr = sum(p * np.log(P._radial(X)) for P, p in zip(self.factors, self.powers))
        return np.exp(logr / self.level)

    def describe(self):
        return {
            "kind": "radial_product",
            "powers": list(self.powers),
            "factors": [P.describe() for P in self.factors],
        }


@dataclass(frozen=True, eq=False)
class LinearImage(StarBody):
    """T K for an invertible T."""

    base: StarBody
    T: np.ndarray = field(repr=False)

    def __post_init__(self):
        T = np.array(self.T, dtype=float)
        if T.shape != (self.base.n, self.base.n):
            raise ValueError(f"T must be {self.base.n} x {self.base.n}")
        if abs(np.linalg.det(T)) <= SINGULAR_TOL:
            raise ValueError("T is singular")
        T.setflags(write=False)
        object.__setattr__(self, "T", T)
        object.__setattr__(self, "_Tinv", np.linalg.inv(T))

    @property
    def n(self) -> int:
        return self.base.n

    def _radial(self, X):
        Y = X @ self._Tinv.T
        r = np.linalg.norm(Y, axis=1)
        return self.base._radial(Y / r[:, None]) / r

    def describe(self):
        return {"kind": "linear_image", "matrix": self.T.tolist(), "base": self.base.describe()}


@dataclass(frozen=True, eq=False)
class Section(StarBody):
    """K cap H, written in the coordinates of H's frame."""

    base: StarBody
    H: Subspace

    @property
    def n(self) -> int:
        return self.H.dim

    def _radial(self, X):
        return self.base._radial(X @ self.H.frame.T)

    def describe(self):
        return {"kind": "section", "basis": self.H.frame.T.tolist(), "base": self.base.describe()}


@dataclass(frozen=True, eq=False)
class CustomBody(StarBody):
    """A body given directly by a vectorized radial function."""

    n: int
    func: object = field(repr=False)
    name: str = "custom"

    def _radial(self, X):
        return np.asarray(self.func(X), dtype=float)

    def describe(self):
        return {"kind": "custom", "n": self.n, "name": self.name}


# ---------------------------------------------------------------------------
# Operations


def k_radial_sum(K1: StarBody, K2: StarBody, k: float) -> StarBody:
    """The body L with rho_L^k = rho_K1^k + rho_K2^k."""
    if K1.n != K2.n:
        raise ValueError("bodies live in different dimensions")
    if k < 1:
        raise ValueError("k must be >= 1")
    return KRadialSum((K1, K2), k)


def radial_product_power(K1: StarBody, k1: int, K2: StarBody, k2: int) -> StarBody:
    """The body L with rho_L^{k1+k2} = rho_K1^k1 rho_K2^k2 (k1 + k2 <= n - 1)."""
    if K1.n != K2.n:
        raise ValueError("bodies live in different dimensions")
    if k1 < 1 or k2 < 1:
        raise ValueError("powers must be >= 1")
    if k1 + k2 > K1.n - 1:
        raise ValueError(f"need k1 + k2 <= n - 1, got {k1} + {k2} with n = {K1.n}")
    return RadialProduct((K1, K2), (k1, k2))


def linear_image(K: StarBody, T) -> StarBody:
    """T K; ellipsoids stay ellipsoids, with A' = T^{-T} A T^{-1}."""
    T = np.asarray(T, dtype=float)
    if T.shape != (K.n, K.n):
        raise ValueError(f"T must be {K.n} x {K.n}")
    if abs(np.linalg.det(T)) <= SINGULAR_TOL:
        raise ValueError("T is singular")
    if isinstance(K, Ellipsoid):
        Ti = np.linalg.inv(T)
        A = Ti.T @ K.A @ Ti
        return Ellipsoid(0.5 * (A + A.T))
    if isinstance(K, Ball):
        return Ellipsoid(np.linalg.inv(T @ T.T) / K.radius**2)
    return LinearImage(K, T)


def central_section(K: StarBody, H: Subspace) -> StarBody:
    """K cap H as an m-dimensional body in the coordinates of H's frame."""
    if H.ambient_dim != K.n:
        raise ValueError("subspace and body live in different dimensions")
    if H.dim < 1:
        raise ValueError("section dimension must be >= 1")
    if isinstance(K, Ellipsoid):
        return Ellipsoid(H.frame.T @ K.A @ H.frame)
    if isinstance(K, Ball):
        return Ball(H.dim, K.radius)
    return Section(K, H)


def section_volumes(L: StarBody, frames: np.ndarray, degree: int = SECTION_DEGREE) -> np.ndarray:
    """Vol_m(L cap E) for a stack of frames (N, n, m).

    Balls and ellipsoids use the closed form |B_m| det(U^T A U)^{-1/2};
    everything else goes through the section quadrature of ``degree``.
    """
    frames = np.asarray(frames, dtype=float)
    m = frames.shape[-1]
    if m < 1:
        raise ValueError("section dimension must be >= 1")
    if isinstance(L, Ball):
        return np.full(len(frames), ball_volume(m) * L.radius**m)
    if isinstance(L, Ellipsoid):
        return ball_volume(m) * np.linalg.det(np.swapaxes(frames, 1, 2) @ L.A @ frames) ** -0.5
    if m == 1:
        return 2.0 * L._radial(_unit_rows(frames[..., 0]))
    return sphere_area(m - 1) / m * section_average(lambda X: L._radial(X) ** m, frames, degree)


def section_volume(L: StarBody, E: Subspace, q=None) -> float:
    """Vol_m(L cap E) = |S^{m-1}| / m * R_m(rho_L^m)(E).

    ``q`` is an optional m-dimensional quadrature; by default a rule exact to
    degree 32 is used; ellipsoids with axis ratio ~2 come out to ~1e-8
    relative in dimension 4, and a higher ``degree`` buys more.
    """
    m = E.dim
    if m < 1:
        raise ValueError("section dimension must be >= 1")
    if q is None or m == 1 or isinstance(L, (Ball, Ellipsoid)):
        return float(section_volumes(L, E.frame[None], SECTION_DEGREE if q is None else q.exactness_degree)[0])
    vals = L._radial(q.nodes @ E.frame.T) ** m
    return float(sphere_area(m - 1) / m * (q.weights @ vals))


def intersection_body_of(L: StarBody, degree: int = SECTION_DEGREE) -> StarBody:
    """The body K with rho_K(theta) = Vol_{n-1}(L cap theta^perp)."""
    if L.n < 2:
        raise ValueError("intersection bodies need n >= 2")

    def func(X):
        return section_volumes(L, complement_frame(X[:, :, None]), degree)

    return CustomBody(L.n, func, name="intersection body")


def radial_distance(K1: StarBody, K2: StarBody, grid=None) -> float:
    """max over a grid of |rho_K1 - rho_K2|; a lower bound for d_r(K1, K2).

    The default grid holds the nodes of an antipodally reduced product rule
    exact to degree 24.
    """
    if K1.n != K2.n:
        raise ValueError("bodies live in different dimensions")
    X = default_quadrature(K1.n, DISTANCE_GRID_DEGREE).nodes if grid is None else _unit_rows(grid)
    return float(np.max(np.abs(K1._radial(X) - K2._radial(X))))


# ---------------------------------------------------------------------------
# Ellipsoids concentrating on a Grassmannian point


@dataclass(frozen=True)
class GZApproximant:
    """Ellipsoid with semi-axis 1 along F and eps along F^perp, plus its mass.

    ``normalization`` is Z = int rho^k dsigma, so rho^k / Z has unit mass and
    tends weakly to the uniform measure on S^{n-1} cap F as eps -> 0.
    """

    ellipsoid: Ellipsoid
    normalization: float
    F: Subspace
    eps: float
    k: int

    def density(self, X) -> np.ndarray:
        return self.ellipsoid.radial(X) ** self.k / self.normalization

    def pairing(self, f, degree: int = 16) -> float:
        """int f rho^k / Z dsigma by a 1-D integral over the angle to F."""
        return _fiber_integral(self.F, self.eps, self.k, f, degree) / self.normalization


def _fiber_rules(F: Subspace, degree: int):
    """Sphere rules on S cap F and S cap F^perp in ambient coordinates."""
    out = []
    for frame in (F.frame, complement_frame(F.frame)):
        d = frame.shape[1]
        if d == 1:
            out.append((np.vstack([frame[:, 0], -frame[:, 0]]), np.array([0.5, 0.5])))
        else:
            q = build_quadrature(d, degree)
            out.append((q.nodes @ frame.T, q.weights))
    return out


def _fiber_integral(F: Subspace, eps: float, k: int, f, degree: int) -> float:
    """int f(theta) rho_eps(theta)^k dsigma(theta) in coordinates adapted to F.

    Write theta = sqrt(t) u + sqrt(1 - t) v with u in S cap F, v in S cap
    F^perp; then t = |P_F theta|^2 is Beta((n-k)/2, k/2) distributed under
    sigma.  Substituting t = 1 - s^2 removes the endpoint singularity at t = 1
    and resolves the width-eps layer where the density concentrates.
    """
    n, d = F.ambient_dim, F.dim
    a, b = d / 2, (n - d) / 2
    if f is None:
        inner = lambda t: 1.0
    else:
        (U, wu), (V, wv) = _fiber_rules(F, degree)

        def inner(t):
            pts = np.sqrt(t) * U[:, None, :] + np.sqrt(1.0 - t) * V[None, :, :]
            vals = np.asarray(f(pts.reshape(-1, n))).reshape(len(wu), len(wv))
            return float(wu @ vals @ wv)

    lognorm = np.log(2.0) - betaln(a, b)

    def integrand(s):
        t = 1.0 - s * s
        dens = np.exp(lognorm + (a - 1) * np.log(max(t, 1e-300)) + (2 * b - 1) * np.log(max(s, 1e-300)))
        w = (t + s * s / eps**2) ** (-(n - d) / 2)
        return dens * w * inner(t)

    brk = [x for x in (eps, 3 * eps, 10 * eps, 30 * eps) if x < 1]
    val, _ = quad(integrand, 0.0, 1.0, points=brk, limit=400, epsabs=0, epsrel=1e-12)
    return val


def gz_approximant(F: Subspace, eps: float, k: int) -> GZApproximant:
    """Ellipsoid E(F, eps) concentrating on F in G(n, n - k), normalized.

    Semi-axes a = 1 along F and b = eps along F^perp, so that
    ||x||^2 = |P_F x|^2 + |P_{F^perp} x|^2 / eps^2.
    """
    if not 0 < eps < 1:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    n = F.ambient_dim
    if F.dim != n - k or not 1 <= k <= n - 1:
        raise ValueError(f"F must have dimension n - k = {n - k} with 1 <= k <= n - 1")
    P = F.projector()
    E = Ellipsoid(P + (np.eye(n) - P) / eps**2)
    Z = _fiber_integral(F, eps, k, None, 0)
    return GZApproximant(E, Z, F, eps, k)


def gz_weak_error(F: Subspace, eps: float, k: int, f, degree: int = 16) -> float:
    """|<rho~^k, f> - R_{n-k} f(F)| for the normalized approximant."""
    approx = gz_approximant(F, eps, k)
    target = float(section_average(f, F.frame, degree))
    return abs(approx.pairing(f, degree) - target)

"""Fourier transforms of homogeneous extensions of even sphere functions.

For f on S^{n-1} write E_p f(x) = |x|^p f(x/|x|).  With the convention
``phi^(y) = int phi(x) exp(-i <x, y>) dx`` the transform of E_{-p} f is
homogeneous of degree -n + p, and its restriction to the sphere is denoted
E_{-p}^ f.  The operator commutes with rotations, so it acts on each harmonic
space H_j by a scalar c_j^(-p), the multiplier.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import lgamma, log, exp, pi, sqrt

import numpy as np
from scipy.integrate import quad
from scipy.special import gammaln

from .harmonics import (
    EvenFunction,
    EvenSpectrum,
    analyze,
    default_quadrature,
    evaluate_spectrum,
    even_degrees,
    harmonic_block,
)

P_GUARD = 1e-6
ORACLE_RTOL = 1e-8


def _check_degree(n: int, p: float) -> None:
    if n < 2:
        raise ValueError(f"ambient dimension must be >= 2, got {n}")
    if not P_GUARD <= p <= n - P_GUARD:
        raise ValueError(f"homogeneity degree p={p} must lie in (0, {n}) with guard band {P_GUARD}")


def c_constant(n: int, p: float) -> float:
    """c(n,p) = pi^{n/2} 2^{n-p} Gamma((n-p)/2) / Gamma(p/2).

    The transform of |x|^{-p} is c(n,p) |x|^{-n+p}.
    """
    _check_degree(n, p)
    return exp(0.5 * n * log(pi) + (n - p) * log(2.0) + lgamma((n - p) / 2) - lgamma(p / 2))


def multiplier(n: int, p: float, k: int) -> float:
    """Eigenvalue c_k^(-p) of E_{-p}^ on the degree-k harmonics.

    c_k^(-p) = (-1)^{k/2} 2^{n-p} pi^{n/2} Gamma((k+n-p)/2) / Gamma((k+p)/2),
    evaluated in log space.  Both Gamma arguments are positive, so the sign
    is carried entirely by (-1)^{k/2}.
    """
    _check_degree(n, p)
    if k < 0 or k % 2:
        raise ValueError(f"multiplier degree must be a non-negative even integer, got {k}")
    sign = -1.0 if (k // 2) % 2 else 1.0
    logmag = (n - p) * log(2.0) + 0.5 * n * log(pi) + gammaln((k + n - p) / 2) - gammaln((k + p) / 2)
    return sign * float(np.exp(logmag))


def _radial_moment(a: float) -> float:
    """I(a) = int_0^inf r^a exp(-r^2/2) dr by adaptive quadrature (a > -1)."""
    if a <= -1:
        raise ValueError("radial moment diverges at the origin")
    # the algebraic weight absorbs the r^a singularity near 0
    head, _ = quad(lambda r: np.exp(-r * r / 2), 0.0, 1.0, weight="alg", wvar=(a, 0.0), epsabs=0, epsrel=1e-13)
    tail, _ = quad(lambda r: r**a * np.exp(-r * r / 2), 1.0, np.inf, epsabs=0, epsrel=1e-13, limit=200)
    return head + tail


@lru_cache(maxsize=4096)
def multiplier_oracle(n: int, p: float, k: int) -> float:
    """Multiplier from the Hecke identity, by 1-D radial quadrature.

    Pair E_{-p} h (h in H_k) with phi(x) = h(x/|x|) |x|^k exp(-|x|^2/2), whose
    transform is (-i)^k (2 pi)^{n/2} h(xi/|xi|) |xi|^k exp(-|xi|^2/2).  Both
    sides of <(E_{-p} h)^, phi> = <E_{-p} h, phi^> reduce to radial moments:

        c_k^(-p) = (-i)^k (2 pi)^{n/2} I(k + n - 1 - p) / I(k + p - 1).
    """
    _check_degree(n, p)
    if k < 0 or k % 2:
        raise ValueError(f"multiplier degree must be a non-negative even integer, got {k}")
    sign = -1.0 if (k // 2) % 2 else 1.0
    return sign * (2 * pi) ** (n / 2) * _radial_moment(k + n - 1 - p) / _radial_moment(k + p - 1)


def oracle_agreement(n: int, p: float, k: int) -> float:
    """Relative difference between the closed form and the oracle."""
    a, b = multiplier(n, p, k), multiplier_oracle(n, p, k)
    return abs(a - b) / abs(b)


@dataclass(frozen=True)
class MultiplierTable:
    """Validated multipliers c_k^(-p) for even k <= L.

    Built through :meth:`build`, which checks every entry against
    :func:`multiplier_oracle` and refuses to construct the table when any
    entry disagrees by more than ``ORACLE_RTOL``.
    """

    n: int
    p: float
    L: int
    values: tuple

    @classmethod
    def build(cls, n: int, p: float, L: int) -> "MultiplierTable":
        return _cached_table(n, float(p), int(L))

    def __getitem__(self, k: int) -> float:
        if k % 2 or not 0 <= k <= self.L:
            raise KeyError(k)
        return self.values[k // 2]

    def as_dict(self) -> dict:
        return {k: v for k, v in zip(range(0, self.L + 1, 2), self.values)}


@lru_cache(maxsize=256)
def _cached_table(n: int, p: float, L: int) -> MultiplierTable:
    vals = []
    for k in range(0, L + 1, 2):
        dev = oracle_agreement(n, p, k)
        if dev > ORACLE_RTOL:
            raise ArithmeticError(f"multiplier (n={n}, p={p}, k={k}) disagrees with oracle by {dev:.2e}")
        vals.append(multiplier(n, p, k))
    return MultiplierTable(n, p, L, tuple(vals))


def fourier_extend(s: EvenSpectrum, p: float) -> EvenSpectrum:
    """Spectrum of E_{-p}^ f from the spectrum of f (blockwise scaling)."""
    table = MultiplierTable.build(s.n, p, s.L)
    return s.scaled(table.__getitem__)


def fourier_extend_function(f: EvenFunction, p: float, L: int) -> EvenFunction:
    """E_{-p}^ of a band-limited function, as a pointwise evaluator."""
    s = fourier_extend(f.spectrum if f.spectrum is not None and f.spectrum.L >= L else analyze(f, L), p)
    return EvenFunction(f.n, lambda X: evaluate_spectrum(s, X), spectrum=s, name=f"E_-{p}^({f.name})")


def parseval_residual(f: EvenFunction, g: EvenFunction, p: float, L: int, eps: float | None = None) -> float:
    """Relative defect of the spherical Parseval identity.

    Computes ``<E_{-p}^ f, E_{-n+p}^ g>`` and ``(2 pi)^n <f, g>`` by quadrature
    on S^{n-1} and returns

        |lhs - rhs| / ((2 pi)^n |<f, g>| + eps).

    ``eps`` defaults to ``(2 pi)^n ||f|| ||g|| sqrt(machine eps)`` so that the
    orthogonal case (both sides zero) yields a value at rounding level
    instead of 0/0.
    """
    n = f.n
    _check_degree(n, p)
    q = default_quadrature(n, 2 * L)
    fv, gv = np.asarray(f(q.nodes), dtype=float), np.asarray(g(q.nodes), dtype=float)
    mf, mg = MultiplierTable.build(n, p, L), MultiplierTable.build(n, n - p, L)
    tf, tg = np.zeros(len(q)), np.zeros(len(q))
    for j in even_degrees(L):
        B = harmonic_block(n, j).evaluate(q.nodes)
        tf += mf[j] * (B @ (B.T @ (q.weights * fv)))
        tg += mg[j] * (B @ (B.T @ (q.weights * gv)))
    scale = (2 * pi) ** n
    lhs = float(q.weights @ (tf * tg))
    rhs = scale * float(q.weights @ (fv * gv))
    if eps is None:
        norms = sqrt(float(q.weights @ fv**2) * float(q.weights @ gv**2))
        eps = scale * norms * sqrt(np.finfo(float).eps)
    return abs(lhs - rhs) / (abs(rhs) + eps)

"""Monte Carlo check of the Blaschke-Petkantschin type formula on Grassmannians.

Fix D in G(n, d) and codimensions k_1, ..., k_r with l = sum k_i <= n - d.
Independent Haar E_i in G(n, n - k_i) containing D are compared against the
nested sampler: F Haar in G(n, n - l) containing D, then E_i Haar in
G(n, n - k_i) containing F, weighted by

    Delta = C * Omega(E_1, ..., E_r)^(n - d - l).

A subspace E_i is represented by an orthonormal frame of its complement
E_i^perp, so every integrand receives a list of stacks of normal frames of
shape (N, n, k_i).  Under the first sampler E_i^perp is a Haar k_i-subspace of
D^perp; under the second it is a Haar k_i-subspace of F^perp.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import sqrt

import numpy as np

from .geometry import RngStream, complement_frame, grassmann_volume, haar_frames, omega_frames
from .montecarlo import DEFAULT_CHUNK, Estimate, draw_chunked, summarize
from .report import VerificationReport

BATCHES = 100
Z_PASS = 3.0
Z_BUG = 5.0
LHS_STREAM = 1
RHS_STREAM = 2


# ---------------------------------------------------------------------------
# Integrands


@dataclass(frozen=True)
class Integrand:
    """A function of (E_1, ..., E_r), given their normal frames."""

    name: str
    func: object = field(repr=False)
    params: dict = field(default_factory=dict)

    def __call__(self, normals: list) -> np.ndarray:
        return np.asarray(self.func(normals), dtype=float)

    @classmethod
    def one(cls) -> "Integrand":
        return cls("one", lambda normals: np.ones(normals[0].shape[0]))

    @classmethod
    def omega_power(cls, power: float = 2.0) -> "Integrand":
        return cls(f"omega^{power:g}", lambda normals: omega_frames(normals) ** power, {"power": power})

    @classmethod
    def zonal_product(cls, u, weight: float = 2.0) -> "Integrand":
        """prod_i g(E_i) with g(E) = exp(weight * |P_{E^perp} u|^2 / k_i).

        The exponent is scaled by the codimension so every factor has the
        same range; g is zonal about the axis ``u``.
        """
        u = np.asarray(u, dtype=float)
        u = u / np.linalg.norm(u)

        def func(normals):
            out = 1.0
            for N in normals:
                s = np.sum((u @ N) ** 2, axis=-1)
                out = out * np.exp(weight * s / N.shape[-1])
            return out

        return cls("zonal", func, {"axis": u.tolist(), "weight": weight})


def default_axis(n: int) -> np.ndarray:
    """A fixed generic unit vector, (1, 2, ..., n) normalized."""
    u = np.arange(1.0, n + 1.0)
    return u / np.linalg.norm(u)


def integrand_by_name(name: str, n: int) -> Integrand:
    if name == "one":
        return Integrand.one()
    if name == "zonal":
        return Integrand.zonal_product(default_axis(n))
    if name == "omega2":
        return Integrand.omega_power(2.0)
    raise ValueError(f"unknown integrand {name!r}; use 'one', 'zonal' or 'omega2'")


# ---------------------------------------------------------------------------
# Configuration


@dataclass(frozen=True)
class PetkantschinConfig:
    """One instance of the formula.

    ``d`` selects the pole D = span(e_1, ..., e_d).  ``l`` must equal
    ``sum(k_list)``; it is kept as a field so inconsistent input is caught.
    """

    n: int
    k_list: tuple
    l: int
    d: int = 0
    integrand: Integrand = field(default_factory=Integrand.one)
    samples: int = 1_000_000
    seed: int = 0
    chunk: int = DEFAULT_CHUNK

    def __post_init__(self):
        object.__setattr__(self, "k_list", tuple(int(k) for k in self.k_list))
        _validate(self.n, self.k_list, self.l, self.d)
        if self.samples < 2 * BATCHES:
            raise ValueError(f"need at least {2 * BATCHES} samples for batch means")

    @property
    def pole(self) -> np.ndarray:
        return np.eye(self.n)[:, : self.d]

    @property
    def exponent(self) -> int:
        return self.n - self.d - self.l

    def parameters(self) -> dict:
        return {
            "n": self.n,
            "k_list": list(self.k_list),
            "l": self.l,
            "d": self.d,
            "integrand": self.integrand.name,
            "samples": self.samples,
            "batches": BATCHES,
        }


def _validate(n: int, k_list, l: int, d: int) -> None:
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    if not 0 <= d <= n - 1:
        raise ValueError(f"pole dimension must satisfy 0 <= d <= n - 1, got {d}")
    if not k_list:
        raise ValueError("need at least one codimension")
    if any(k < 1 for k in k_list):
        raise ValueError(f"codimensions must be >= 1, got {list(k_list)}")
    if sum(k_list) != l:
        raise ValueError(f"l = {l} does not equal sum of codimensions {sum(k_list)}")
    if l > n - d:
        raise ValueError(f"l = {l} exceeds n - d = {n - d}")


def delta_constant(n: int, k_list, l: int, d: int = 0) -> float:
    """C = |G(n-d, n-d-l)| prod |G(l, l-k_i)| / prod |G(n-d, n-d-k_i)|."""
    k_list = tuple(int(k) for k in k_list)
    _validate(n, k_list, l, d)
    num = grassmann_volume(n - d, n - d - l)
    den = 1.0
    for k in k_list:
        num *= grassmann_volume(l, l - k)
        den *= grassmann_volume(n - d, n - d - k)
    return num / den


# ---------------------------------------------------------------------------
# Estimators


def _lhs_draw(cfg: PetkantschinConfig):
    comp = complement_frame(cfg.pole)  # frame of D^perp, (n, n-d)

    def draw(gen, size):
        normals = [comp @ haar_frames(cfg.n - cfg.d, k, size, gen) for k in cfg.k_list]
        return cfg.integrand(normals)

    return draw


def _rhs_draw(cfg: PetkantschinConfig):
    comp = complement_frame(cfg.pole)
    C = delta_constant(cfg.n, cfg.k_list, cfg.l, cfg.d)

    def draw(gen, size):
        W = comp @ haar_frames(cfg.n - cfg.d, cfg.l, size, gen)  # F^perp
        normals = [W @ haar_frames(cfg.l, k, size, gen) for k in cfg.k_list]
        weight = C * omega_frames(normals) ** cfg.exponent
        return cfg.integrand(normals) * weight

    return draw


def lhs_estimate(cfg: PetkantschinConfig) -> Estimate:
    """Mean of f over independent Haar E_i containing D (batch-means error)."""
    vals = draw_chunked(_lhs_draw(cfg), cfg.samples, RngStream(cfg.seed, LHS_STREAM), cfg.chunk)
    return summarize(vals, BATCHES)


def rhs_estimate(cfg: PetkantschinConfig) -> Estimate:
    """Mean of f * Delta under the nested F, E_i sampler (batch-means error)."""
    vals = draw_chunked(_rhs_draw(cfg), cfg.samples, RngStream(cfg.seed, RHS_STREAM), cfg.chunk)
    return summarize(vals, BATCHES)


def z_score(lhs: Estimate, rhs: Estimate) -> float:
    """|lhs - rhs| / sqrt(se_l^2 + se_r^2), floored at rounding level."""
    return lhs.z_against(rhs)


def verify(cfg: PetkantschinConfig) -> VerificationReport:
    """Compare both sides; pass iff z < 3.

    z >= 5 is flagged in the details as a probable implementation error
    rather than sampling noise.
    """
    rep = VerificationReport("petkantschin", cfg.parameters(), cfg.seed)
    C = delta_constant(cfg.n, cfg.k_list, cfg.l, cfg.d)
    lhs, rhs = lhs_estimate(cfg), rhs_estimate(cfg)
    z = z_score(lhs, rhs)
    se = sqrt(lhs.stderr**2 + rhs.stderr**2)
    label = f"({cfg.n},{list(cfg.k_list)},{cfg.l},{cfg.d}) {cfg.integrand.name}"
    rep.add(
        f"formula {label}",
        rhs.mean - lhs.mean,
        se,
        Z_PASS,
        "pass" if z < Z_PASS else "fail",
        lhs=lhs.mean,
        lhs_se=lhs.stderr,
        rhs=rhs.mean,
        rhs_se=rhs.stderr,
        z=z,
        constant=C,
        suspect_bug=bool(z >= Z_BUG),
    )
    return rep

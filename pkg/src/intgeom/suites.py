"""Seeded verification suites.

Each suite runs a family of checks and returns a :class:`VerificationReport`.
Every random choice is drawn from ``RngStream(seed, i)`` with a fixed index
``i`` per check, so a (config, seed) pair determines the report bytes.
The effective parameters, defaults included, are stored in the report.

``tol`` overrides the primary tolerance of a suite: the relative error bound
for closed-form suites, the z threshold for Monte Carlo suites and the extra
margin demanded by membership tests.
"""

from __future__ import annotations

import configparser
from dataclasses import asdict, dataclass, replace
from math import pi, sqrt
from pathlib import Path

import numpy as np

from .geometry import RngStream, grassmann_volume, haar_orthogonal, haar_subspace, perp
from .harmonics import random_spectrum, synthesize
from .homogeneous_fourier import c_constant, multiplier, multiplier_oracle, parseval_residual
from .membership import bp_k_test, bp_sample, i_k_test, i_k_test_batch, random_ellipsoid, structure_product_check
from .petkantschin import PetkantschinConfig, integrand_by_name, verify as petkantschin_verify
from .radon import GrassmannFunction, dual_wedge_residual, perp_transport, v_apply, vk_pairing, wedge_radon_residual
from .report import VerificationReport, emit_report
from .starbody import Ball, LpBall, linear_image, radial_product_power

SUITES = ("constants", "parseval", "wedge", "dualwedge", "vk", "petkantschin", "membership", "structure")

PETKANTSCHIN_CASES = ((3, (1, 1), 2, 0), (4, (1, 1), 2, 0), (4, (1, 1), 2, 1), (5, (1, 2), 3, 0), (5, (1, 1, 1), 3, 1))

# per-suite defaults: n, k, L, samples, count (random cases), tol
DEFAULTS = {
    "constants": dict(n=tuple(range(2, 11)), k=(), L=16, samples=None, count=20, tol=1e-12),
    "parseval": dict(n=(3, 4, 5), k=(), L=8, samples=None, count=50, tol=1e-6),
    "wedge": dict(n=(3, 4, 5), k=(1, 2), L=8, samples=None, count=20, tol=1e-4),
    "dualwedge": dict(n=(4, 5), k=(1, 2), L=8, samples=100_000, count=3, tol=3.0),
    "vk": dict(n=(4, 5), k=(1, 2), L=None, samples=100_000, count=2, tol=3.0),
    "petkantschin": dict(n=(3, 4, 5), k=(), L=None, samples=1_000_000, count=None, tol=3.0),
    "membership": dict(n=(5,), k=(1, 2), L=12, samples=3000, count=100, tol=0.0),
    "structure": dict(n=(5,), k=(1,), L=12, samples=None, count=20, tol=0.0),
}
DUALWEDGE_PAIRS = ((4, 1), (4, 2), (5, 2))


class SuiteError(ValueError):
    """Invalid suite configuration (usage error)."""


@dataclass(frozen=True)
class SuiteConfig:
    """Configuration of one suite run; ``None`` fields take suite defaults."""

    suite: str
    n: tuple | None = None
    k: tuple | None = None
    L: int | None = None
    samples: int | None = None
    count: int | None = None
    seed: int = 0
    tol: float | None = None
    out: str | None = None

    def __post_init__(self):
        if self.suite not in SUITES:
            raise SuiteError(f"unknown suite {self.suite!r}; choose from {', '.join(SUITES)}")
        for name in ("n", "k"):
            v = getattr(self, name)
            if v is not None:
                object.__setattr__(self, name, tuple(int(x) for x in np.atleast_1d(v)))
        if self.n is not None and any(not 2 <= x <= 12 for x in self.n):
            raise SuiteError(f"n must lie in [2, 12], got {list(self.n)}")
        if self.k is not None and any(x < 1 for x in self.k):
            raise SuiteError(f"k must be >= 1, got {list(self.k)}")
        if self.L is not None and (self.L < 0 or self.L % 2 or self.L > 40):
            raise SuiteError(f"L must be an even integer in [0, 40], got {self.L}")
        if self.samples is not None and self.samples < 1:
            raise SuiteError("samples must be positive")
        if self.count is not None and self.count < 1:
            raise SuiteError("count must be positive")
        if self.seed < 0:
            raise SuiteError("seed must be non-negative")
        if self.tol is not None and not self.tol >= 0:
            raise SuiteError("tol must be non-negative")

    def resolved(self) -> "SuiteConfig":
        d = DEFAULTS[self.suite]
        return replace(
            self,
            n=self.n if self.n is not None else d["n"],
            k=self.k if self.k is not None else d["k"],
            L=self.L if self.L is not None else d["L"],
            samples=self.samples if self.samples is not None else d["samples"],
            count=self.count if self.count is not None else d["count"],
            tol=self.tol if self.tol is not None else d["tol"],
        )

    def parameters(self) -> dict:
        d = asdict(self)
        d.pop("out")
        d.pop("seed")
        d["n"], d["k"] = list(self.n), list(self.k)
        return d

    @classmethod
    def from_file(cls, path, **overrides) -> "SuiteConfig":
        """Read a ``[suite]`` section; keyword overrides that are not None win."""
        cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
        try:
            with open(path) as fh:
                cp.read_file(fh)
        except (OSError, configparser.Error) as e:
            raise SuiteError(f"cannot read suite config {path}: {e}") from None
        if not cp.has_section("suite"):
            raise SuiteError(f"{path}: missing [suite] section")
        sec = cp["suite"]
        known = {"suite", "n", "k", "l", "samples", "count", "seed", "tol", "out"}
        extra = set(sec) - known
        if extra:
            raise SuiteError(f"{path}: unknown field(s) {', '.join(sorted(extra))}")

        def ints(key):
            return tuple(int(x) for x in sec[key].split(",") if x.strip()) if key in sec else None

        try:
            vals = dict(
                suite=sec.get("suite"),
                n=ints("n"),
                k=ints("k"),
                L=sec.getint("l"),
                samples=sec.getint("samples"),
                count=sec.getint("count"),
                seed=sec.getint("seed", 0),
                tol=sec.getfloat("tol"),
                out=sec.get("out"),
            )
        except ValueError as e:
            raise SuiteError(f"{path}: {e}") from None
        vals.update({k: v for k, v in overrides.items() if v is not None})
        if vals["suite"] is None:
            raise SuiteError(f"{path}: missing field 'suite'")
        return cls(**vals)


def _stream(cfg: SuiteConfig, i: int) -> RngStream:
    return RngStream(cfg.seed, i)


def _rel(a: float, b: float) -> float:
    return abs(a - b) / abs(b)


# ---------------------------------------------------------------------------
# Closed forms


def _constants(cfg: SuiteConfig, rep: VerificationReport) -> None:
    tol = cfg.tol
    for n in cfg.n:
        ps = np.linspace(0, n, 52)[1:-1]
        err = max(_rel(c_constant(n, p) * c_constant(n, n - p), (2 * pi) ** n) for p in ps)
        rep.add(f"c(n,p)c(n,n-p) = (2pi)^n, n={n}", err, 0.0, tol, "pass" if err <= tol else "fail", points=len(ps))
    for a in range(1, 13):
        err = max(_rel(grassmann_volume(a, b), grassmann_volume(a, a - b)) for b in range(a + 1))
        rep.add(f"|G(a,b)| = |G(a,a-b)|, a={a}", err, 0.0, tol, "pass" if err <= tol else "fail")
    mtol = max(tol, 1e-10)
    for n in [x for x in cfg.n if x <= 8]:
        ps = np.linspace(0, n, 52)[1:-1]
        err = max(
            _rel(multiplier(n, p, j) * multiplier(n, n - p, j), (2 * pi) ** n)
            for p in ps
            for j in range(0, cfg.L + 1, 2)
        )
        rep.add(f"c_j^(-p) c_j^(-n+p) = (2pi)^n, n={n}", err, 0.0, mtol, "pass" if err <= mtol else "fail", L=cfg.L)
    g = _stream(cfg, 0).generator()
    otol = max(tol, 1e-8)
    for i in range(cfg.count):
        n = int(g.integers(2, 9))
        p = float(g.uniform(0.05, n - 0.05))
        j = 2 * int(g.integers(0, cfg.L // 2 + 1))
        err = _rel(multiplier(n, p, j), multiplier_oracle(n, p, j))
        rep.add(f"multiplier oracle n={n} p={p:.6f} j={j}", err, 0.0, otol, "pass" if err <= otol else "fail")


def _parseval(cfg: SuiteConfig, rep: VerificationReport) -> None:
    for i in range(cfg.count):
        n = cfg.n[i % len(cfg.n)]
        ps = [1.0, 1.5] + [float(k) for k in range(2, n)]
        p = ps[(i // len(cfg.n)) % len(ps)]
        g = _stream(cfg, i).generator()
        f, h = synthesize(random_spectrum(n, cfg.L, g)), synthesize(random_spectrum(n, cfg.L, g))
        r = parseval_residual(f, h, p, cfg.L)
        rep.add(f"parseval pair {i} n={n} p={p:g}", r, 0.0, cfg.tol, "pass" if r <= cfg.tol else "fail")


def _wedge(cfg: SuiteConfig, rep: VerificationReport) -> None:
    i = 0
    for n in cfg.n:
        for k in cfg.k:
            if k > n - 1:
                continue
            g = _stream(cfg, i).generator()
            i += 1
            res = []
            for _ in range(cfg.count):
                f = synthesize(random_spectrum(n, cfg.L, g))
                res.append(wedge_radon_residual(f, k, haar_subspace(n, n - k, g)))
            worst = max(res)
            rep.add(
                f"R_(n-k) E_(-k)^ f = c(n,k) R_k f on perp, n={n} k={k}",
                worst, 0.0, cfg.tol, "pass" if worst <= cfg.tol else "fail", subspaces=cfg.count,
            )


# ---------------------------------------------------------------------------
# Monte Carlo identities


def _dualwedge(cfg: SuiteConfig, rep: VerificationReport) -> None:
    pairs = [(n, m) for n in cfg.n for m in cfg.k if m <= n - 1]
    if cfg.n == DEFAULTS["dualwedge"]["n"] and cfg.k == DEFAULTS["dualwedge"]["k"]:
        pairs = list(DUALWEDGE_PAIRS)
    i = 0
    for n, m in pairs:
        d = n - m
        A = np.diag(np.linspace(0.5, 2.0, n))
        funcs = [
            GrassmannFunction.constant(n, d, 1.0),
            GrassmannFunction.projection_profile(n, d, np.arange(1.0, n + 1), lambda s: 1 + s + s**2),
            GrassmannFunction.section_form(n, d, A),
        ]
        for gfun in funcs:
            stream = _stream(cfg, i)
            i += 1
            pts = stream.child(0).generator().standard_normal((cfg.count, n))
            res = dual_wedge_residual(gfun, m, pts, cfg.samples, stream.child(1), L=cfg.L, z_tol=cfg.tol)
            ses = [sqrt(a.stderr**2 + b.stderr**2) / abs(b.mean) for a, b in zip(res.lhs, res.rhs)]
            rep.add(
                f"E_(-m)^ R_(n-m)^* g = c(n,m) R_m^*(g perp), n={n} m={m} g={gfun.name}",
                res.max_rel_dev, max(ses), cfg.tol, res.verdict, max_z=res.max_z, points=len(pts),
            )


def _vk(cfg: SuiteConfig, rep: VerificationReport) -> None:
    i = 0
    for n in cfg.n:
        for k in cfg.k:
            if k > n - 1:
                continue
            s = _stream(cfg, i)
            i += 1
            g0 = s.child(0).generator()
            f, h = GrassmannFunction.random_smooth(n, k, g0), GrassmannFunction.random_smooth(n, k, g0)
            a = vk_pairing(k, f, h, cfg.samples, s.child(1))
            b = vk_pairing(k, h, f, cfg.samples, s.child(2))
            z = a.z_against(b)
            rep.add(
                f"<V_k f, g> = <f, V_k g>, n={n} k={k}", a.mean - b.mean, sqrt(a.stderr**2 + b.stderr**2),
                cfg.tol, "pass" if z < cfg.tol else "fail", z=z, lhs=a.mean, rhs=b.mean,
            )
            G = GrassmannFunction.random_smooth(n, n - k, g0)
            for j in range(cfg.count):
                E = haar_subspace(n, n - k, g0)
                lhs = v_apply(n - k, G, E, cfg.samples, s.child(10 + 2 * j))
                rhs = v_apply(k, perp_transport(G), perp(E), cfg.samples, s.child(11 + 2 * j))
                z = lhs.z_against(rhs)
                rep.add(
                    f"V_(n-k) = I V_k I, n={n} k={k} point {j}", lhs.mean - rhs.mean,
                    sqrt(lhs.stderr**2 + rhs.stderr**2), cfg.tol, "pass" if z < cfg.tol else "fail",
                    z=z, lhs=lhs.mean, rhs=rhs.mean,
                )


def _petkantschin(cfg: SuiteConfig, rep: VerificationReport) -> None:
    i = 0
    for n, ks, l, d in PETKANTSCHIN_CASES:
        if n not in cfg.n:
            continue
        for name in ("one", "zonal"):
            pc = PetkantschinConfig(n, ks, l, d, integrand_by_name(name, n), cfg.samples, cfg.seed * 1000 + i)
            i += 1
            for c in petkantschin_verify(pc).checks:
                verdict = "pass" if c.details["z"] < cfg.tol else "fail"
                rep.add(c.name, c.estimate, c.standard_error, cfg.tol, verdict, **c.details)


# ---------------------------------------------------------------------------
# Membership and structure


def _membership_status(verdict: str, expect: str) -> str:
    if verdict == "inconclusive":
        return "inconclusive"
    return "pass" if verdict == expect else "fail"


def _membership(cfg: SuiteConfig, rep: VerificationReport) -> None:
    i = 0
    for n in cfg.n:
        for k in cfg.k:
            if k > n - 1:
                continue
            v = i_k_test(Ball(n), k, cfg.L, cfg.tol)
            c = c_constant(n, k)
            err = _rel(v.margin, c)
            ok = v.verdict == "positive" and err <= 1e-10
            rep.add(f"ball in I_{k}, n={n}: margin = c(n,k)", v.margin, 0.0, v.truncation_bound,
                    "pass" if ok else _membership_status(v.verdict, "positive"), c=c, rel_error=err)
            s = _stream(cfg, i)
            i += 1
            g = s.generator()
            bodies = [bp_sample(n, k, 3, g) for _ in range(cfg.count)]
            vs = i_k_test_batch(bodies, k, cfg.L, cfg.tol, diagnostics=False)
            counts = {x: sum(v.verdict == x for v in vs) for x in ("positive", "negative", "inconclusive")}
            status = "fail" if counts["negative"] else ("inconclusive" if counts["inconclusive"] else "pass")
            ratio = min(v.margin / v.truncation_bound for v in vs)
            rep.add(f"bp_sample bodies in I_{k}, n={n}", counts["positive"], 0.0, cfg.count, status,
                    min_margin_over_bound=ratio, **counts)
            res = bp_k_test(Ball(n), k, 8, cfg.samples, s.child(1))
            rep.add(f"ball BP_{k} residual, n={n}", res.residual, 0.0, 1e-8,
                    "pass" if res.converged and res.residual <= 1e-8 else "fail", nodes=res.node_count)
            res = bp_k_test(bodies[0], k, 8, cfg.samples, s.child(2))
            rep.add(f"bp_sample BP_{k} relative residual, n={n}", res.relative, 0.0, 1e-5,
                    "pass" if res.converged and res.relative <= 1e-5 else "inconclusive", nodes=res.node_count)
            # the cube of R^n lies in I_k exactly when k >= n - 3
            expect = "negative" if k < n - 3 else "positive"
            v = i_k_test(LpBall(n, np.inf), k, cfg.L, cfg.tol)
            rep.add(f"l_inf ball {'not ' if expect == 'negative' else ''}in I_{k}, n={n}", v.margin, 0.0,
                    v.truncation_bound, _membership_status(v.verdict, expect),
                    witness=[float(x) for x in v.witness], outcome=v.verdict)


def _sl_matrix(n: int, g) -> np.ndarray:
    """A random determinant-one matrix with singular values in [1/2, 2]."""
    s = np.exp(g.uniform(np.log(0.5), np.log(2.0), n))
    s /= np.prod(s) ** (1.0 / n)
    return haar_orthogonal(n, g) @ np.diag(s) @ haar_orthogonal(n, g)


def _structure(cfg: SuiteConfig, rep: VerificationReport) -> None:
    i = 0
    for n in cfg.n:
        levels = [(k1, k2) for k1 in cfg.k for k2 in (1, 2) if k1 + k2 <= n - 1]
        for k1, k2 in levels:
            s = _stream(cfg, i)
            i += 1
            g = s.generator()
            K1 = bp_sample(n, k1, 2, g)
            K2 = bp_sample(n, k2, 2, g)
            l = k1 + k2
            # m = l + 1 would be vacuous: every body in R^m is in I_(m-1)
            sub = structure_product_check(K1, k1, K2, k2, cfg.L, section_dim=min(n, l + 2), rng=s.child(1), seed=cfg.seed)
            rep.extend(sub, prefix=f"n={n} k1={k1} k2={k2}: ")
            # K2 = ball: rho_L = rho_K1^(k1/l)
            P = radial_product_power(K1, k1, Ball(n), k2)
            v = i_k_test(P, l, cfg.L, cfg.tol)
            rep.add(f"n={n}: rho^(k/l) body of a BP_{k1} body in I_{l}", v.margin, 0.0, v.truncation_bound,
                    _membership_status(v.verdict, "positive"))
        s = _stream(cfg, 1000 + n)
        g = s.generator()
        for k in cfg.k:
            if k > n - 1:
                continue
            base = [random_ellipsoid(n, g) for _ in range(cfg.count)] + [LpBall(n, np.inf)]
            images = [linear_image(B, _sl_matrix(n, g)) for B in base]
            before = i_k_test_batch(base, k, cfg.L, cfg.tol, diagnostics=False)
            after = i_k_test_batch(images, k, cfg.L, cfg.tol, diagnostics=False)
            same = sum(a.verdict == b.verdict for a, b in zip(before, after))
            decided = all(v.verdict != "inconclusive" for v in before + after)
            status = "fail" if same < len(base) else ("pass" if decided else "inconclusive")
            rep.add(f"SL(n) verdict invariance, n={n} k={k}", same, 0.0, len(base), status,
                    ellipsoids=cfg.count, with_l_inf=True,
                    verdicts=[v.verdict for v in before])


_RUNNERS = {
    "constants": _constants,
    "parseval": _parseval,
    "wedge": _wedge,
    "dualwedge": _dualwedge,
    "vk": _vk,
    "petkantschin": _petkantschin,
    "membership": _membership,
    "structure": _structure,
}


def run_suite(cfg: SuiteConfig) -> VerificationReport:
    """Run one suite; inconclusive checks stay inconclusive in the report."""
    cfg = cfg.resolved()
    rep = VerificationReport(cfg.suite, cfg.parameters(), cfg.seed)
    _RUNNERS[cfg.suite](cfg, rep)
    return rep


def write_report(rep: VerificationReport, fmt: str, out: str | None) -> bytes:
    data = emit_report(rep, fmt)
    if out:
        Path(out).write_bytes(data)
    return data

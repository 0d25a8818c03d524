"""Acceptance criteria, each at its stated tolerance, sample size and time budget.

Every test prints one PASS/FAIL line; the lines are repeated in the terminal
summary.  Run with ``pytest tests/test_acceptance.py -s`` to see them inline.
"""

import time
from math import pi

import numpy as np
import pytest

from intgeom.geometry import RngStream, haar_subspace
from intgeom.harmonics import random_spectrum, synthesize
from intgeom.homogeneous_fourier import c_constant
from intgeom.report import emit_report
from intgeom.starbody import gz_weak_error
from intgeom.suites import SUITES, SuiteConfig, run_suite

# certified negative value of the smoothed transform for the cube of R^5, k = 1, L = 12
LINF_MARGIN = -73.22293642782162


def _finish(record, number, title, ok, detail, elapsed, budget):
    ok = ok and (budget is None or elapsed < budget)
    limit = "" if budget is None else f" (budget {budget:g} s)"
    record(number, f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}: {detail}; {elapsed:.1f} s{limit}")
    assert ok, detail
    return ok


def _timed_suite(name, **kw):
    t = time.perf_counter()
    rep = run_suite(SuiteConfig(name, **kw))
    return rep, time.perf_counter() - t


def _checks(rep, prefix):
    return [c for c in rep.checks if c.name.startswith(prefix)]


def _worst(checks):
    return max(c.estimate for c in checks)


def test_criterion_01_constant_identity(acceptance_record):
    t = time.perf_counter()
    worst = 0.0
    for n in range(2, 11):
        for p in np.linspace(0, n, 52)[1:-1]:
            worst = max(worst, abs(c_constant(n, p) * c_constant(n, n - p) / (2 * pi) ** n - 1))
    dt = time.perf_counter() - t
    _finish(acceptance_record, 1, "c(n,p) c(n,n-p) = (2 pi)^n", worst <= 1e-12,
            f"max rel error {worst:.2e} over n=2..10, 50 p each", dt, 1.0)


def test_criterion_02_grassmann_symmetry(acceptance_record):
    rep, dt = _timed_suite("constants")
    checks = _checks(rep, "|G(a,b)|")
    worst = _worst(checks)
    ok = len(checks) == 12 and all(c.verdict == "pass" for c in checks) and worst <= 1e-12
    _finish(acceptance_record, 2, "|G(a,b)| = |G(a,a-b)|", ok, f"max rel error {worst:.2e} for a <= 12", dt, 1.0)


def test_criterion_03_multiplier_identities(acceptance_record):
    rep, dt = _timed_suite("constants")
    prod = _checks(rep, "c_j^(-p)")
    oracle = _checks(rep, "multiplier oracle")
    worst_p, worst_o = _worst(prod), _worst(oracle)
    ok = len(prod) == 7 and len(oracle) == 20 and worst_p <= 1e-10 and worst_o <= 1e-8
    _finish(acceptance_record, 3, "multiplier product identity and oracle", ok,
            f"product max rel {worst_p:.2e} (n<=8, even j<=16), oracle max rel {worst_o:.2e} over 20 triples", dt, 30.0)


def test_criterion_04_parseval(acceptance_record):
    rep, dt = _timed_suite("parseval")
    worst = _worst(rep.checks)
    ok = len(rep.checks) == 50 and rep.verdict == "pass" and worst <= 1e-6
    _finish(acceptance_record, 4, "spherical Parseval", ok, f"max residual {worst:.2e} over 50 pairs, L=8", dt, 10.0)


def test_criterion_05_wedge_radon(acceptance_record):
    rep, dt = _timed_suite("wedge")
    worst = _worst(rep.checks)
    ok = len(rep.checks) == 6 and rep.verdict == "pass" and worst <= 1e-4
    _finish(acceptance_record, 5, "R_(n-k) E_(-k)^ f = c(n,k) R_k f", ok,
            f"max residual {worst:.2e} over 20 subspaces per (n,k)", dt, 60.0)


def test_criterion_06_dual_wedge(acceptance_record):
    rep, dt = _timed_suite("dualwedge")
    zs = [c.details["max_z"] for c in rep.checks]
    pairs = sorted({tuple(int(x.split("=")[1]) for x in c.name.split(", ")[1].split()[:2]) for c in rep.checks})
    ok = rep.verdict == "pass" and max(zs) < 3 and pairs == [(4, 1), (4, 2), (5, 2)]
    _finish(acceptance_record, 6, "dual wedge identity", ok,
            f"max z {max(zs):.2f} at 1e5 samples, {len(rep.checks)} (n,m,g) cases", dt, 120.0)


def test_criterion_07_vk(acceptance_record):
    rep, dt = _timed_suite("vk")
    zs = [c.details["z"] for c in rep.checks]
    ok = rep.verdict == "pass" and max(zs) < 3 and len(rep.checks) == 12
    _finish(acceptance_record, 7, "V_k self-adjoint and V_(n-k) = I V_k I", ok,
            f"max z {max(zs):.2f} at 1e5 samples over {len(rep.checks)} checks", dt, 120.0)


def test_criterion_08_petkantschin(acceptance_record):
    rep, dt = _timed_suite("petkantschin")
    zs = [c.details["z"] for c in rep.checks]
    ok = rep.verdict == "pass" and len(rep.checks) == 10 and max(zs) < 3
    _finish(acceptance_record, 8, "Grassmannian integration formula", ok,
            f"max z {max(zs):.2f} at 1e6 samples, 5 configurations x 2 integrands", dt, 300.0)


def test_criterion_09_membership(acceptance_record):
    rep, dt = _timed_suite("membership")
    ball = _checks(rep, "ball in I_")
    sample = _checks(rep, "bp_sample bodies")
    (cube,) = _checks(rep, "l_inf ball not in I_1")
    ball_ok = all(c.verdict == "pass" and c.details["rel_error"] <= 1e-10 for c in ball)
    sample_ok = all(c.details["positive"] == 100 for c in sample) and len(sample) == 2
    pin = abs(cube.estimate / LINF_MARGIN - 1)
    cube_ok = cube.verdict == "pass" and cube.estimate < -cube.tolerance and pin <= 1e-6
    ok = ball_ok and sample_ok and cube_ok and rep.verdict == "pass"
    _finish(acceptance_record, 9, "membership suite", ok,
            f"ball margins = c(n,k); {sum(c.details['positive'] for c in sample)}/200 samples positive; "
            f"cube margin {cube.estimate:.6f} < -{cube.tolerance:.4f} (pin rel {pin:.1e})", dt, 300.0)


def test_criterion_10_structure(acceptance_record):
    rep, dt = _timed_suite("structure")
    products = _checks(rep, "n=5 k1=")
    sl = _checks(rep, "SL(n)")
    sections = [c for c in products if "section dim" in c.name]
    ok = rep.verdict == "pass" and sections and all(c.estimate == c.tolerance == 21 for c in sl)
    _finish(acceptance_record, 10, "structure harness", ok,
            f"{len(products)} product/section checks, SL(n) verdicts unchanged on 20 ellipsoids + cube", dt, 300.0)


def test_criterion_11_gz_approximant(acceptance_record):
    # read per function: each of the 10 errors must fall strictly along eps
    t = time.perf_counter()
    eps = (0.3, 0.1, 0.03)
    bad, sup = [], {}
    for n, k in ((4, 1), (4, 2)):
        g = RngStream(11, k).generator()
        F = haar_subspace(n, n - k, g)
        table = []
        for i in range(10):
            f = synthesize(random_spectrum(n, 8, g))
            errs = [gz_weak_error(F, e, k, f) for e in eps]
            table.append(errs)
            if not errs[0] > errs[1] > errs[2]:
                bad.append(f"(n,k)=({n},{k}) f#{i}: " + ", ".join(f"{e:.3e}" for e in errs))
        sup[(n, k)] = np.max(table, axis=0)
    dt = time.perf_counter() - t
    sup_text = "; ".join(f"({n},{k}) " + ", ".join(f"{e:.3e}" for e in v) for (n, k), v in sup.items())
    detail = f"{20 - len(bad)}/20 functions strictly decreasing over eps 0.3, 0.1, 0.03"
    if bad:
        detail += " [not monotone: " + "; ".join(bad) + "]"
    detail += f"; sup over the 10 functions: {sup_text}"
    _finish(acceptance_record, 11, "GZ weak error decreases", not bad, detail, dt, 60.0)


REPRO = {
    "constants": {},
    "parseval": dict(count=10),
    "wedge": dict(count=5),
    "dualwedge": dict(n=(4,), k=(1,), samples=20_000),
    "vk": dict(n=(4,), samples=20_000, count=1),
    "petkantschin": dict(n=(3, 4), samples=50_000),
    "membership": dict(n=(4,), k=(1,), samples=1000, count=10),
    "structure": dict(n=(4,), k=(1,), count=3),
}


def test_criterion_12_reproducibility(acceptance_record):
    t = time.perf_counter()
    differ = []
    for name in SUITES:
        cfg = SuiteConfig(name, seed=7, **REPRO[name])
        a, b = run_suite(cfg), run_suite(cfg)
        for fmt in ("json", "csv"):
            if emit_report(a, fmt) != emit_report(b, fmt):
                differ.append(f"{name}/{fmt}")
    dt = time.perf_counter() - t
    _finish(acceptance_record, 12, "byte-identical reruns", not differ,
            f"{2 * len(SUITES) - len(differ)}/{2 * len(SUITES)} suite/format pairs identical", dt, None)

import pytest

from intgeom.report import emit_report
from intgeom.suites import DEFAULTS, SUITES, SuiteConfig, SuiteError, run_suite, write_report

SMALL = {
    "constants": dict(n=(3, 4), count=5),
    "parseval": dict(n=(3, 4), L=4, count=4),
    "wedge": dict(n=(3, 4), k=(1,), L=4, count=3),
    "dualwedge": dict(n=(4,), k=(1,), L=6, samples=40_000, count=2),
    "vk": dict(n=(4,), k=(1,), samples=20_000, count=1),
    "petkantschin": dict(n=(3,), samples=20_000),
    "membership": dict(n=(4,), k=(1,), L=8, samples=1500, count=5),
    "structure": dict(n=(4,), k=(1,), L=8, count=2),
}


def test_every_suite_has_defaults_and_a_small_config():
    assert set(DEFAULTS) == set(SUITES) == set(SMALL)


@pytest.mark.parametrize("suite", SUITES)
def test_small_runs_pass_and_repeat(suite):
    cfg = SuiteConfig(suite, seed=4, **SMALL[suite])
    a = run_suite(cfg)
    assert a.checks
    assert a.verdict == "pass", [(c.name, c.verdict, c.estimate) for c in a.checks if c.verdict != "pass"]
    if suite in ("constants", "parseval", "wedge", "petkantschin"):
        assert emit_report(a, "csv") == emit_report(run_suite(cfg), "csv")


def test_resolved_fills_defaults():
    cfg = SuiteConfig("wedge").resolved()
    assert cfg.n == (3, 4, 5) and cfg.k == (1, 2) and cfg.tol == DEFAULTS["wedge"]["tol"]
    assert SuiteConfig("wedge", n=6).resolved().n == (6,)


@pytest.mark.parametrize(
    "kwargs",
    [dict(suite="nope"), dict(suite="wedge", n=(1,)), dict(suite="wedge", L=3), dict(suite="vk", samples=0),
     dict(suite="vk", seed=-1), dict(suite="parseval", tol=-1.0), dict(suite="wedge", k=(0,))],
)
def test_invalid_configs(kwargs):
    with pytest.raises(SuiteError):
        SuiteConfig(**kwargs)


def test_config_file_and_overrides(tmp_path):
    p = tmp_path / "s.ini"
    p.write_text("[suite]\nsuite = wedge\nn = 3, 4\nL = 4  # band limit\ncount = 2\nseed = 9\n")
    cfg = SuiteConfig.from_file(p, count=1)
    assert (cfg.suite, cfg.n, cfg.L, cfg.count, cfg.seed) == ("wedge", (3, 4), 4, 1, 9)
    bad = tmp_path / "b.ini"
    bad.write_text("[suite]\nsuite = wedge\ncolour = red\n")
    with pytest.raises(SuiteError):
        SuiteConfig.from_file(bad)
    with pytest.raises(SuiteError):
        SuiteConfig.from_file(tmp_path / "missing.ini")


def test_write_report(tmp_path):
    rep = run_suite(SuiteConfig("constants", n=(3,), count=2))
    out = tmp_path / "r.json"
    data = write_report(rep, "json", str(out))
    assert out.read_bytes() == data

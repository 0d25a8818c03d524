from math import isclose, pi

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import intgeom.petkantschin as pk
from intgeom.petkantschin import (
    Integrand,
    PetkantschinConfig,
    default_axis,
    delta_constant,
    integrand_by_name,
    lhs_estimate,
    rhs_estimate,
    verify,
)


def test_delta_constant_small_cases():
    # |G(3,1)| |G(2,1)|^2 / |G(3,2)|^2 = 2 pi * pi^2 / (2 pi)^2
    assert isclose(delta_constant(3, [1, 1], 2), pi / 2, rel_tol=1e-14)
    # |G(4,2)| |G(2,1)|^2 / |G(4,3)|^2 = 2 pi^2 * pi^2 / pi^4
    assert isclose(delta_constant(4, [1, 1], 2), 2.0, rel_tol=1e-14)


@given(st.integers(2, 9).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, n - 1))).flatmap(
    lambda nd: st.tuples(st.just(nd), st.integers(1, nd[0] - nd[1]))))
def test_single_codimension_constant_is_one(ndl):
    (n, d), l = ndl
    assert isclose(delta_constant(n, [l], l, d), 1.0, rel_tol=1e-12)


def test_pole_reduces_to_lower_dimension():
    assert isclose(delta_constant(5, [1, 1], 2, 1), delta_constant(4, [1, 1], 2, 0), rel_tol=1e-14)


def test_constant_integrand_gives_exact_one():
    cfg = PetkantschinConfig(4, (1, 1), 2, samples=1000)
    est = lhs_estimate(cfg)
    assert est.mean == 1.0 and est.stderr == 0.0


def test_omega_square_against_closed_form():
    # two Haar lines in R^4: E sin^2 = 1 - 1/4
    cfg = PetkantschinConfig(4, (1, 1), 2, integrand=Integrand.omega_power(2), samples=200_000, seed=3)
    assert lhs_estimate(cfg).z_against(0.75) < 4.0


@pytest.mark.parametrize(
    "n,ks,d,name",
    [(3, (1, 1), 0, "one"), (4, (1, 1), 1, "zonal"), (5, (1, 2), 0, "omega2"), (5, (1, 1, 1), 1, "one")],
)
def test_formula_holds(n, ks, d, name):
    cfg = PetkantschinConfig(n, ks, sum(ks), d, integrand_by_name(name, n), samples=200_000, seed=1)
    rep = verify(cfg)
    (check,) = rep.checks
    assert check.verdict == "pass", check
    assert not check.details["suspect_bug"]


def test_single_codimension_sides_coincide_in_law():
    # with r = 1 both samplers draw E^perp Haar in D^perp and Delta = 1
    cfg = PetkantschinConfig(5, (2,), 2, 1, Integrand.zonal_product(default_axis(5)), samples=100_000)
    assert lhs_estimate(cfg).z_against(rhs_estimate(cfg)) < 4.0


def test_wrong_constant_is_flagged(monkeypatch):
    real = pk.delta_constant
    monkeypatch.setattr(pk, "delta_constant", lambda *a: 1.2 * real(*a))
    rep = verify(PetkantschinConfig(3, (1, 1), 2, samples=200_000, seed=2))
    (check,) = rep.checks
    assert check.verdict == "fail"
    assert check.details["suspect_bug"]
    assert rep.exit_code == 2


def test_runs_are_reproducible():
    cfg = PetkantschinConfig(4, (1, 1), 2, integrand=integrand_by_name("zonal", 4), samples=20_000, seed=5)
    a, b = rhs_estimate(cfg), rhs_estimate(cfg)
    assert a == b
    other = PetkantschinConfig(4, (1, 1), 2, integrand=integrand_by_name("zonal", 4), samples=20_000, seed=6)
    assert rhs_estimate(other).mean != a.mean


def test_zonal_integrand_is_invariant_under_frame_change():
    f = Integrand.zonal_product(default_axis(4))
    g = np.random.default_rng(0)
    N = g.standard_normal((5, 4, 2))
    N = np.linalg.qr(N)[0]
    R = np.linalg.qr(g.standard_normal((2, 2)))[0]
    assert np.allclose(f([N]), f([N @ R]))


@pytest.mark.parametrize(
    "args",
    [
        dict(n=4, k_list=(1, 1), l=3),
        dict(n=4, k_list=(2, 2), l=4, d=1),
        dict(n=4, k_list=(0, 1), l=1),
        dict(n=4, k_list=(), l=0),
        dict(n=4, k_list=(1,), l=1, d=4),
        dict(n=4, k_list=(1, 1), l=2, samples=100),
    ],
)
def test_invalid_configurations(args):
    with pytest.raises(ValueError):
        PetkantschinConfig(**args)


def test_unknown_integrand_name():
    with pytest.raises(ValueError):
        integrand_by_name("cubic", 4)


def test_omega_square_cross_estimator_in_three_dimensions():
    cfg = PetkantschinConfig(3, (1, 1), 2, integrand=Integrand.omega_power(2), samples=200_000, seed=8)
    assert lhs_estimate(cfg).z_against(rhs_estimate(cfg)) < 3.0
    # E sin^2 for two Haar lines in R^3
    assert lhs_estimate(cfg).z_against(2 / 3) < 4.0

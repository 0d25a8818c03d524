import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from intgeom.nnls import kkt_violation, solve_nnls


@given(st.integers(0, 10**6))
@settings(max_examples=30, deadline=None)
def test_feasible_systems_are_solved_exactly(seed):
    g = np.random.default_rng(seed)
    A = g.standard_normal((30, 12))
    w = np.abs(g.standard_normal(12)) * (g.random(12) < 0.5)
    res = solve_nnls(A, A @ w)
    assert res.converged
    assert res.residual < 1e-10 * max(1.0, np.linalg.norm(A @ w))
    assert np.all(res.weights >= 0)


def test_infeasible_target_leaves_positive_residual():
    # b points away from the cone spanned by non-negative columns
    A = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
    b = np.array([-1.0, -1.0, -2.0])
    res = solve_nnls(A, b)
    assert res.converged
    assert np.allclose(res.weights, 0.0)
    assert np.isclose(res.residual, np.linalg.norm(b))


def test_kkt_violation_detects_non_minimizer():
    g = np.random.default_rng(0)
    A = g.standard_normal((20, 6))
    b = g.standard_normal(20)
    res = solve_nnls(A, b)
    assert kkt_violation(A, b, res.weights) <= 1e-10
    assert kkt_violation(A, b, res.weights + 0.5) > 1e-3


def test_iteration_cap_is_reported():
    g = np.random.default_rng(1)
    A = g.standard_normal((40, 30))
    b = A @ np.abs(g.standard_normal(30))
    res = solve_nnls(A, b, maxiter=1)
    assert not res.converged
    assert res.message

from math import isclose, pi

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from intgeom.geometry import (
    RngStream,
    Subspace,
    ball_volume,
    complement_frame,
    fiber_frames,
    grassmann_volume,
    haar_frames,
    haar_in_fiber,
    haar_orthogonal,
    haar_subspace,
    omega,
    omega_frames,
    parallelepiped_volume,
    perp,
    principal_angles,
    sphere_area,
)


def test_sphere_and_ball_closed_forms():
    assert isclose(sphere_area(0), 2.0)
    assert isclose(sphere_area(1), 2 * pi)
    assert isclose(sphere_area(2), 4 * pi)
    assert isclose(ball_volume(2), pi)
    assert isclose(ball_volume(3), 4 * pi / 3)


@given(st.integers(1, 20))
def test_sphere_area_is_derivative_of_ball_volume(m):
    # |S^{m-1}| = m |B_m|
    assert isclose(sphere_area(m - 1), m * ball_volume(m), rel_tol=1e-13)


def test_grassmann_volume_small_cases():
    # G(3,1) is RP^2 with half the area of S^2
    assert isclose(grassmann_volume(3, 1), 2 * pi)
    assert isclose(grassmann_volume(2, 1), pi)
    assert grassmann_volume(5, 0) == 1.0
    assert isclose(grassmann_volume(4, 2), pi**2 * 2)


@given(st.integers(1, 12).flatmap(lambda a: st.tuples(st.just(a), st.integers(0, a))))
def test_grassmann_volume_symmetry(ab):
    a, b = ab
    assert isclose(grassmann_volume(a, b), grassmann_volume(a, a - b), rel_tol=1e-12)


def test_grassmann_volume_rejects_bad_input():
    with pytest.raises(ValueError):
        grassmann_volume(3, 4)


def test_rng_stream_reproducible_and_children_distinct():
    a = RngStream(7, 3).generator().standard_normal(5)
    b = RngStream(7, 3).generator().standard_normal(5)
    c = RngStream(7, 4).generator().standard_normal(5)
    assert np.array_equal(a, b)
    assert not np.allclose(a, c)
    kids = {RngStream(7).child(i).stream_id for i in range(50)}
    assert len(kids) == 50


@given(st.integers(2, 7).flatmap(lambda n: st.tuples(st.just(n), st.integers(1, n))), st.integers(0, 10**6))
@settings(max_examples=40)
def test_haar_frames_are_orthonormal(nm, seed):
    n, m = nm
    F = haar_frames(n, m, 8, seed)
    gram = np.swapaxes(F, 1, 2) @ F
    assert np.allclose(gram, np.eye(m), atol=1e-12)


def test_haar_projection_moment():
    # E |P_E u|^2 = m / n for Haar E in G(n, m)
    n, m = 5, 2
    F = haar_frames(n, m, 200_000, RngStream(1))
    s = np.sum(F[:, 0, :] ** 2, axis=1)
    se = s.std() / np.sqrt(len(s))
    assert abs(s.mean() - m / n) < 4 * se


def test_haar_orthogonal_is_orthogonal():
    Q = haar_orthogonal(6, 3)
    assert np.allclose(Q @ Q.T, np.eye(6), atol=1e-12)


def test_complement_frame_on_stacks():
    F = haar_frames(6, 2, 10, 0)
    C = complement_frame(F)
    assert C.shape == (10, 6, 4)
    full = np.concatenate([F, C], axis=2)
    assert np.allclose(np.swapaxes(full, 1, 2) @ full, np.eye(6), atol=1e-12)


def test_fiber_frames_contain_base():
    base = haar_subspace(6, 2, 4).frame
    E = fiber_frames(base, 4, size=50, rng=5)
    P = np.einsum("bij,bkj->bik", E, E)
    assert np.allclose(P @ base, base, atol=1e-12)
    assert np.allclose(np.swapaxes(E, 1, 2) @ E, np.eye(4), atol=1e-12)


def test_haar_in_fiber_subspace_relation():
    F = haar_subspace(5, 2, 11)
    E = haar_in_fiber(F, 3, 12)
    assert E.contains(F)
    assert not F.contains(E)


def test_subspace_frame_invariance():
    E = haar_subspace(5, 3, 2)
    R = E.rebased(9)
    assert E.equals(R)
    assert np.allclose(E.projector(), R.projector(), atol=1e-12)
    assert E.distance(R) < 1e-12


def test_subspace_span_rejects_dependent_vectors():
    with pytest.raises(ValueError):
        Subspace.span([[1, 0, 0], [2, 0, 0]])


def test_perp_and_principal_angles():
    E = Subspace.coordinate(4, [0, 1])
    assert perp(E).equals(Subspace.coordinate(4, [2, 3]))
    theta = 0.3
    F = Subspace.span([[np.cos(theta), 0, np.sin(theta), 0], [0, 1, 0, 0]])
    assert np.allclose(principal_angles(E, F), [0.0, theta], atol=1e-12)


@given(st.integers(0, 10**6))
@settings(max_examples=30)
def test_parallelepiped_volume_matches_determinant(seed):
    A = np.random.default_rng(seed).standard_normal((4, 4))
    assert isclose(parallelepiped_volume(A), abs(np.linalg.det(A)), rel_tol=1e-9, abs_tol=1e-12)


@given(st.integers(0, 10**6))
@settings(max_examples=30)
def test_omega_is_basis_independent_and_bounded(seed):
    g = np.random.default_rng(seed)
    Es = [haar_subspace(6, 5, g), haar_subspace(6, 4, g)]
    w = omega(Es)
    w2 = omega([E.rebased(g) for E in Es])
    assert 0.0 <= w <= 1.0 + 1e-12
    assert isclose(w, w2, rel_tol=1e-9, abs_tol=1e-12)


def test_omega_extremes():
    # orthogonal complements span a unit cube; coincident complements collapse
    assert isclose(omega([Subspace.coordinate(3, [1, 2]), Subspace.coordinate(3, [0, 2])]), 1.0)
    E = Subspace.coordinate(3, [1, 2])
    assert omega([E, E]) < 1e-7
    n1 = np.array([[1.0], [0.0], [0.0]])
    n2 = np.array([[np.cos(0.4)], [np.sin(0.4)], [0.0]])
    assert isclose(float(omega_frames([n1, n2])), np.sin(0.4), rel_tol=1e-12)


def test_omega_rejects_overfull_codimension():
    with pytest.raises(ValueError):
        omega([Subspace.coordinate(3, [0]), Subspace.coordinate(3, [1])])


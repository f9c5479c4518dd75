import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from enskog_rigid.geometry import Domain
from enskog_rigid.kinetics import (
    CollisionPair,
    DirectSpec,
    collide,
    collision_integral_direct,
    collision_integral_reduced,
    conservation_residuals,
    density_moment_vector,
    summational_invariant_residual,
)
from enskog_rigid.model import DensityField, MaxwellianState, RigidMotion, flow_velocity
from enskog_rigid.threads import THREADS_ENV, thread_count

vec = st.tuples(*[st.floats(-5, 5)] * 3).map(np.array)


def unit(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


def growing(r):
    return 0.1 * np.exp(0.0025 * np.asarray(r) ** 2)


def test_head_on_exchange():
    xp, xsp = collide([0, 0, 0], [1, 0, 0], [1, 0, 0])
    np.testing.assert_array_equal(xp, [1, 0, 0])
    np.testing.assert_array_equal(xsp, [0, 0, 0])


def test_grazing_pair_unchanged():
    xi, xs = np.array([0.3, 1.0, -2.0]), np.array([0.3, -4.0, 5.0])
    xp, xsp = collide(xi, xs, [1.0, 0.0, 0.0])
    np.testing.assert_array_equal(xp, xi)
    np.testing.assert_array_equal(xsp, xs)
    for r in conservation_residuals([2.0, 1.0, 0.0], [1.0, 0.0, 0.0], xi, xs):
        assert np.all(np.asarray(r) == 0.0)


def test_axial_example_residuals_vanish():
    dp, dE, dL = conservation_residuals([1.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, 0.0], [0.0, 0.0, 2.0])
    assert np.all(dp == 0) and dE == 0 and np.all(dL == 0)


def test_pair_record():
    pair = CollisionPair(np.zeros(3), np.array([0.0, 0.0, 2.0]), np.array([0.0, 0.0, 1.0]))
    assert pair.V_alpha == 2.0
    with pytest.raises(ValueError):
        CollisionPair(np.zeros(3), np.zeros(3), np.array([1.0, 1.0, 0.0]))


def test_random_conservation():
    rng = np.random.default_rng(1)
    n = 100_000
    a = rng.standard_normal((n, 3))
    a /= np.linalg.norm(a, axis=1, keepdims=True)
    xi = rng.standard_normal((n, 3))
    xs = rng.standard_normal((n, 3))
    X = rng.uniform(-10, 10, (n, 3))
    xp, xsp = collide(xi, xs, a)
    assert np.max(np.abs(xp + xsp - xi - xs)) <= 1e-14
    assert np.max(np.abs(np.sum(xp**2 + xsp**2 - xi**2 - xs**2, axis=1))) <= 1e-13
    for r in conservation_residuals(X, a, xi, xs):
        assert np.max(np.abs(r)) <= 1e-13


@settings(max_examples=300, deadline=None)
@given(vec, vec, vec)
def test_collide_involution(xi, xs, a):
    if np.linalg.norm(a) < 1e-2:
        return
    a = unit(a)
    xp, xsp = collide(xi, xs, a)
    back, back_s = collide(xp, xsp, a)
    np.testing.assert_allclose(back, xi, atol=1e-14 * 30)
    np.testing.assert_allclose(back_s, xs, atol=1e-14 * 30)


def _state(eta=growing, domain=Domain.unbounded(), omega=0.05, u=0.2, temperature=None):
    return MaxwellianState(RigidMotion(u, omega), DensityField(eta, domain), temperature)


def _random_pairs(rng, n, state):
    X = rng.uniform(-8, 8, (n, 3))
    a = rng.standard_normal((n, 3))
    a /= np.linalg.norm(a, axis=1, keepdims=True)
    xi = flow_velocity(state.motion, X) + rng.standard_normal((n, 3)) / math.sqrt(2)
    xs = flow_velocity(state.motion, X - a) + rng.standard_normal((n, 3)) / math.sqrt(2)
    return X, a, xi, xs


def test_summational_invariant_holds_for_any_density():
    state = _state(eta=lambda r: 0.2 + 0.1 * np.sin(r) ** 2)
    X, a, xi, xs = _random_pairs(np.random.default_rng(2), 100_000, state)
    assert np.max(np.abs(summational_invariant_residual(state, X, a, xi, xs))) <= 1e-12


def test_summational_invariant_global_maxwellian():
    state = _state(eta=lambda r: np.full(np.shape(r), 0.3), omega=0.0, u=0.0)
    X, a, xi, xs = _random_pairs(np.random.default_rng(3), 10_000, state)
    assert np.max(np.abs(summational_invariant_residual(state, X, a, xi, xs))) <= 1e-14


def test_summational_invariant_negative_control():
    # a temperature gradient breaks the invariant; the check must notice
    state = _state(temperature=lambda X: 1.0 + 0.05 * np.asarray(X)[..., 0])
    X, a, xi, xs = _random_pairs(np.random.default_rng(4), 10_000, state)
    X[:, 0] = np.clip(X[:, 0], -5, 5)
    assert np.max(np.abs(summational_invariant_residual(state, X, a, xi, xs))) > 1e-3


def test_reduced_vanishes_at_flow_velocity():
    state = _state()
    X = np.array([10.0, 0.0, 0.0])
    assert collision_integral_reduced(state, X, flow_velocity(state.motion, X)) == 0.0


def test_reduced_vanishes_for_uniform_unbounded():
    state = _state(eta=lambda r: np.full(np.shape(r), 0.2))
    X = np.array([3.0, 4.0, 1.0])
    for c in ([1, 0, 0], [0.3, -2, 1]):
        assert abs(collision_integral_reduced(state, X, flow_velocity(state.motion, X) + c)) < 1e-15


def test_moment_vector_is_radial():
    state = _state(domain=Domain.cylinder(10.0))
    M = density_moment_vector(state, np.array([6.0, 7.0, 1.0]))
    e_P = np.array([6.0, 7.0, 0.0]) / math.hypot(6, 7)
    assert abs(np.dot(M, [-e_P[1], e_P[0], 0.0])) < 1e-12
    assert abs(M[2]) < 1e-12


SPEC = DirectSpec(12, 24, 12, 16)


def test_direct_vanishes_at_flow_velocity():
    state = _state()
    X = np.array([10.0, 0.0, 0.0])
    assert abs(collision_integral_direct(state, X, flow_velocity(state.motion, X), SPEC)) < 1e-6


def test_direct_vanishes_in_global_equilibrium():
    state = _state(eta=lambda r: np.full(np.shape(r), 0.2), omega=0.0, u=0.0)
    for c in ([0.5, 0.0, 0.0], [-0.3, 1.0, 0.2]):
        assert abs(collision_integral_direct(state, np.array([2.0, 1.0, 0.0]), np.array(c), SPEC)) < 1e-6


@pytest.mark.parametrize(
    "domain, X",
    [
        (Domain.unbounded(), (10.0, 0.0, 0.0)),
        (Domain.cylinder(10.0), (9.8, 0.5, -1.0)),
        (Domain.sphere(10.0), (0.0, 6.0, 7.9)),
    ],
)
def test_direct_matches_reduced(domain, X):
    omega = 0.0 if domain.spherical else 0.05
    state = _state(domain=domain, omega=omega)
    X = np.array(X)
    xi = flow_velocity(state.motion, X) + np.array([1.0, 0.6, 0.8])
    direct = collision_integral_direct(state, X, xi, SPEC)
    reduced = collision_integral_reduced(state, X, xi)
    scale = 6 / math.pi * 0.1**2 * math.pi**-1.5
    assert abs(direct - reduced) <= 5e-3 * max(abs(direct), scale)
    assert abs(direct / reduced - 1) <= 5e-3


def test_direct_result_independent_of_threads(monkeypatch):
    state = _state(domain=Domain.cylinder(10.0))
    X = np.array([9.5, 0.0, 0.0])
    xi = flow_velocity(state.motion, X) + np.array([0.2, 0.7, -0.4])
    spec = DirectSpec(16, 32, 8, 8)
    monkeypatch.setenv(THREADS_ENV, "1")
    one = collision_integral_direct(state, X, xi, spec)
    monkeypatch.setenv(THREADS_ENV, "4")
    four = collision_integral_direct(state, X, xi, spec)
    assert one == four


def test_thread_count_parsing(monkeypatch):
    monkeypatch.setenv(THREADS_ENV, "3")
    assert thread_count() == 3
    for raw in ("0", "", "many", "-2"):
        monkeypatch.setenv(THREADS_ENV, raw)
        assert thread_count() >= 1

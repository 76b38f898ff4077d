"""Structural invariants of the dynamics under reflection and rotation."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from berthplan import dynamics
from berthplan.ship import default_ship

from .helpers import mirror_actuators, mirror_states, random_actuators, random_states

SHIP = default_ship()

finite = dict(allow_nan=False, allow_infinity=False)

state_strategy = st.tuples(
    st.floats(-80, 80, **finite), st.floats(-40, 40, **finite),
    st.floats(-2 * np.pi, 2 * np.pi, **finite),
    st.floats(-0.3, 0.8, **finite), st.floats(-0.4, 0.4, **finite),
    st.floats(-0.3, 0.3, **finite))

act_strategy = st.tuples(
    st.floats(-0.78, 0.26, **finite), st.floats(-0.26, 0.78, **finite),
    st.floats(0.0, 10.0, **finite), st.floats(-6.0, 6.0, **finite))

wind_strategy = st.tuples(st.floats(-np.pi, np.pi, **finite),
                          st.floats(0.0, 1.0, **finite))


def mirror_derivative(xdot):
    """How the state derivative transforms under center-plane reflection."""
    out = np.asarray(xdot).copy()
    out[..., 1] *= -1.0
    out[..., 2] *= -1.0
    out[..., 4] *= -1.0
    out[..., 5] *= -1.0
    return out


@settings(max_examples=150, deadline=None)
@given(state_strategy, act_strategy, wind_strategy)
def test_mirror_conjugation(state, act, wind):
    x = np.array(state)
    a = np.array(act)
    gamma, speed = wind
    direct = dynamics.derivative_arrays(
        mirror_states(x), mirror_actuators(a), -gamma, speed, SHIP)
    conjugated = mirror_derivative(
        dynamics.derivative_arrays(x, a, gamma, speed, SHIP))
    assert np.allclose(direct, conjugated, rtol=1e-9, atol=1e-12)


@settings(max_examples=100, deadline=None)
@given(state_strategy, act_strategy, wind_strategy,
       st.floats(-np.pi, np.pi, **finite))
def test_heading_rotation_covariance(state, act, wind, rot):
    """Rotating heading and wind direction together rotates the earth-frame
    velocity and leaves body-frame accelerations unchanged."""
    x = np.array(state)
    a = np.array(act)
    gamma, speed = wind
    base = dynamics.derivative_arrays(x, a, gamma, speed, SHIP)
    x_rot = x.copy()
    x_rot[2] += rot
    rotated = dynamics.derivative_arrays(x_rot, a, gamma + rot, speed, SHIP)
    c, s = np.cos(rot), np.sin(rot)
    assert rotated[0] == pytest.approx(c * base[0] - s * base[1],
                                       rel=1e-9, abs=1e-12)
    assert rotated[1] == pytest.approx(s * base[0] + c * base[1],
                                       rel=1e-9, abs=1e-12)
    assert np.allclose(rotated[2:], base[2:], rtol=1e-9, atol=1e-11)


@settings(max_examples=100, deadline=None)
@given(state_strategy)
def test_ground_speed_preserved(state):
    x = np.array(state)
    a = np.zeros(4)
    xdot = dynamics.derivative_arrays(x, a, 0.0, 0.0, SHIP)
    assert np.hypot(xdot[0], xdot[1]) == pytest.approx(
        np.hypot(x[3], x[4]), rel=1e-12, abs=1e-14)


@settings(max_examples=100, deadline=None)
@given(act_strategy, act_strategy, st.floats(1e-3, 10.0, **finite))
def test_actuator_step_contraction(act, cmd, dt):
    """The gap to the command never grows and closes at the full rate."""
    a = np.array(act)
    c = np.array(cmd)
    nxt = dynamics.actuator_step_arrays(a, c, dt, SHIP)
    gap_before = np.abs(c - a)
    gap_after = np.abs(c - nxt)
    assert np.all(gap_after <= gap_before + 1e-15)
    rates = np.array([SHIP.delta_rate, SHIP.delta_rate,
                      SHIP.n_prop_rate, SHIP.n_bt_rate])
    expected = np.maximum(gap_before - rates * dt, 0.0)
    assert np.allclose(gap_after, expected, atol=1e-12)


def test_mirror_holds_along_trajectories(rng):
    """Reflection symmetry composes through the integrator, not just the
    derivative."""
    xs = random_states(rng, 20)
    acts = random_actuators(rng, 20, SHIP)
    cmds = random_actuators(rng, 20, SHIP)
    for x, a, c in zip(xs, acts, cmds):
        forward = x.copy()
        fa = a.copy()
        for _ in range(10):
            forward, fa = dynamics.rk4_step_arrays(forward, fa, c, 0.4, 0.6,
                                                   0.5, SHIP)
        mirrored = mirror_states(x)
        ma = mirror_actuators(a)
        mc = mirror_actuators(c)
        for _ in range(10):
            mirrored, ma = dynamics.rk4_step_arrays(mirrored, ma, mc, -0.4,
                                                    0.6, 0.5, SHIP)
        assert np.allclose(mirrored, mirror_states(forward), rtol=1e-9,
                           atol=1e-10)
        assert np.allclose(ma, mirror_actuators(fa), atol=1e-12)

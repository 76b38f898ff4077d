from __future__ import annotations

import numpy as np
import pytest

from berthplan import dynamics, forces
from berthplan.states import ActuatorState, State, WindCondition

from .oracles import mass_matrix_accelerations


# ----------------------------------------------------------------------
# kinematics
# ----------------------------------------------------------------------

def test_earth_rates_zero_heading():
    s = State(0.0, 0.0, 0.0, 0.5, 0.0, 0.0)
    assert np.allclose(dynamics.body_to_earth_rates(s), [0.5, 0.0, 0.0])


def test_earth_rates_near_pi_heading():
    # heading just short of pi, forward speed only: almost straight -x0
    s = State(60.0, 0.0, 3.14, 0.74, 0.0, 0.0)
    rates = dynamics.body_to_earth_rates(s)
    assert rates[0] == pytest.approx(-0.7399990614783792, abs=1e-12)
    assert rates[1] == pytest.approx(0.001178563158200253, abs=1e-12)
    assert rates[2] == 0.0


def test_earth_rates_preserve_speed(rng):
    from .helpers import random_states
    xs = random_states(rng, 200)
    for row in xs:
        s = State.from_array(row)
        vel = dynamics.body_to_earth_rates(s)[:2]
        assert np.hypot(*vel) == pytest.approx(s.speed, rel=1e-12, abs=1e-15)


def test_pure_sway_heading_zero():
    s = State(0.0, 0.0, 0.0, 0.0, 0.3, 0.0)
    assert np.allclose(dynamics.body_to_earth_rates(s), [0.0, 0.3, 0.0])


# ----------------------------------------------------------------------
# force components
# ----------------------------------------------------------------------

def test_hull_zero_at_rest(ship):
    x, y, n = forces.hull_force_arrays(0.0, 0.0, 0.0, ship)
    assert x == 0.0 and y == 0.0 and n == 0.0


def test_hull_pure_surge_resistance(ship):
    x, y, n = forces.hull_force_arrays(0.5, 0.0, 0.0, ship)
    assert x < 0.0
    assert y == 0.0 and n == 0.0


def test_hull_sway_damping_opposes_motion(ship):
    _, y_pos, _ = forces.hull_force_arrays(0.3, 0.2, 0.0, ship)
    _, y_neg, _ = forces.hull_force_arrays(0.3, -0.2, 0.0, ship)
    assert y_pos < 0.0 < y_neg


def test_hull_large_drift_angle_finite(ship):
    # pure lateral drift: cross-flow drag must dominate and stay finite
    x, y, n = forces.hull_force_arrays(0.0, 0.5, 0.0, ship)
    assert np.isfinite([x, y, n]).all()
    assert y < 0.0


def test_propeller_zero_revolutions(ship):
    x, y, n = forces.propeller_force_arrays(0.4, 0.0, ship)
    assert x == 0.0 and y == 0.0 and n == 0.0


def test_propeller_bollard_thrust_positive(ship):
    x, _, _ = forces.propeller_force_arrays(0.0, 10.0, ship)
    assert x > 0.0


def test_propeller_thrust_decreases_with_speed(ship):
    speeds = np.linspace(0.0, 0.75, 40)
    thrust = forces.propeller_force_arrays(speeds, 10.0, ship)[0]
    assert np.all(np.diff(thrust) < 0.0)


def test_propeller_rejects_astern(ship):
    with pytest.raises(ValueError):
        forces.propeller_force_arrays(0.3, -2.0, ship)


def test_rudders_neutral_pair_no_side_force(ship):
    x, y, n = forces.rudder_force_arrays(0.4, 0.0, 0.0, 10.0, 0.0, 0.0, ship)
    assert y == pytest.approx(0.0, abs=1e-12)
    assert n == pytest.approx(0.0, abs=1e-12)


def test_rudders_symmetric_pair_brakes(ship):
    # mirror-symmetric deflection: port negative, starboard positive
    for mag in (np.deg2rad(15.0), np.deg2rad(45.0)):
        x, y, n = forces.rudder_force_arrays(0.4, 0.0, 0.0, 10.0, -mag, mag, ship)
        assert x < 0.0
        assert y == pytest.approx(0.0, abs=1e-10)
        assert n == pytest.approx(0.0, abs=1e-10)


def test_rudders_single_deflection_steers(ship):
    _, y, n = forces.rudder_force_arrays(0.4, 0.0, 0.0, 10.0, 0.0,
                                         np.deg2rad(30.0), ship)
    assert abs(y) > 0.0 and abs(n) > 0.0


def test_rudders_generate_force_at_zero_ship_speed(ship):
    # slipstream steering: at rest with the propeller turning, a deflected
    # rudder still produces force
    _, y, _ = forces.rudder_force_arrays(0.0, 0.0, 0.0, 10.0, 0.0,
                                         np.deg2rad(30.0), ship)
    assert abs(y) > 0.1


def test_thruster_trivial_values(ship):
    x, y, n = forces.thruster_force_arrays(0.0, ship)
    assert x == 0.0 and y == 0.0 and n == 0.0
    x, y1, n1 = forces.thruster_force_arrays(4.0, ship)
    _, y2, n2 = forces.thruster_force_arrays(-4.0, ship)
    assert y1 > 0.0 and y2 == -y1 and n2 == -n1
    # moment-to-force ratio equals the configured arm
    assert n1 / y1 == pytest.approx(ship.x_thruster, rel=1e-12)


def test_wind_zero_apparent(ship):
    # ship running with the wind at identical velocity: no apparent wind
    x, y, n = forces.wind_force_arrays(0.5, 0.0, 0.0, 0.0, 0.5, ship)
    assert x == pytest.approx(0.0, abs=1e-12)
    assert y == pytest.approx(0.0, abs=1e-12)
    assert n == pytest.approx(0.0, abs=1e-12)


def test_wind_head_wind_pushes_astern(ship):
    # stationary ship, wind blowing toward -x0, heading 0: dead-ahead wind
    x, y, n = forces.wind_force_arrays(0.0, 0.0, 0.0, np.pi, 1.0, ship)
    assert x < 0.0
    assert y == pytest.approx(0.0, abs=1e-12)
    assert n == pytest.approx(0.0, abs=1e-12)


def test_wind_beam_wind_side_force_dominates(ship):
    # wind blowing toward -y0 on a stationary ship heading 0: from starboard
    x, y, _ = forces.wind_force_arrays(0.0, 0.0, 0.0, -np.pi / 2, 1.0, ship)
    assert abs(y) > abs(x)
    assert y < 0.0  # pushed to port


# ----------------------------------------------------------------------
# total derivative
# ----------------------------------------------------------------------

def test_equilibrium_state_stays_at_rest(ship, rest_state, neutral_actuators, calm):
    xdot = dynamics.total_derivative(rest_state, neutral_actuators, calm, ship)
    assert np.allclose(xdot, 0.0, atol=1e-14)


def test_accelerations_match_mass_matrix_solve(ship, rng):
    from .helpers import random_actuators, random_states
    xs = random_states(rng, 100)
    acts = random_actuators(rng, 100, ship)
    wind = WindCondition(gamma_t=0.7, speed=0.8)
    for row, act in zip(xs, acts):
        xdot = dynamics.derivative_arrays(row, act, wind.gamma_t, wind.speed, ship)
        f = forces.total_force_arrays(row[3], row[4], row[5], row[2], act,
                                      wind.gamma_t, wind.speed, ship)
        acc = mass_matrix_accelerations(
            (float(f[0]), float(f[1]), float(f[2])),
            row[3], row[4], row[5], ship)
        assert np.allclose(xdot[3:], acc, rtol=1e-10, atol=1e-12)


def test_pure_yaw_centripetal_terms(ship, calm):
    # u = v = 0, r != 0: surge acceleration reduces to
    # (X + x_g m r^2) / (m + m_x) with X the hull yaw-drag contribution
    r = 0.12
    s = State(0.0, 0.0, 0.0, 0.0, 0.0, r)
    act = ActuatorState(0.0, 0.0, 0.0, 0.0)
    xdot = dynamics.total_derivative(s, act, calm, ship)
    fx = forces.hull_force_arrays(0.0, 0.0, r, ship)[0]
    expected = (float(fx) + ship.x_g * ship.mass * r * r) / ship.mass_x
    assert xdot[3] == pytest.approx(expected, rel=1e-12)


# ----------------------------------------------------------------------
# actuator rate model
# ----------------------------------------------------------------------

def test_actuator_within_reach_lands_exactly(ship):
    a = ActuatorState(0.0, 0.0, 10.0, 0.0)
    cmd = np.array([np.deg2rad(5.0), 0.0, 10.0, 0.3])
    nxt = dynamics.actuator_step(a, cmd, 1.0, ship)
    assert np.allclose(nxt.as_array(), cmd)


def test_actuator_rate_limited(ship):
    a = ActuatorState(0.0, 0.0, 10.0, 0.0)
    cmd = np.array([np.deg2rad(40.0), -np.deg2rad(40.0), 10.0, 6.0])
    dt = 0.5
    nxt = dynamics.actuator_step(a, cmd, dt, ship)
    assert nxt.delta_p == pytest.approx(ship.delta_rate * dt)
    assert nxt.delta_s == pytest.approx(-ship.delta_rate * dt)
    assert nxt.n_bt == pytest.approx(ship.n_bt_rate * dt)


def test_actuator_never_overshoots(ship, rng):
    for _ in range(50):
        a = rng.uniform(-0.5, 0.5, 4)
        cmd = rng.uniform(-0.5, 0.5, 4)
        dt = rng.uniform(0.01, 5.0)
        nxt = dynamics.actuator_step_arrays(a, cmd, dt, ship)
        # after the step, the remaining gap never changes sign
        assert np.all((cmd - nxt) * (cmd - a) >= -1e-15)


def test_actuator_converges_and_stays(ship):
    a = np.zeros(4)
    cmd = np.array([0.3, -0.2, 10.0, 5.0])
    for _ in range(200):
        a = dynamics.actuator_step_arrays(a, cmd, 0.1, ship)
    assert np.allclose(a, cmd)
    assert np.allclose(dynamics.actuator_step_arrays(a, cmd, 0.1, ship), cmd)


# ----------------------------------------------------------------------
# integration
# ----------------------------------------------------------------------

def test_rk4_zero_derivative_is_identity(ship, rest_state, neutral_actuators, calm):
    s, a = dynamics.rk4_step(rest_state, neutral_actuators,
                             neutral_actuators, calm, 0.5, ship)
    assert np.allclose(s.as_array(), rest_state.as_array(), atol=1e-15)
    assert np.allclose(a.as_array(), 0.0)


def test_rk4_matches_fine_reference(ship, calm):
    # one coarse step against many fine steps with frozen actuators
    x = np.array([0.0, 0.0, 0.2, 0.4, 0.05, 0.02])
    act = np.array([0.1, -0.15, 10.0, 1.0])
    coarse, _ = dynamics.rk4_step_arrays(x, act, act, 0.0, 0.0, 0.1, ship)
    fine = x.copy()
    for _ in range(100):
        fine, _ = dynamics.rk4_step_arrays(fine, act, act, 0.0, 0.0, 0.001, ship)
    assert np.allclose(coarse, fine, rtol=1e-8, atol=1e-9)


def test_rk4_fourth_order_convergence(ship):
    # smooth control (actuators already at command): global error at t = 10 s
    # should shrink like dt^4
    x0 = np.array([0.0, 0.0, 0.3, 0.5, 0.0, 0.0])
    act = np.array([np.deg2rad(10.0), np.deg2rad(4.0), 10.0, 2.0])

    def run(dt):
        x = x0.copy()
        for _ in range(int(round(10.0 / dt))):
            x, _ = dynamics.rk4_step_arrays(x, act, act, 0.3, 0.6, dt, ship)
        return x

    ref = run(1e-3)
    dts = np.array([0.2, 0.1, 0.05, 0.025])
    errs = np.array([np.max(np.abs(run(dt) - ref)) for dt in dts])
    slope = np.polyfit(np.log(dts), np.log(errs), 1)[0]
    assert slope >= 3.7


def test_simulate_shapes_and_consistency(ship, calm):
    x0 = State(0.0, 0.0, 0.0, 0.3, 0.0, 0.0)
    a0 = ActuatorState(0.0, 0.0, 10.0, 0.0)
    commands = np.array([[0.2, -0.2, 10.0, 0.0],
                         [0.0, 0.0, 10.0, 2.0]])
    times, states, actuals = dynamics.simulate(x0, a0, commands, 2.0, 4, calm, ship)
    assert times.shape == (9,)
    assert states.shape == (9, 6)
    assert actuals.shape == (9, 4)
    assert times[-1] == pytest.approx(4.0)
    # actuator converged to the last command by the end
    assert np.allclose(actuals[-1], commands[-1])

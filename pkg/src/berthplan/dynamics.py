"""Equations of motion and time stepping for the berthing planner.

State layout (see :mod:`berthplan.states`): ``(x0, y0, psi, u_s, v_m, r)``.
Surge acceleration decouples once the centripetal terms are moved to the
right-hand side; sway and yaw accelerations come from the coupled 2x2 solve
of the lateral momentum and yaw balance (the mass matrix couples them
through the longitudinal center of gravity).

The actuator rate model is deliberately simple: the actual value moves
toward the command at the channel's maximum rate and clamps exactly at the
command, never overshooting.  Within one RK4 step the actuator values are
held constant; they are advanced once per outer step.
"""

from __future__ import annotations

import numpy as np

from .forces import total_force_arrays
from .ship import ShipParams
from .states import ActuatorState, State, WindCondition

__all__ = [
    "body_to_earth_rates",
    "total_derivative",
    "actuator_step",
    "rk4_step",
    "simulate",
]


def body_to_earth_rates(state: State) -> np.ndarray:
    """Earth-frame pose rates (x0_dot, y0_dot, psi_dot) for a given state."""
    c, s = np.cos(state.psi), np.sin(state.psi)
    return np.array([state.u_s * c - state.v_m * s,
                     state.u_s * s + state.v_m * c,
                     state.r])


def derivative_arrays(x, act, gamma_t, wind_speed, p: ShipParams) -> np.ndarray:
    """State derivative for batched states ``x (..., 6)`` and actuators
    ``act (..., 4)``."""
    x = np.asarray(x, dtype=float)
    psi, u, v, r = x[..., 2], x[..., 3], x[..., 4], x[..., 5]
    fx, fy, fn = total_force_arrays(u, v, r, psi, act, gamma_t, wind_speed, p)

    xgm = p.x_g * p.mass
    u_dot = (fx + p.mass_y * v * r + xgm * r * r) / p.mass_x
    b1 = fy - p.mass_x * u * r
    b2 = fn - xgm * u * r
    det = p.mass_y * p.i_zm - xgm ** 2
    v_dot = (b1 * p.i_zm - b2 * xgm) / det
    r_dot = (b2 * p.mass_y - b1 * xgm) / det

    c, s = np.cos(psi), np.sin(psi)
    out = np.empty_like(x)
    out[..., 0] = u * c - v * s
    out[..., 1] = u * s + v * c
    out[..., 2] = r
    out[..., 3] = u_dot
    out[..., 4] = v_dot
    out[..., 5] = r_dot
    return out


def total_derivative(state: State, actuators: ActuatorState,
                     wind: WindCondition, p: ShipParams) -> np.ndarray:
    """Full six-component state derivative, as an array in state order."""
    return derivative_arrays(state.as_array(), actuators.as_array(),
                             wind.gamma_t, wind.speed, p)


def _rate_vector(p: ShipParams) -> np.ndarray:
    return np.array([p.delta_rate, p.delta_rate, p.n_prop_rate, p.n_bt_rate])


def actuator_step_arrays(act, command, dt, p: ShipParams) -> np.ndarray:
    """Advance actual actuator values toward the command over ``dt``.

    Each channel moves at most rate*dt and lands exactly on the command when
    within reach, so repeated stepping converges in finite time with no
    overshoot.  ``dt`` may be scalar or shaped to broadcast against the
    leading axes of ``act``.
    """
    act = np.asarray(act, dtype=float)
    command = np.asarray(command, dtype=float)
    limit = _rate_vector(p) * dt
    return act + np.clip(command - act, -limit, limit)


def actuator_step(actuators: ActuatorState, command, dt: float,
                  p: ShipParams) -> ActuatorState:
    cmd = command.as_array() if hasattr(command, "as_array") else command
    return ActuatorState.from_array(
        actuator_step_arrays(actuators.as_array(), cmd, dt, p))


def rk4_step_arrays(x, act, command, gamma_t, wind_speed, dt, p: ShipParams):
    """One classical RK4 step of the motion states plus one actuator advance.

    ``dt`` may be a scalar or an array broadcastable against the leading axes
    of ``x`` (used by batched evaluations where the step length varies per
    batch row).
    """
    x = np.asarray(x, dtype=float)
    dt = np.asarray(dt, dtype=float)[..., None] if np.ndim(dt) else float(dt)
    k1 = derivative_arrays(x, act, gamma_t, wind_speed, p)
    k2 = derivative_arrays(x + 0.5 * dt * k1, act, gamma_t, wind_speed, p)
    k3 = derivative_arrays(x + 0.5 * dt * k2, act, gamma_t, wind_speed, p)
    k4 = derivative_arrays(x + dt * k3, act, gamma_t, wind_speed, p)
    x_next = x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    # dt is either a scalar or shaped (..., 1); both broadcast against the
    # four actuator channels just as they do against the six states.
    act_next = actuator_step_arrays(act, command, dt, p)
    return x_next, act_next


def rk4_step(state: State, actuators: ActuatorState, command,
             wind: WindCondition, dt: float, p: ShipParams):
    """Typed single-step wrapper; returns (next state, next actuators)."""
    cmd = command.as_array() if hasattr(command, "as_array") else np.asarray(command)
    x_next, a_next = rk4_step_arrays(state.as_array(), actuators.as_array(),
                                     cmd, wind.gamma_t, wind.speed, dt, p)
    return State.from_array(x_next), ActuatorState.from_array(a_next)


def simulate(state: State, actuators: ActuatorState, commands,
             step_time: float, steps_per_command: int,
             wind: WindCondition, p: ShipParams):
    """Integrate a piecewise-constant command schedule.

    Parameters
    ----------
    commands : array (K, 4)
        One command row per schedule interval.
    step_time : float
        Duration of each schedule interval [s].
    steps_per_command : int
        RK4 steps per interval; the actuator state advances once per step.

    Returns
    -------
    times : (K*steps_per_command + 1,)
    states : (K*steps_per_command + 1, 6)
    actuals : (K*steps_per_command + 1, 4)
        Actual actuator values at each step boundary.
    """
    commands = np.atleast_2d(np.asarray(commands, dtype=float))
    n_k = commands.shape[0]
    dt = step_time / steps_per_command
    n_t = n_k * steps_per_command + 1
    states = np.empty((n_t, 6))
    actuals = np.empty((n_t, 4))
    x = state.as_array()
    a = actuators.as_array()
    states[0], actuals[0] = x, a
    i = 1
    for k in range(n_k):
        for _ in range(steps_per_command):
            x, a = rk4_step_arrays(x, a, commands[k], wind.gamma_t,
                                   wind.speed, dt, p)
            states[i], actuals[i] = x, a
            i += 1
    times = np.arange(n_t) * dt
    return times, states, actuals

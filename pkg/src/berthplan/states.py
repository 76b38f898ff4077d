"""Value types for ship motion states, controls, and environment.

Conventions used throughout the package:

* Earth-fixed frame: x0/y0 in meters, heading ``psi`` in radians measured
  from the earth x-axis, positive clockwise seen from above (z down).
* Body frame: ``u_s`` surge speed (positive forward), ``v_m`` lateral speed
  at midship (positive to starboard), ``r`` yaw rate in rad/s.
* Control channels, in fixed order: port rudder angle ``delta_p`` [rad],
  starboard rudder angle ``delta_s`` [rad], propeller revolutions ``n_p``
  [1/s], bow thruster revolutions ``n_bt`` [1/s].  Positive rudder angle
  means trailing edge toward starboard.
* True wind: ``gamma_t`` [rad] is the earth-frame direction the wind blows
  toward, same angular convention as ``psi``; ``speed`` [m/s].

All angles are radians internally.  File formats use degrees.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

STATE_FIELDS = ("x0", "y0", "psi", "u_s", "v_m", "r")
CONTROL_FIELDS = ("delta_p", "delta_s", "n_p", "n_bt")

N_STATES = len(STATE_FIELDS)
N_CONTROLS = len(CONTROL_FIELDS)


@dataclass(frozen=True)
class State:
    """Ship motion state (earth-fixed pose + body-frame velocities)."""

    x0: float
    y0: float
    psi: float
    u_s: float
    v_m: float
    r: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x0, self.y0, self.psi, self.u_s, self.v_m, self.r])

    @staticmethod
    def from_array(values) -> "State":
        x = np.asarray(values, dtype=float).reshape(N_STATES)
        return State(*(float(v) for v in x))

    @property
    def speed(self) -> float:
        """Resultant speed over ground of the midship point."""
        return float(np.hypot(self.u_s, self.v_m))

    @property
    def drift_angle(self) -> float:
        """Drift angle atan2(-v_m, u_s), for reporting only."""
        return float(np.arctan2(-self.v_m, self.u_s))


@dataclass(frozen=True)
class ControlCommand:
    """Commanded actuator setpoints (what the planner decides)."""

    delta_p: float
    delta_s: float
    n_p: float
    n_bt: float

    def as_array(self) -> np.ndarray:
        return np.array([self.delta_p, self.delta_s, self.n_p, self.n_bt])

    @staticmethod
    def from_array(values) -> "ControlCommand":
        x = np.asarray(values, dtype=float).reshape(N_CONTROLS)
        return ControlCommand(*(float(v) for v in x))


@dataclass(frozen=True)
class ActuatorState:
    """Actual actuator positions, which chase the command at finite rates."""

    delta_p: float
    delta_s: float
    n_p: float
    n_bt: float

    def as_array(self) -> np.ndarray:
        return np.array([self.delta_p, self.delta_s, self.n_p, self.n_bt])

    @staticmethod
    def from_array(values) -> "ActuatorState":
        x = np.asarray(values, dtype=float).reshape(N_CONTROLS)
        return ActuatorState(*(float(v) for v in x))


@dataclass(frozen=True)
class WindCondition:
    """Steady true wind: direction blown toward (rad) and speed (m/s)."""

    gamma_t: float
    speed: float

    def __post_init__(self):
        if self.speed < 0.0:
            raise ValueError("wind speed must be non-negative")


@dataclass(frozen=True)
class ForceTriplet:
    """Planar force/moment resultant: surge X [N], sway Y [N], yaw N [N m]."""

    x: float
    y: float
    n: float

    def __add__(self, other: "ForceTriplet") -> "ForceTriplet":
        return ForceTriplet(self.x + other.x, self.y + other.y, self.n + other.n)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.n])

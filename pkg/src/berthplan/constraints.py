"""Operational constraints: berthing speed corridor and actuation limits.

The speed corridor encodes harbor practice for safe approach speeds as a
pair of distance-dependent bounds on surge speed.  Both bounds share the
shape ``u = u_nominal * (c1*d + c2*(1 - exp(-c3*d)))`` with ``d`` the
distance to the berth point in ship lengths; the bound is zero at the berth
and grows monotonically with distance.

Actuation limits are artificial reductions of the physical actuator ranges
(a fixed fraction per device class), reflecting margins kept in practice for
the feedback layer that tracks the plan.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ship import ShipParams

__all__ = [
    "SpeedLimitCoefficients",
    "corridor_fraction",
    "speed_limits",
    "corridor_residuals",
    "ActuatorBounds",
    "build_actuator_bounds",
]


@dataclass(frozen=True)
class SpeedLimitCoefficients:
    """Corridor curve coefficients ``(c1, c2, c3)`` for lower and upper bound."""

    lower: tuple = (1.50e-3, 1.70e-2, 3.78e-1)
    upper: tuple = (5.06e-3, 2.04e-2, 1.10)

    def validate(self) -> None:
        for name, coeffs in (("lower", self.lower), ("upper", self.upper)):
            if len(coeffs) != 3 or any(c <= 0.0 for c in coeffs):
                raise ValueError(f"{name} corridor coefficients must be three "
                                 f"positive numbers, got {coeffs}")
        d = np.linspace(0.0, 200.0, 4001)
        if np.any(corridor_fraction(d, self.upper) < corridor_fraction(d, self.lower)):
            raise ValueError("upper corridor bound must dominate the lower bound")


def corridor_fraction(d, coeffs) -> np.ndarray:
    """Nondimensional corridor speed at distance ``d`` (ship lengths)."""
    c1, c2, c3 = coeffs
    d = np.asarray(d, dtype=float)
    return c1 * d + c2 * (1.0 - np.exp(-c3 * d))


def speed_limits(distance, p: ShipParams,
                 coeffs: SpeedLimitCoefficients | None = None):
    """Dimensional (u_min, u_max) [m/s] at Euclidean berth distance [m].

    Both bounds are zero exactly at the berth and strictly increasing in
    distance.
    """
    if coeffs is None:
        coeffs = SpeedLimitCoefficients()
    d = np.asarray(distance, dtype=float) / p.length
    if np.any(d < 0.0):
        raise ValueError("distance to berth must be non-negative")
    return (p.u_nominal * corridor_fraction(d, coeffs.lower),
            p.u_nominal * corridor_fraction(d, coeffs.upper))


def corridor_residuals(states, berth_point, p: ShipParams,
                       coeffs: SpeedLimitCoefficients | None = None) -> np.ndarray:
    """Per-state corridor residual pairs ``(u_s - u_min, u_max - u_s)``.

    Positive residuals mean the corridor is respected.  Shape: states
    ``(..., 6)`` -> residuals ``(..., 2)``.
    """
    x = np.asarray(states, dtype=float)
    b = np.asarray(berth_point, dtype=float)
    dist = np.hypot(x[..., 0] - b[0], x[..., 1] - b[1])
    u_min, u_max = speed_limits(dist, p, coeffs)
    u = x[..., 3]
    return np.stack([u - u_min, u_max - u], axis=-1)


# ----------------------------------------------------------------------
# actuator bounds
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class ActuatorBounds:
    """Per-channel command intervals in channel order
    (delta_p, delta_s, n_p, n_bt)."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.lower, dtype=float).reshape(4)
        hi = np.asarray(self.upper, dtype=float).reshape(4)
        if np.any(lo > hi):
            raise ValueError("actuator bounds must satisfy lower <= upper")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    def contains(self, commands, atol: float = 1e-9) -> np.ndarray:
        c = np.asarray(commands, dtype=float)
        return np.all((c >= self.lower - atol) & (c <= self.upper + atol), axis=-1)


def build_actuator_bounds(p: ShipParams, fixed_np: float | None = None) -> ActuatorBounds:
    """Scaled command bounds for the planner.

    Rudder angles use the artificial fraction of the asymmetric physical
    range: 105 deg outboard / 35 deg inboard becomes (at the default 43%)
    45.15 deg outboard and 15.05 deg inboard per rudder.  In this sign
    convention (positive = trailing edge toward starboard) the port rudder's
    outboard direction is negative and the starboard rudder's is positive.

    The propeller runs forward only.  With ``fixed_np`` set, the revolutions
    channel is pinned to that value and the artificial propeller fraction is
    a documented no-op; otherwise the channel spans [0, fraction * max].
    """
    out_b = p.limit_rudder * p.delta_outboard
    in_b = p.limit_rudder * p.delta_inboard
    if fixed_np is not None:
        if fixed_np < 0.0 or fixed_np > p.n_prop_max:
            raise ValueError("fixed propeller revolutions outside the "
                             f"physical range [0, {p.n_prop_max}]")
        np_lo = np_hi = float(fixed_np)
    else:
        np_lo, np_hi = 0.0, p.limit_prop * p.n_prop_max
    bt = p.limit_thruster * p.n_bt_max
    return ActuatorBounds(
        lower=np.array([-out_b, -in_b, np_lo, -bt]),
        upper=np.array([in_b, out_b, np_hi, bt]),
    )

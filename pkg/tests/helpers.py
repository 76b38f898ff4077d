"""Shared sample generators for the test suite."""

from __future__ import annotations

import numpy as np


def random_states(rng, n) -> np.ndarray:
    """Plausible berthing-scale motion states."""
    cols = [
        rng.uniform(-80.0, 80.0, n),            # x0
        rng.uniform(-40.0, 40.0, n),            # y0
        rng.uniform(-2 * np.pi, 2 * np.pi, n),  # psi
        rng.uniform(-0.3, 0.8, n),              # u_s
        rng.uniform(-0.4, 0.4, n),              # v_m
        rng.uniform(-0.3, 0.3, n),              # r
    ]
    return np.stack(cols, axis=-1)


def random_actuators(rng, n, ship) -> np.ndarray:
    from berthplan.constraints import build_actuator_bounds
    b = build_actuator_bounds(ship)
    return rng.uniform(b.lower, b.upper, (n, 4))


def mirror_states(states) -> np.ndarray:
    """Reflect motion states about the ship's vertical center plane."""
    m = np.asarray(states, dtype=float).copy()
    m[..., 1] *= -1.0   # y0
    m[..., 2] *= -1.0   # psi
    m[..., 4] *= -1.0   # v_m
    m[..., 5] *= -1.0   # r
    return m


def mirror_actuators(acts) -> np.ndarray:
    """Reflect actuator values: rudders exchanged and negated, thruster
    negated, propeller unchanged."""
    a = np.asarray(acts, dtype=float)
    out = a.copy()
    out[..., 0] = -a[..., 1]
    out[..., 1] = -a[..., 0]
    out[..., 3] = -a[..., 3]
    return out

from __future__ import annotations

import numpy as np
import pytest

from berthplan.constraints import (ActuatorBounds, SpeedLimitCoefficients,
                                   build_actuator_bounds, corridor_fraction,
                                   corridor_residuals, speed_limits)


# ----------------------------------------------------------------------
# corridor curve
# ----------------------------------------------------------------------

def test_corridor_spot_values():
    c = SpeedLimitCoefficients()
    assert corridor_fraction(10.0, c.upper) == pytest.approx(0.07100, abs=1e-5)
    assert corridor_fraction(10.0, c.lower) == pytest.approx(0.03161, abs=1e-5)


def test_corridor_zero_at_berth(ship):
    u_min, u_max = speed_limits(0.0, ship)
    assert u_min == 0.0 and u_max == 0.0


def test_corridor_monotone_increasing(ship):
    d = np.linspace(0.0, 90.0, 400)
    u_min, u_max = speed_limits(d, ship)
    assert np.all(np.diff(u_min) > 0.0)
    assert np.all(np.diff(u_max) > 0.0)


def test_corridor_upper_dominates_lower(ship):
    d = np.linspace(0.0, 150.0, 600)
    u_min, u_max = speed_limits(d, ship)
    assert np.all(u_max >= u_min)


def test_corridor_scale_free_in_ship_length(ship):
    # the nondimensional curve depends only on d = D / L: scaling both the
    # distance and the ship length leaves the dimensionless value unchanged
    c = SpeedLimitCoefficients()
    d = np.linspace(0.1, 40.0, 50)
    assert np.allclose(corridor_fraction(d, c.upper),
                       corridor_fraction((d * ship.length) / ship.length, c.upper))


def test_negative_distance_rejected(ship):
    with pytest.raises(ValueError):
        speed_limits(-1.0, ship)


def test_bad_coefficients_rejected():
    with pytest.raises(ValueError):
        SpeedLimitCoefficients(lower=(1e-3, -1e-2, 0.3)).validate()
    with pytest.raises(ValueError):
        SpeedLimitCoefficients(lower=(5.06e-3, 2.04e-2, 1.10),
                               upper=(1.50e-3, 1.70e-2, 3.78e-1)).validate()


def test_corridor_residual_signs(ship):
    berth = np.array([0.0, 0.0])
    d = 30.0
    u_min, u_max = speed_limits(d, ship)
    ok = np.array([d, 0.0, np.pi, 0.5 * (u_min + u_max), 0.0, 0.0])
    hot = np.array([d, 0.0, np.pi, u_max + 0.2, 0.0, 0.0])
    slow = np.array([d, 0.0, np.pi, max(u_min - 0.01, 0.0), 0.0, 0.0])
    assert np.all(corridor_residuals(ok, berth, ship) > 0.0)
    assert corridor_residuals(hot, berth, ship)[1] < 0.0
    assert corridor_residuals(slow, berth, ship)[0] < 0.0


def test_corridor_residuals_batch_shape(ship):
    states = np.zeros((7, 6))
    states[:, 0] = np.linspace(1.0, 60.0, 7)
    states[:, 3] = 0.05
    res = corridor_residuals(states, (0.0, 0.0), ship)
    assert res.shape == (7, 2)


# ----------------------------------------------------------------------
# actuator bounds
# ----------------------------------------------------------------------

def test_rudder_bounds_scaled_asymmetric(ship):
    b = build_actuator_bounds(ship)
    out_deg = np.rad2deg(ship.limit_rudder * ship.delta_outboard)
    in_deg = np.rad2deg(ship.limit_rudder * ship.delta_inboard)
    assert out_deg == pytest.approx(45.15)
    assert in_deg == pytest.approx(15.05)
    # port rudder: outboard is negative; starboard mirrored
    assert np.rad2deg(b.lower[0]) == pytest.approx(-45.15)
    assert np.rad2deg(b.upper[0]) == pytest.approx(15.05)
    assert np.rad2deg(b.lower[1]) == pytest.approx(-15.05)
    assert np.rad2deg(b.upper[1]) == pytest.approx(45.15)


def test_propeller_bounds_forward_only(ship):
    b = build_actuator_bounds(ship)
    assert b.lower[2] == 0.0
    assert b.upper[2] == pytest.approx(ship.limit_prop * ship.n_prop_max)


def test_propeller_fixed_mode_pins_channel(ship):
    b = build_actuator_bounds(ship, fixed_np=10.0)
    assert b.lower[2] == b.upper[2] == 10.0


def test_fixed_np_outside_physical_range_rejected(ship):
    with pytest.raises(ValueError):
        build_actuator_bounds(ship, fixed_np=ship.n_prop_max + 1.0)


def test_thruster_bounds_symmetric(ship):
    b = build_actuator_bounds(ship)
    assert b.upper[3] == pytest.approx(0.75 * ship.n_bt_max)
    assert b.lower[3] == -b.upper[3]


def test_bounds_contains(ship):
    b = build_actuator_bounds(ship, fixed_np=10.0)
    inside = np.array([0.0, 0.0, 10.0, 1.0])
    outside = np.array([0.0, 0.0, 10.0, 7.0])
    assert bool(b.contains(inside))
    assert not bool(b.contains(outside))


def test_bounds_ordering_enforced():
    with pytest.raises(ValueError):
        ActuatorBounds(lower=np.array([1.0, 0, 0, 0]),
                       upper=np.array([0.0, 0, 0, 0]))

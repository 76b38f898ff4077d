"""Force and moment models for low-speed ship maneuvering.

Every component function comes in two layers: an array core operating on
broadcastable numpy inputs (used by the batched trajectory evaluators), and a
typed wrapper taking :class:`~berthplan.states.State` /
:class:`~berthplan.states.ActuatorState` values and returning a
:class:`~berthplan.states.ForceTriplet`.

All components share the structural contracts needed at berthing speeds:

* exactly zero output at zero relative velocities / zero actuation,
* mirror symmetry: reflecting the scene about the ship's vertical center
  plane (sway, yaw rate, rudder pair, thruster, wind direction negated and
  the two rudders exchanged) preserves X and flips the sign of Y and N,
* validity at arbitrary drift angles (the hull model carries a cross-flow
  drag integral rather than small-drift linearizations only).
"""

from __future__ import annotations

import numpy as np

from .ship import ShipParams
from .states import ActuatorState, ForceTriplet, State, WindCondition

__all__ = [
    "hull_forces",
    "propeller_forces",
    "rudder_forces",
    "thruster_forces",
    "wind_forces",
    "total_forces",
]


# ----------------------------------------------------------------------
# hull
# ----------------------------------------------------------------------

def hull_force_arrays(u_s, v_m, r, p: ShipParams):
    """Bare hull reaction: polynomial derivatives plus cross-flow drag.

    The linear-derivative part uses the low-speed form (|u| weighting on the
    damping terms so they oppose motion for ahead and astern running); the
    cross-flow part integrates local lateral drag over ``p.n_strips`` hull
    strips, which keeps the model meaningful at large drift angles.
    """
    u = np.asarray(u_s, dtype=float)
    v = np.asarray(v_m, dtype=float)
    rr = np.asarray(r, dtype=float)
    L = p.length
    q = 0.5 * p.rho_water * L * p.draft

    x = q * (p.x_uu * u * np.abs(u)
             + p.x_vv * v * v
             + p.x_vr * L * v * rr
             + p.x_rr * (L * rr) ** 2)
    y = q * (p.y_v * v * np.abs(u) + p.y_r * (L * rr) * u)
    n = q * L * (p.n_v * v * u + p.n_r * (L * rr) * np.abs(u))

    # cross-flow drag, midpoint rule over hull strips
    dx = L / p.n_strips
    xs = -0.5 * L + (np.arange(p.n_strips) + 0.5) * dx  # strip centers
    vy = v[..., None] + p.c_ry * xs * rr[..., None]
    vn = v[..., None] + p.c_rn * xs * rr[..., None]
    coef = 0.5 * p.rho_water * p.draft * p.cd_cross * dx
    y = y - coef * np.sum(vy * np.abs(vy), axis=-1)
    n = n - coef * np.sum(xs * vn * np.abs(vn), axis=-1)
    return x, y, n


def hull_forces(state: State, p: ShipParams) -> ForceTriplet:
    x, y, n = hull_force_arrays(state.u_s, state.v_m, state.r, p)
    return ForceTriplet(float(x), float(y), float(n))


# ----------------------------------------------------------------------
# propeller
# ----------------------------------------------------------------------

def _thrust_arrays(u_s, n_p, p: ShipParams):
    """Open-water thrust rho n^2 D^4 K_T(J), zero at zero revolutions."""
    u = np.asarray(u_s, dtype=float)
    n = np.asarray(n_p, dtype=float)
    spinning = np.abs(n) > 1e-12
    j = np.where(spinning, u * (1.0 - p.wake_fraction) / np.where(spinning, n * p.d_prop, 1.0), 0.0)
    kt = p.kt0 + p.kt1 * j + p.kt2 * j * j
    return np.where(spinning, p.rho_water * n * n * p.d_prop ** 4 * kt, 0.0)


def propeller_force_arrays(u_s, n_p, p: ShipParams):
    """Surge thrust from the single propeller (forward operation only)."""
    n = np.asarray(n_p, dtype=float)
    if np.any(n < -1e-12):
        raise ValueError("propeller revolutions must be non-negative "
                         "(astern running is not modeled for this rudder system)")
    thrust = _thrust_arrays(u_s, n, p)
    x = (1.0 - p.thrust_deduction) * thrust
    zero = np.zeros_like(x)
    return x, zero, zero


def propeller_forces(state: State, actuators: ActuatorState, p: ShipParams) -> ForceTriplet:
    x, y, n = propeller_force_arrays(state.u_s, actuators.n_p, p)
    return ForceTriplet(float(x), float(y), float(n))


# ----------------------------------------------------------------------
# twin rudders in the propeller slipstream
# ----------------------------------------------------------------------

def rudder_force_arrays(u_s, v_m, r, n_p, delta_p, delta_s, p: ShipParams):
    """Lift/drag resultant of the vectwin pair.

    Each rudder sees axial inflow accelerated by the propeller slipstream
    (axial momentum theory, a fraction ``eta_slipstream`` of the rudder area
    washed), and lateral inflow from sway/yaw with flow straightening.  The
    normal force projects onto the ship axes with the usual drag-deduction
    and hull-interaction factors, applied per rudder and then summed; the
    lateral offset of each rudder adds a yaw moment from its surge component,
    which is what lets an asymmetric pair steer and a symmetric pair brake.
    """
    u = np.asarray(u_s, dtype=float)
    v = np.asarray(v_m, dtype=float)
    rr = np.asarray(r, dtype=float)

    u_a = u * (1.0 - p.wake_fraction)
    thrust = _thrust_arrays(u, n_p, p)
    a_disc = np.pi * p.d_prop ** 2 / 4.0
    u_jet_sq = np.maximum(u_a * u_a + 2.0 * thrust / (p.rho_water * a_disc), 0.0)
    u_r_sq = p.eta_slipstream * u_jet_sq + (1.0 - p.eta_slipstream) * u_a * u_a
    u_r = np.sqrt(u_r_sq)

    v_r = v + p.x_rudder * rr
    beta_r = np.arctan2(v_r, u_r)
    u_tot_sq = u_r_sq + v_r * v_r
    arm = p.x_rudder + p.a_hull * p.x_hull

    def one_rudder(delta, y_off):
        d = np.asarray(delta, dtype=float)
        alpha = d + p.gamma_flow * beta_r
        f_n = 0.5 * p.rho_water * p.rudder_area * p.rudder_lift_slope \
            * u_tot_sq * np.sin(alpha)
        fx = -(1.0 - p.t_rudder) * f_n * np.sin(d)
        fy = -(1.0 + p.a_hull) * f_n * np.cos(d)
        fn = arm * (-(f_n) * np.cos(d)) - y_off * fx
        return fx, fy, fn

    xp, yp, np_ = one_rudder(delta_p, -p.y_rudder)   # port rudder sits at y < 0
    xs, ys, ns = one_rudder(delta_s, +p.y_rudder)
    return xp + xs, yp + ys, np_ + ns


def rudder_forces(state: State, actuators: ActuatorState, p: ShipParams) -> ForceTriplet:
    x, y, n = rudder_force_arrays(state.u_s, state.v_m, state.r,
                                  actuators.n_p, actuators.delta_p,
                                  actuators.delta_s, p)
    return ForceTriplet(float(x), float(y), float(n))


# ----------------------------------------------------------------------
# bow thruster
# ----------------------------------------------------------------------

def thruster_force_arrays(n_bt, p: ShipParams):
    n = np.asarray(n_bt, dtype=float)
    y = p.c_thruster * n * np.abs(n)
    return np.zeros_like(y), y, p.x_thruster * y


def thruster_forces(actuators: ActuatorState, p: ShipParams) -> ForceTriplet:
    x, y, n = thruster_force_arrays(actuators.n_bt, p)
    return ForceTriplet(float(x), float(y), float(n))


# ----------------------------------------------------------------------
# wind
# ----------------------------------------------------------------------

def wind_force_arrays(u_s, v_m, psi, gamma_t, wind_speed, p: ShipParams):
    """Aerodynamic load from steady true wind via apparent-wind coefficients.

    The apparent wind is the true wind minus the ship's velocity over
    ground, expressed in the body frame.  The coefficient model is a short
    Fourier series in the apparent angle (0 = wind from dead ahead), even in
    surge and odd in sway/yaw, so the mirror symmetry is exact.
    """
    u = np.asarray(u_s, dtype=float)
    v = np.asarray(v_m, dtype=float)
    h = np.asarray(psi, dtype=float)
    c, s = np.cos(h), np.sin(h)
    wx = wind_speed * np.cos(gamma_t) - (u * c - v * s)
    wy = wind_speed * np.sin(gamma_t) - (u * s + v * c)
    u_a = c * wx + s * wy
    v_a = -s * wx + c * wy
    q = 0.5 * p.rho_air * (u_a * u_a + v_a * v_a)
    theta = np.arctan2(-v_a, -u_a)

    cx = p.cx0 + p.cx1 * np.cos(theta) + p.cx3 * np.cos(3 * theta) \
        + p.cx5 * np.cos(5 * theta)
    cy = p.cy1 * np.sin(theta) + p.cy3 * np.sin(3 * theta) + p.cy5 * np.sin(5 * theta)
    cn = p.cn1 * np.sin(theta) + p.cn2 * np.sin(2 * theta) + p.cn3 * np.sin(3 * theta)
    return q * p.area_front * cx, q * p.area_lateral * cy, \
        q * p.area_lateral * p.length * cn


def wind_forces(state: State, wind: WindCondition, p: ShipParams) -> ForceTriplet:
    x, y, n = wind_force_arrays(state.u_s, state.v_m, state.psi,
                                wind.gamma_t, wind.speed, p)
    return ForceTriplet(float(x), float(y), float(n))


# ----------------------------------------------------------------------
# total
# ----------------------------------------------------------------------

def total_force_arrays(u_s, v_m, r, psi, act, gamma_t, wind_speed, p: ShipParams):
    """Sum all components; ``act`` holds (delta_p, delta_s, n_p, n_bt) on the
    last axis."""
    a = np.asarray(act, dtype=float)
    xh, yh, nh = hull_force_arrays(u_s, v_m, r, p)
    xp, yp, np_ = propeller_force_arrays(u_s, a[..., 2], p)
    xr, yr, nr = rudder_force_arrays(u_s, v_m, r, a[..., 2], a[..., 0], a[..., 1], p)
    xt, yt, nt = thruster_force_arrays(a[..., 3], p)
    xw, yw, nw = wind_force_arrays(u_s, v_m, psi, gamma_t, wind_speed, p)
    return (xh + xp + xr + xt + xw,
            yh + yp + yr + yt + yw,
            nh + np_ + nr + nt + nw)


def total_forces(state: State, actuators: ActuatorState, wind: WindCondition,
                 p: ShipParams) -> ForceTriplet:
    x, y, n = total_force_arrays(state.u_s, state.v_m, state.r, state.psi,
                                 actuators.as_array(), wind.gamma_t, wind.speed, p)
    return ForceTriplet(float(x), float(y), float(n))

"""Ship particulars and maneuvering-model coefficients.

The model targets a small twin-rudder ("vectwin") single-propeller vessel
with a bow thruster, operated at berthing speeds.  Hydrodynamic coefficients
are grouped by the force component they feed (hull, propeller, rudders,
thruster, wind).  ``default_ship`` builds the bundled 3 m model-ship set; the
numbers are a plausible, dimensionally consistent calibration for that hull
size, not measurements of any particular vessel.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np


@dataclass(frozen=True)
class ShipParams:
    # --- principal particulars ----------------------------------------
    length: float            # L_pp [m]
    breadth: float           # B [m]
    draft: float             # d [m]
    mass: float              # displacement mass m [kg]
    x_g: float               # longitudinal center of gravity from midship [m]
    u_nominal: float         # nominal operating surge speed cap [m/s]

    # --- rigid-body + added inertia -----------------------------------
    m_x: float               # added mass, surge [kg]
    m_y: float               # added mass, sway [kg]
    i_zz: float              # yaw moment of inertia about cog [kg m^2]
    j_zz: float              # added yaw moment of inertia [kg m^2]

    # --- environment densities ----------------------------------------
    rho_water: float = 1000.0   # [kg/m^3]
    rho_air: float = 1.225      # [kg/m^3]

    # --- hull force model (nondimensional derivatives) ----------------
    x_uu: float = -0.025     # surge resistance, X ~ x_uu*u|u|
    x_vv: float = -0.035     # surge from drift, X ~ x_vv*v^2
    x_vr: float = 0.35       # surge from sway-yaw coupling, X ~ x_vr*L*v*r
    x_rr: float = -0.010     # surge from yaw, X ~ x_rr*(L r)^2
    y_v: float = -0.32       # linear sway damping, Y ~ y_v*v|u|
    y_r: float = 0.06        # sway from yaw, Y ~ y_r*(L r)*u
    n_v: float = -0.10       # yaw from drift, N ~ n_v*v*u
    n_r: float = -0.050      # linear yaw damping, N ~ n_r*(L r)|u|
    cd_cross: float = 0.50   # cross-flow drag coefficient
    c_ry: float = 1.00       # yaw-velocity weighting in cross-flow side force
    c_rn: float = 0.50       # yaw-velocity weighting in cross-flow moment
    n_strips: int = 20       # hull strips for the cross-flow integral

    # --- propeller ----------------------------------------------------
    d_prop: float = 0.10         # diameter [m]
    wake_fraction: float = 0.15  # 1-w efficiency on inflow
    thrust_deduction: float = 0.15
    kt0: float = 0.48            # K_T(J) = kt0 + kt1*J + kt2*J^2
    kt1: float = -0.35
    kt2: float = -0.16
    x_prop: float = -1.40        # longitudinal position [m]
    n_prop_max: float = 20.0     # physical rps ceiling
    n_prop_rate: float = 1.0     # command slew rate [rps/s]

    # --- vectwin rudder pair ------------------------------------------
    rudder_area: float = 0.0096      # movable area, each [m^2]
    rudder_lift_slope: float = 2.452  # normal-force slope vs sin(attack)
    x_rudder: float = -1.45          # longitudinal position [m]
    y_rudder: float = 0.055          # lateral offset of each rudder [m]
    eta_slipstream: float = 0.80     # rudder-area fraction washed by the propeller
    gamma_flow: float = 0.60         # flow straightening on lateral inflow
    t_rudder: float = 0.10           # drag deduction on surge component
    a_hull: float = 0.20             # hull interaction gain on sway component
    x_hull: float = -1.35            # hull interaction moment arm [m]
    delta_outboard: float = np.deg2rad(105.0)  # physical range toward outboard [rad]
    delta_inboard: float = np.deg2rad(35.0)    # physical range toward inboard [rad]
    delta_rate: float = np.deg2rad(20.0)       # slew rate [rad/s]

    # --- bow thruster -------------------------------------------------
    c_thruster: float = 0.085    # side force per signed rps^2 [N s^2]
    x_thruster: float = 1.35     # longitudinal position [m]
    n_bt_max: float = 8.0        # physical rps ceiling
    n_bt_rate: float = 1.0       # command slew rate [rps/s]

    # --- wind coefficient model (Fourier in apparent angle) -----------
    area_front: float = 0.070    # projected transverse area A_T [m^2]
    area_lateral: float = 0.450  # projected lateral area A_L [m^2]
    cx0: float = 0.0
    cx1: float = -0.50
    cx3: float = -0.08
    cx5: float = -0.02
    cy1: float = -0.75
    cy3: float = 0.10
    cy5: float = -0.02
    cn1: float = -0.02
    cn2: float = -0.08
    cn3: float = 0.01

    # --- artificial actuation limits (fractions of physical range) ----
    limit_rudder: float = 0.43
    limit_prop: float = 0.50
    limit_thruster: float = 0.75

    # ------------------------------------------------------------------
    @property
    def mass_x(self) -> float:
        """Effective surge mass m + m_x."""
        return self.mass + self.m_x

    @property
    def mass_y(self) -> float:
        """Effective sway mass m + m_y."""
        return self.mass + self.m_y

    @property
    def i_zm(self) -> float:
        """Effective yaw inertia about midship: I_zz + J_zz + x_g^2 m."""
        return self.i_zz + self.j_zz + self.x_g ** 2 * self.mass

    def validate(self) -> None:
        """Raise ValueError on physically inadmissible parameter sets."""
        pos = {
            "length": self.length, "breadth": self.breadth, "draft": self.draft,
            "mass": self.mass, "u_nominal": self.u_nominal,
            "rho_water": self.rho_water, "rho_air": self.rho_air,
            "d_prop": self.d_prop, "rudder_area": self.rudder_area,
            "rudder_lift_slope": self.rudder_lift_slope,
            "area_front": self.area_front, "area_lateral": self.area_lateral,
            "delta_outboard": self.delta_outboard, "delta_inboard": self.delta_inboard,
            "delta_rate": self.delta_rate, "n_prop_rate": self.n_prop_rate,
            "n_bt_rate": self.n_bt_rate, "n_prop_max": self.n_prop_max,
            "n_bt_max": self.n_bt_max, "kt0": self.kt0,
        }
        for name, value in pos.items():
            if not value > 0.0:
                raise ValueError(f"invariant {name} > 0 violated, "
                                 f"got {value}")
        for name, value in (("m_x", self.m_x), ("m_y", self.m_y),
                            ("i_zz", self.i_zz), ("j_zz", self.j_zz)):
            if value < 0.0:
                raise ValueError(f"{name} must be non-negative, got {value}")
        if self.n_strips < 2:
            raise ValueError("n_strips must be at least 2")
        for name, value in (("limit_rudder", self.limit_rudder),
                            ("limit_prop", self.limit_prop),
                            ("limit_thruster", self.limit_thruster)):
            if not 0.0 < value <= 1.0:
                raise ValueError(f"{name} must lie in (0, 1], got {value}")
        if not 0.0 <= self.wake_fraction < 1.0:
            raise ValueError("wake_fraction must lie in [0, 1)")
        if not 0.0 <= self.thrust_deduction < 1.0:
            raise ValueError("thrust_deduction must lie in [0, 1)")
        if not 0.0 <= self.eta_slipstream <= 1.0:
            raise ValueError("eta_slipstream must lie in [0, 1]")
        # The coupled sway/yaw acceleration solve must be well posed.  Both
        # mass-matrix determinant variants are required positive (the sway row
        # carries mass_y; a surge-mass pairing is checked as well for safety).
        xgm = self.x_g * self.mass
        if not self.mass_y * self.i_zm - xgm ** 2 > 0.0:
            raise ValueError("sway/yaw mass matrix is not positive definite")
        if not self.mass_x * self.i_zm - xgm ** 2 > 0.0:
            raise ValueError("surge/yaw inertia pairing is not positive definite")

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def default_ship() -> ShipParams:
    """Bundled 3 m twin-rudder model-ship parameter set."""
    p = ShipParams(
        length=3.0,
        breadth=0.40,
        draft=0.17,
        mass=143.0,
        x_g=0.05,
        u_nominal=0.75,
        m_x=7.0,
        m_y=129.0,
        i_zz=80.0,
        j_zz=41.0,
    )
    p.validate()
    return p

"""Direct multiple-shooting transcription of the berthing planning problem.

The continuous problem — steer the ship from a start state to the berth pose
while staying inside the basin, inside the approach-speed corridor, and
inside actuator limits — is discretized on ``n_segments`` equal time
segments.  The decision vector owns the final time, one state per knot, and
one command vector per segment; each knot state is shared by its two
neighboring segments, so trajectory continuity is structural and only the
segment-integration mismatch ("defect") appears as an equality constraint.

Conventions baked into the discretization:

* Commands are piecewise constant over a segment.  The actuator rate model
  runs during segment integration: at the start of segment ``k`` the actual
  actuator value is the *previous* segment's command (the first segment
  starts exactly on its own command, i.e. the initial setting is assumed
  pre-applied).  This keeps each defect row a function of at most two
  command vectors and two knot states.
* All constraint rows are nondimensionalized (positions by ship length,
  heading by pi, speeds by the nominal approach speed, yaw rate by nominal
  speed over length) so one feasibility tolerance is meaningful across rows.
* The speed corridor is enforced at interior knots except the last one.
  The first knot is exempt because the start state is prescribed data — it
  may lie outside the corridor, and penalizing it would make every such
  problem trivially infeasible.  The final knot is exempt because the berth
  pose is already pinned by the terminal equality and the berth-distance
  gradient is singular at zero distance.
* Collision keep-in comes in two selectable forms: a smooth signed-depth
  surrogate (default; softmin over the footprint vertices of the per-vertex
  signed boundary depth) suitable for gradient-based solving, and the
  winding-angle equality form retained for audits.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .constraints import (ActuatorBounds, SpeedLimitCoefficients,
                          build_actuator_bounds, speed_limits)
from .dynamics import derivative_arrays, rk4_step_arrays
from .geometry import TWO_PI, Polygon, ShipDomain, softmin
from .ship import ShipParams
from .states import N_STATES, State, WindCondition

__all__ = [
    "OcpSpec", "DecisionLayout", "NlpProblem", "scale_vector",
    "linear_initial_guess", "paced_initial_guess", "build_nlp",
    "forward_rollout", "simulate_plan",
]


def scale_vector(p: ShipParams) -> np.ndarray:
    """Per-state nondimensionalization scales (x0, y0, psi, u_s, v_m, r)."""
    return np.array([p.length, p.length, np.pi, p.u_nominal, p.u_nominal,
                     p.u_nominal / p.length])


# ----------------------------------------------------------------------
# problem specification
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class OcpSpec:
    """Data defining one berthing planning problem.

    ``fixed_n_prop`` pins the propeller revolution to a constant and removes
    it from the decision vector (three commands per segment instead of
    four).  ``state_bounds`` is a (2, 6) array of per-state lower/upper
    boxes; when omitted, generous defaults are derived from the basin
    extent and the nominal speed.
    """

    ship: ShipParams
    basin: Polygon
    x0: State
    xf: State
    wind: WindCondition = WindCondition(0.0, 0.0)
    n_segments: int = 30
    substeps: int = 4
    tf_bounds: tuple = (1.0, 600.0)
    fixed_n_prop: float | None = None
    speed_constraint: bool = True
    collision_constraint: bool = True
    collision_mode: str = "smooth"
    coefficients: SpeedLimitCoefficients = field(
        default_factory=SpeedLimitCoefficients)
    berth_point: tuple | None = None
    domain: ShipDomain | None = None
    beta_softmin: float = 20.0
    objective_mode: str = "product"
    state_bounds: np.ndarray | None = None

    def __post_init__(self):
        if self.berth_point is None:
            object.__setattr__(self, "berth_point",
                               (self.xf.x0, self.xf.y0))
        if self.domain is None:
            object.__setattr__(self, "domain",
                               ShipDomain.for_ship(self.ship))
        if self.state_bounds is None:
            object.__setattr__(self, "state_bounds",
                               self._default_state_bounds())
        else:
            sb = np.asarray(self.state_bounds, dtype=float).reshape(2, 6)
            object.__setattr__(self, "state_bounds", sb)

    def _default_state_bounds(self) -> np.ndarray:
        (bx_lo, by_lo), (bx_hi, by_hi) = self.basin.bounds()
        p = self.ship
        margin = p.length
        lo = np.array([bx_lo - margin, by_lo - margin, -TWO_PI,
                       -0.5 * p.u_nominal, -0.8 * p.u_nominal,
                       -2.0 * p.u_nominal / p.length])
        hi = np.array([bx_hi + margin, by_hi + margin, TWO_PI,
                       1.6 * p.u_nominal, 0.8 * p.u_nominal,
                       2.0 * p.u_nominal / p.length])
        return np.stack([lo, hi])

    # -- derived sizes -------------------------------------------------
    @property
    def n_knots(self) -> int:
        return self.n_segments + 1

    @property
    def n_controls(self) -> int:
        return 3 if self.fixed_n_prop is not None else 4

    @property
    def layout(self) -> "DecisionLayout":
        return DecisionLayout(self.n_segments, self.n_controls)

    @property
    def actuator_bounds(self) -> ActuatorBounds:
        return build_actuator_bounds(self.ship, self.fixed_n_prop)

    @property
    def control_channels(self) -> tuple:
        """Decision-vector channel indices into the 4-channel command."""
        return (0, 1, 3) if self.fixed_n_prop is not None else (0, 1, 2, 3)

    def expand_controls(self, controls) -> np.ndarray:
        """Map decision controls ``(..., n_u)`` to full commands ``(..., 4)``."""
        c = np.asarray(controls, dtype=float)
        if c.shape[-1] == 4:
            return c
        full = np.empty(c.shape[:-1] + (4,))
        full[..., 0] = c[..., 0]
        full[..., 1] = c[..., 1]
        full[..., 2] = self.fixed_n_prop
        full[..., 3] = c[..., 2]
        return full

    def validate(self) -> None:
        if self.n_segments < 2:
            raise ValueError("n_segments must be at least 2")
        if self.substeps < 1:
            raise ValueError("substeps must be at least 1")
        t_lo, t_hi = self.tf_bounds
        if not (0.0 < t_lo < t_hi):
            raise ValueError("tf bounds must satisfy 0 < lower < upper")
        if self.collision_mode not in ("smooth", "winding"):
            raise ValueError("collision_mode must be 'smooth' or 'winding'")
        if self.objective_mode not in ("product", "sum"):
            raise ValueError("objective_mode must be 'product' or 'sum'")
        if self.beta_softmin <= 0.0:
            raise ValueError("beta_softmin must be positive")
        self.ship.validate()
        self.coefficients.validate()
        sb = self.state_bounds
        if np.any(sb[0] >= sb[1]):
            raise ValueError("state bounds must satisfy lower < upper")
        for name, s in (("x0", self.x0), ("xf", self.xf)):
            arr = s.as_array()
            if np.any(arr < sb[0]) or np.any(arr > sb[1]):
                raise ValueError(f"{name} lies outside the state bounds")
            verts = self.domain.vertices(arr)
            wn = self.basin.winding_angle(verts)
            if not np.all(np.abs(wn - TWO_PI) <= np.pi):
                raise ValueError(
                    f"{name} footprint is not inside the basin polygon")


# ----------------------------------------------------------------------
# decision-vector layout
# ----------------------------------------------------------------------

class DecisionLayout:
    """Packing of (tf, knot states, segment commands) into one flat vector.

    Index 0 is the final time, followed by the knot states row-major
    ``(n_knots, 6)``, then the segment commands row-major
    ``(n_segments, n_controls)``.
    """

    def __init__(self, n_segments: int, n_controls: int):
        if n_segments < 1:
            raise ValueError("n_segments must be positive")
        if n_controls not in (3, 4):
            raise ValueError("n_controls must be 3 or 4")
        self.n_segments = n_segments
        self.n_knots = n_segments + 1
        self.n_controls = n_controls
        self.n_state_entries = N_STATES * self.n_knots
        self.dim = 1 + self.n_state_entries + n_controls * n_segments
        self.state_slice = slice(1, 1 + self.n_state_entries)
        self.control_slice = slice(1 + self.n_state_entries, self.dim)

    def pack(self, tf: float, states, controls) -> np.ndarray:
        states = np.asarray(states, dtype=float)
        controls = np.asarray(controls, dtype=float)
        if states.shape != (self.n_knots, N_STATES):
            raise ValueError(
                f"states must have shape {(self.n_knots, N_STATES)}, "
                f"got {states.shape}")
        if controls.shape != (self.n_segments, self.n_controls):
            raise ValueError(
                f"controls must have shape "
                f"{(self.n_segments, self.n_controls)}, got {controls.shape}")
        return np.concatenate([[float(tf)], states.ravel(), controls.ravel()])

    def unpack(self, x):
        """Split ``(..., dim)`` into (tf, states, controls) views."""
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dim:
            raise ValueError(f"decision vector must have length {self.dim}, "
                             f"got {x.shape[-1]}")
        tf = x[..., 0]
        states = x[..., self.state_slice].reshape(
            x.shape[:-1] + (self.n_knots, N_STATES))
        controls = x[..., self.control_slice].reshape(
            x.shape[:-1] + (self.n_segments, self.n_controls))
        return tf, states, controls


# ----------------------------------------------------------------------
# initial guess
# ----------------------------------------------------------------------

def linear_initial_guess(spec: OcpSpec, tf_guess: float | None = None
                         ) -> np.ndarray:
    """Straight-line knot states and neutral commands, clipped into bounds.

    States interpolate the endpoints component-wise; rudders and thruster
    start at zero and the propeller (when free) at mid-range.  With the
    terminal knot exactly on the berth pose the objective starts at zero,
    so the first iterations are driven purely by constraint restoration.
    """
    t_lo, t_hi = spec.tf_bounds
    if tf_guess is None:
        tf_guess = 0.5 * (t_lo + t_hi)
    tf = float(np.clip(tf_guess, t_lo, t_hi))
    lay = spec.layout
    alpha = np.linspace(0.0, 1.0, lay.n_knots)[:, None]
    states = (1.0 - alpha) * spec.x0.as_array() + alpha * spec.xf.as_array()
    states = np.clip(states, spec.state_bounds[0], spec.state_bounds[1])
    bounds = spec.actuator_bounds
    neutral = np.zeros(4)
    neutral[2] = 0.5 * (bounds.lower[2] + bounds.upper[2])
    neutral = np.clip(neutral, bounds.lower, bounds.upper)
    controls = np.tile(neutral[list(spec.control_channels)],
                       (lay.n_segments, 1))
    return lay.pack(tf, states, controls)


def _braking_trim(spec: OcpSpec, u: float, du_target: float) -> float:
    """Symmetric toe-out angle whose surge rate matches ``du_target``.

    In fixed-revolution mode the propeller pushes toward an equilibrium
    speed far above the approach corridor, so holding a crawl requires the
    rudder pair toed out into the race.  A symmetric pair (port negative,
    starboard positive) brakes without net sway force or yaw moment, which
    makes it the right open-loop trim for a straight approach.  Clipped to
    the deflection limits; solved by bisection on the straight-line surge
    derivative (no wind).
    """
    bounds = spec.actuator_bounds
    limit = float(min(-bounds.lower[0], bounds.upper[1]))
    x = np.array([0.0, 0.0, 0.0, u, 0.0, 0.0])

    def rate(delta):
        act = np.array([-delta, delta, spec.fixed_n_prop, 0.0])
        return float(derivative_arrays(x, act, 0.0, 0.0, spec.ship)[3])

    if rate(0.0) <= du_target:
        return 0.0
    if rate(limit) >= du_target:
        return limit
    lo, hi = 0.0, limit
    for _ in range(40):
        mid = 0.5 * (lo + hi)
        if rate(mid) > du_target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def paced_initial_guess(spec: OcpSpec, tf_guess: float | None = None,
                        fraction: float = 0.5) -> np.ndarray:
    """Knot states that follow the approach-speed corridor to the berth.

    The straight-line guess spaces knots evenly in distance, which implies a
    constant pace — but the corridor demands fast-far/slow-near, so on long
    approaches the late knots start far outside the speed limits and the
    solver must re-time the whole trajectory to repair them.  Here the knots
    instead slide along the start-to-berth chord at the speed the corridor
    allows at their current berth distance (at ``fraction`` between the
    lower and upper bound), and surge matches that pace.  Only local
    dynamics defects remain for restoration.  Heading and the remaining
    velocity components interpolate linearly; the first and last knots keep
    the exact start and berth states.  In fixed-revolution mode the rudder
    pair is set to the per-segment braking trim that holds this pace, so
    the commands start near the force balance instead of at neutral.
    """
    t_lo, t_hi = spec.tf_bounds
    if tf_guess is None:
        tf_guess = 0.5 * (t_lo + t_hi)
    tf = float(np.clip(tf_guess, t_lo, t_hi))
    lay = spec.layout
    x0 = spec.x0.as_array()
    xf = spec.xf.as_array()
    berth = np.asarray(spec.berth_point, dtype=float)
    chord = x0[:2] - berth
    d0 = float(np.hypot(*chord))
    direction = chord / d0 if d0 > 0.0 else np.zeros(2)

    def pace(d):
        u_min, u_max = speed_limits(max(d, 0.0), spec.ship, spec.coefficients)
        return (1.0 - fraction) * u_min + fraction * u_max

    # midpoint-rule integration of dD/dt = -pace(D) on a fine grid
    n_sub = 20
    h = tf / (lay.n_segments * n_sub)
    dist = np.empty(lay.n_knots)
    dist[0] = d = d0
    for k in range(lay.n_segments):
        for _ in range(n_sub):
            d_half = max(d - 0.5 * h * pace(d), 0.0)
            d = max(d - h * pace(d_half), 0.0)
        dist[k + 1] = d

    alpha = np.linspace(0.0, 1.0, lay.n_knots)[:, None]
    states = (1.0 - alpha) * x0 + alpha * xf
    states[:, :2] = berth + dist[:, None] * direction
    states[:, 3] = [pace(dk) for dk in dist]
    states[0] = x0
    states[-1] = xf
    states = np.clip(states, spec.state_bounds[0], spec.state_bounds[1])
    bounds = spec.actuator_bounds
    neutral = np.zeros(4)
    neutral[2] = 0.5 * (bounds.lower[2] + bounds.upper[2])
    neutral = np.clip(neutral, bounds.lower, bounds.upper)
    commands = np.tile(neutral, (lay.n_segments, 1))
    if spec.fixed_n_prop is not None:
        dt_seg = tf / lay.n_segments
        for k in range(lay.n_segments):
            u_mid = 0.5 * (states[k, 3] + states[k + 1, 3])
            slope = (states[k + 1, 3] - states[k, 3]) / dt_seg
            delta = _braking_trim(spec, float(u_mid), float(slope))
            commands[k, 0] = -delta
            commands[k, 1] = delta
    controls = commands[:, list(spec.control_channels)]
    return lay.pack(tf, states, controls)


# ----------------------------------------------------------------------
# batched constraint evaluation
# ----------------------------------------------------------------------

def _segment_end_states(spec: OcpSpec, tf, states, controls) -> np.ndarray:
    """Integrate every segment of every batch row in one flat batch.

    Parameters are batched: ``tf (B,)``, ``states (B, n_knots, 6)``,
    ``controls (B, n_segments, n_u)``.  Returns the integrated end state of
    each segment, shape ``(B, n_segments, 6)``.
    """
    lay = spec.layout
    b = states.shape[0]
    n_s = lay.n_segments
    commands = spec.expand_controls(controls)            # (B, n_s, 4)
    start_act = np.concatenate([commands[:, :1], commands[:, :-1]], axis=1)
    x = states[:, :-1, :].reshape(b * n_s, N_STATES)
    act = start_act.reshape(b * n_s, 4)
    cmd = commands.reshape(b * n_s, 4)
    dt = np.repeat(tf / (n_s * spec.substeps), n_s)
    for _ in range(spec.substeps):
        x, act = rk4_step_arrays(x, act, cmd, spec.wind.gamma_t,
                                 spec.wind.speed, dt, spec.ship)
    return x.reshape(b, n_s, N_STATES)


def _collision_rows(spec: OcpSpec, states) -> np.ndarray:
    """Keep-in rows for interior knots, ``states (B, m, 6)``.

    Smooth mode (one row per knot, ``(B, m)``): softmin over footprint
    vertices of the signed boundary depth, divided by ship length;
    non-negative certifies every vertex inside with margin.  Winding mode
    (one row per knot and vertex, ``(B, m * n_v)``): winding-angle
    deviation from one full turn in radians; zero means enclosed, an
    exterior vertex reads minus one full turn.
    """
    verts = spec.domain.vertices(states)                 # (B, m, n_v, 2)
    if spec.collision_mode == "smooth":
        depth = spec.basin.signed_depth(verts, beta=spec.beta_softmin)
        return softmin(depth, spec.beta_softmin, axis=-1) / spec.ship.length
    wn = spec.basin.winding_angle(verts) - TWO_PI
    return wn.reshape(wn.shape[0], -1)


def _objective_terms(spec: OcpSpec, tf, states):
    """Weighted terminal error and trapezoid error integral, batched."""
    scales = scale_vector(spec.ship)
    err = (states - spec.xf.as_array()) / scales
    e2 = np.sum(err * err, axis=-1)                      # (B, n_knots)
    terminal = e2[..., -1]
    dt = tf / spec.n_segments
    integral = dt * (0.5 * e2[..., 0] + 0.5 * e2[..., -1]
                     + np.sum(e2[..., 1:-1], axis=-1))
    return terminal, integral


# ----------------------------------------------------------------------
# assembled problem
# ----------------------------------------------------------------------

@dataclass
class NlpProblem:
    """A smooth NLP: minimize f(x) s.t. ceq(x) = 0, cin(x) >= 0, lb<=x<=ub.

    ``evaluate_batch`` evaluates many decision vectors in one vectorized
    pass (used for finite-difference Jacobians).  ``eq_groups`` and
    ``in_groups`` name every constraint row exactly once as
    ``(group name, slice)`` pairs.
    """

    n: int
    n_eq: int
    n_in: int
    lower: np.ndarray
    upper: np.ndarray
    eq_groups: tuple
    in_groups: tuple
    evaluate_batch: Callable[[np.ndarray], tuple]
    spec: OcpSpec | None = None

    def evaluate(self, x) -> tuple:
        f, ceq, cin = self.evaluate_batch(np.asarray(x, dtype=float)[None, :])
        return float(f[0]), ceq[0], cin[0]

    def row_group(self, family: str, index: int) -> str:
        groups = self.eq_groups if family == "eq" else self.in_groups
        for name, sl in groups:
            if sl.start <= index < sl.stop:
                return name
        raise IndexError(f"no {family} row {index}")


def _interior(states):
    """Knots 2 .. n_knots-1 (1-based), i.e. all but the two endpoints."""
    return states[:, 1:-1, :]


def build_nlp(spec: OcpSpec) -> NlpProblem:
    """Assemble evaluators, bounds, and row metadata for ``spec``."""
    spec.validate()
    lay = spec.layout
    scales = scale_vector(spec.ship)
    x0_arr = spec.x0.as_array()
    xf_arr = spec.xf.as_array()
    berth = np.asarray(spec.berth_point, dtype=float)
    n_interior = lay.n_knots - 2

    eq_groups = [("defect", slice(0, 6 * lay.n_segments)),
                 ("initial", slice(6 * lay.n_segments, 6 * lay.n_segments + 6)),
                 ("terminal", slice(6 * lay.n_segments + 6,
                                    6 * lay.n_segments + 12))]
    n_eq = 6 * lay.n_segments + 12
    winding_rows = (spec.collision_constraint
                    and spec.collision_mode == "winding")
    if winding_rows:
        n_wind = n_interior * spec.domain.n_vertices
        eq_groups.append(("collision", slice(n_eq, n_eq + n_wind)))
        n_eq += n_wind

    in_groups = []
    n_in = 0
    if spec.speed_constraint:
        in_groups.append(("speed", slice(0, 2 * n_interior)))
        n_in = 2 * n_interior
    if spec.collision_constraint and not winding_rows:
        in_groups.append(("collision", slice(n_in, n_in + n_interior)))
        n_in += n_interior

    def evaluate_batch(xb: np.ndarray):
        # trial points with unstable step sizes overflow to non-finite
        # values by design (the caller rejects them); keep that quiet
        with np.errstate(over="ignore", invalid="ignore"):
            xb = np.asarray(xb, dtype=float)
            tf, states, controls = lay.unpack(xb)
            b = xb.shape[0]

            terminal, integral = _objective_terms(spec, tf, states)
            if spec.objective_mode == "product":
                f = terminal * integral
            else:
                f = terminal + integral

            x_end = _segment_end_states(spec, tf, states, controls)
            defect = (states[:, 1:, :] - x_end) / scales
            ceq = [defect.reshape(b, -1),
                   (states[:, 0, :] - x0_arr) / scales,
                   (states[:, -1, :] - xf_arr) / scales]
            cin = []
            interior = _interior(states)
            if spec.speed_constraint:
                dist = np.hypot(interior[..., 0] - berth[0],
                                interior[..., 1] - berth[1])
                u_min, u_max = speed_limits(dist, spec.ship,
                                            spec.coefficients)
                u = interior[..., 3]
                cin.append(np.concatenate(
                    [(u - u_min) / spec.ship.u_nominal,
                     (u_max - u) / spec.ship.u_nominal], axis=-1))
            if spec.collision_constraint:
                rows = _collision_rows(spec, interior)
                (ceq if winding_rows else cin).append(rows)
            return (f,
                    np.concatenate(ceq, axis=-1) if ceq
                    else np.zeros((b, 0)),
                    np.concatenate(cin, axis=-1) if cin
                    else np.zeros((b, 0)))

    lower = np.empty(lay.dim)
    upper = np.empty(lay.dim)
    lower[0], upper[0] = spec.tf_bounds
    lower[lay.state_slice] = np.tile(spec.state_bounds[0], lay.n_knots)
    upper[lay.state_slice] = np.tile(spec.state_bounds[1], lay.n_knots)
    act = spec.actuator_bounds
    channels = list(spec.control_channels)
    lower[lay.control_slice] = np.tile(act.lower[channels], lay.n_segments)
    upper[lay.control_slice] = np.tile(act.upper[channels], lay.n_segments)

    return NlpProblem(n=lay.dim, n_eq=n_eq, n_in=n_in, lower=lower,
                      upper=upper, eq_groups=tuple(eq_groups),
                      in_groups=tuple(in_groups),
                      evaluate_batch=evaluate_batch, spec=spec)


# ----------------------------------------------------------------------
# simulation helpers
# ----------------------------------------------------------------------

def forward_rollout(spec: OcpSpec, tf: float, controls) -> np.ndarray:
    """Chain segment integrations from the start state; returns knot states.

    Follows exactly the defect convention (actuator starts each segment on
    the previous command), so packing the result with the same ``tf`` and
    ``controls`` yields a decision vector with zero defects.
    """
    lay = spec.layout
    commands = spec.expand_controls(np.asarray(controls, dtype=float))
    dt = tf / (lay.n_segments * spec.substeps)
    knots = np.empty((lay.n_knots, N_STATES))
    knots[0] = spec.x0.as_array()
    x = knots[0]
    for k in range(lay.n_segments):
        act = commands[k - 1] if k > 0 else commands[0]
        cmd = commands[k]
        for _ in range(spec.substeps):
            x, act = rk4_step_arrays(x, act, cmd, spec.wind.gamma_t,
                                     spec.wind.speed, dt, spec.ship)
        knots[k + 1] = x
    return knots


def simulate_plan(spec: OcpSpec, x: np.ndarray):
    """Re-integrate a decision vector at substep resolution.

    Returns ``(times, states, commanded, actual)`` with one row per substep
    boundary (``n_segments * substeps + 1`` rows).  The commanded columns
    repeat each segment's command; the actual columns show the rate-limited
    actuator trajectory under the segment-start convention.
    """
    lay = spec.layout
    tf, knots, controls = lay.unpack(np.asarray(x, dtype=float))
    tf = float(tf)
    commands = spec.expand_controls(controls)
    dt = tf / (lay.n_segments * spec.substeps)
    n_rows = lay.n_segments * spec.substeps + 1
    times = np.linspace(0.0, tf, n_rows)
    states = np.empty((n_rows, N_STATES))
    commanded = np.empty((n_rows, 4))
    actual = np.empty((n_rows, 4))
    states[0] = knots[0]
    commanded[0] = commands[0]
    actual[0] = commands[0]
    row = 0
    for k in range(lay.n_segments):
        x_cur = knots[k]
        act = commands[k - 1] if k > 0 else commands[0]
        for _ in range(spec.substeps):
            x_cur, act = rk4_step_arrays(x_cur, act, commands[k],
                                         spec.wind.gamma_t, spec.wind.speed,
                                         dt, spec.ship)
            row += 1
            states[row] = x_cur
            commanded[row] = commands[k]
            actual[row] = act
    return times, states, commanded, actual

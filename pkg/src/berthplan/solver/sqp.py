"""Sequential quadratic programming with quasi-Newton Hessians.

The solver iterates: finite-difference gradients/Jacobians (batched through
the problem's vectorized evaluator), a damped-BFGS model of the Lagrangian
Hessian, a convex QP subproblem for the step and multiplier estimates, and
a backtracking line search on the l1 exact-penalty merit function with
Powell's multiplier-driven penalty update.

Internally the variables are affinely mapped onto the unit box (where both
bounds are finite), which makes the identity a sensible initial Hessian,
gives finite differencing a uniform step, and makes the step tolerance
meaningful across otherwise wildly different variable magnitudes.
Constraint rows, the objective, and the reported multipliers are unchanged
by this mapping.

Everything is deterministic: no randomization, no timing-dependent
branches, so identical inputs produce identical iterates and traces.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from .qp import solve_qp

__all__ = ["SolverOptions", "IterationRecord", "SolverResult", "solve",
           "kkt_residual"]


@dataclass(frozen=True)
class SolverOptions:
    max_iterations: int = 400
    tol_con: float = 1e-6        # feasibility, on constraint row values
    tol_opt: float = 1e-5        # KKT residual
    tol_step: float = 1e-10      # normalized step infinity-norm
    fd_scheme: str = "forward"   # or "central"
    fd_step: float | None = None  # base step; default sqrt(eps) / cbrt(eps)
    qp_max_iterations: int | None = None
    armijo_c1: float = 1e-4
    backtrack_factor: float = 0.5
    max_backtracks: int = 25
    penalty_init: float = 1.0
    penalty_cap: float = 1e12
    stall_window: int = 80       # infeasible iterations without progress

    def validate(self) -> None:
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if self.stall_window < 10:
            raise ValueError("stall_window must be at least 10")
        for name in ("tol_con", "tol_opt", "tol_step", "penalty_init"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be positive")
        if self.fd_scheme not in ("forward", "central"):
            raise ValueError("fd_scheme must be 'forward' or 'central'")


@dataclass
class IterationRecord:
    iteration: int
    objective: float
    violation: float
    step_norm: float
    penalty: float
    backtracks: int
    elastic: bool


@dataclass
class SolverResult:
    """Outcome of one solve.

    ``status``: ``feasible-optimal`` (KKT point within tolerances),
    ``feasible-stalled`` (feasible but progress stopped before the
    optimality test passed), ``infeasible`` (stopped without reaching
    feasibility), or ``max-iterations`` (iteration cap with constraints
    still violated — counted as a failure by study reports).
    """

    status: str
    x: np.ndarray
    iterations: int
    objective: float
    max_violation: float
    kkt: float
    wall_time: float
    message: str = ""
    trace: list = field(default_factory=list)

    @property
    def feasible(self) -> bool:
        return self.status.startswith("feasible")


def _violation(ceq: np.ndarray, cin: np.ndarray) -> float:
    worst = 0.0
    if ceq.size:
        worst = float(np.max(np.abs(ceq)))
    if cin.size:
        worst = max(worst, float(np.max(-cin, initial=0.0)))
    return worst


def _merit(f: float, ceq: np.ndarray, cin: np.ndarray, nu: float) -> float:
    total = f
    if ceq.size:
        total += nu * float(np.sum(np.abs(ceq)))
    if cin.size:
        total += nu * float(np.sum(np.maximum(0.0, -cin)))
    return total


def kkt_residual(grad_f, jac_eq, jac_in, ceq, cin, lam_eq, mu_in,
                 at_lower, at_upper) -> float:
    """Infinity norm of stationarity, complementarity, and violation.

    Bound multipliers are eliminated by projection: at an active lower
    bound only a negative Lagrangian gradient counts as a defect (and
    symmetrically at an upper bound).
    """
    grad_lag = np.array(grad_f, dtype=float)
    if ceq.size:
        grad_lag -= jac_eq.T @ lam_eq
    if cin.size:
        grad_lag -= jac_in.T @ mu_in
    stat = np.abs(grad_lag)
    stat[at_lower] = np.maximum(0.0, -grad_lag[at_lower])
    stat[at_upper] = np.maximum(0.0, grad_lag[at_upper])
    comp = float(np.max(np.abs(mu_in * cin), initial=0.0)) if cin.size else 0.0
    return max(float(np.max(stat, initial=0.0)), comp, _violation(ceq, cin))


class _Normalized:
    """Affine map between solver variables y and problem variables x."""

    def __init__(self, lower: np.ndarray, upper: np.ndarray):
        finite = np.isfinite(lower) & np.isfinite(upper)
        self.offset = np.where(finite, lower, 0.0)
        self.span = np.where(finite, upper - lower, 1.0)
        if np.any(self.span <= 0.0):
            raise ValueError("variable bounds must satisfy lower < upper")
        self.lower_y = np.where(finite, 0.0, lower)
        self.upper_y = np.where(finite, 1.0, upper)

    def to_x(self, y: np.ndarray) -> np.ndarray:
        return self.offset + self.span * y

    def to_y(self, x: np.ndarray) -> np.ndarray:
        return (x - self.offset) / self.span


def _fd_jacobians(eval_batch, y, f0, ceq0, cin0, norm: _Normalized,
                  options: SolverOptions):
    """Batched finite-difference gradient and Jacobians in y-space."""
    n = y.size
    if options.fd_scheme == "forward":
        base = options.fd_step or np.sqrt(np.finfo(float).eps)
        h = base * (1.0 + np.abs(y))
        # difference backwards where the forward probe would leave the box
        flip = (y + h > norm.upper_y) & (y - h >= norm.lower_y)
        h = np.where(flip, -h, h)
        trials = y[None, :] + np.diag(h)
        f1, ceq1, cin1 = eval_batch(norm.to_x(trials))
        inv = 1.0 / h
        grad = (f1 - f0) * inv
        jac_eq = (ceq1 - ceq0[None, :]).T * inv[None, :]
        jac_in = (cin1 - cin0[None, :]).T * inv[None, :]
    else:
        base = options.fd_step or float(np.cbrt(np.finfo(float).eps))
        h = base * (1.0 + np.abs(y))
        trials = np.vstack([y[None, :] + np.diag(h),
                            y[None, :] - np.diag(h)])
        f1, ceq1, cin1 = eval_batch(norm.to_x(trials))
        inv = 0.5 / h
        grad = (f1[:n] - f1[n:]) * inv
        jac_eq = (ceq1[:n] - ceq1[n:]).T * inv[None, :]
        jac_in = (cin1[:n] - cin1[n:]).T * inv[None, :]
    return grad, jac_eq, jac_in


def _nonfinite_diagnostic(nlp, ceq, cin) -> str:
    parts = []
    for family, values in (("eq", ceq), ("in", cin)):
        bad = np.where(~np.isfinite(values))[0]
        if bad.size:
            row = int(bad[0])
            group = (nlp.row_group(family, row)
                     if hasattr(nlp, "row_group") else family)
            parts.append(f"{family} row {row} ({group})")
    return "non-finite constraint values at " + ", ".join(parts) if parts \
        else "non-finite objective value"


def solve(nlp, x_init, options: SolverOptions | None = None) -> SolverResult:
    """Run SQP from ``x_init`` until a stop condition fires."""
    options = options or SolverOptions()
    options.validate()
    start = time.perf_counter()

    norm = _Normalized(np.asarray(nlp.lower, dtype=float),
                       np.asarray(nlp.upper, dtype=float))
    x0 = np.asarray(x_init, dtype=float)
    clipped = np.clip(x0, nlp.lower, nlp.upper)
    if not np.array_equal(clipped, x0):
        warnings.warn("initial point clamped into variable bounds",
                      stacklevel=2)
    y = norm.to_y(clipped)
    n = y.size

    def evaluate(y_point):
        f, ceq, cin = nlp.evaluate_batch(norm.to_x(y_point)[None, :])
        return float(f[0]), ceq[0], cin[0]

    f, ceq, cin = evaluate(y)
    if not (np.isfinite(f) and np.all(np.isfinite(ceq))
            and np.all(np.isfinite(cin))):
        return SolverResult(
            status="infeasible", x=norm.to_x(y), iterations=0,
            objective=f, max_violation=np.inf, kkt=np.inf,
            wall_time=time.perf_counter() - start,
            message=_nonfinite_diagnostic(nlp, ceq, cin))

    hess = np.eye(n)
    nu = options.penalty_init
    sigma = 0.0  # Levenberg damping on the QP model
    resets_in_row = 0
    best_violation = np.inf
    stall_count = 0
    lam_eq = np.zeros(nlp.n_eq)
    mu_in = np.zeros(nlp.n_in)
    grad = jac_eq = jac_in = None
    trace: list[IterationRecord] = []
    status = "max-iterations"
    message = ""
    kkt = np.inf
    iteration = 0

    for iteration in range(1, options.max_iterations + 1):
        grad_new, jac_eq_new, jac_in_new = _fd_jacobians(
            nlp.evaluate_batch, y, f, ceq, cin, norm, options)
        if not (np.all(np.isfinite(grad_new))
                and np.all(np.isfinite(jac_eq_new))
                and np.all(np.isfinite(jac_in_new))):
            status = "infeasible" if _violation(ceq, cin) > options.tol_con \
                else "feasible-stalled"
            message = "non-finite derivatives"
            break

        def grad_lag(g, je, ji):
            # Lagrangian gradient with the latest multiplier estimates.
            gl = g.copy()
            if lam_eq.size:
                gl -= je.T @ lam_eq
            if mu_in.size:
                gl -= ji.T @ mu_in
            return gl

        # ---- damped BFGS update from the previous accepted step ------
        if grad is not None:
            s = y - y_prev
            curvature = (grad_lag(grad_new, jac_eq_new, jac_in_new)
                         - grad_lag(grad, jac_eq, jac_in))
            _bfgs_update(hess, s, curvature)
        grad, jac_eq, jac_in = grad_new, jac_eq_new, jac_in_new

        violation = _violation(ceq, cin)
        merit0 = _merit(f, ceq, cin, nu)
        hess_scale = max(float(np.trace(hess)) / n, 1e-8)
        accepted = False
        stop_status = None
        qp = None
        backtracks = 0
        # far from feasibility the linearization can make the full step
        # far too long; on a failed search, damp the model and retry
        for _damping_round in range(3):
            hess_qp = hess if sigma == 0.0 else hess + sigma * np.eye(n)
            qp = solve_qp(hess_qp, grad, jac_eq, ceq, jac_in, cin,
                          norm.lower_y - y, norm.upper_y - y,
                          max_iterations=options.qp_max_iterations)
            if qp.status != "optimal":
                stop_status = "infeasible" if violation > options.tol_con \
                    else "feasible-stalled"
                message = "quadratic subproblem unsolvable"
                break
            d = qp.x
            if not qp.elastic:
                # elastic multipliers are penalty artifacts of size
                # rho*slack; feeding them into the penalty update or the
                # BFGS curvature wrecks both, so dual estimates only
                # advance on clean solves
                lam_eq, mu_in = qp.lam_eq, qp.mu_in

            if _damping_round == 0:
                # ---- optimality test at the current point -----------
                at_lower = y <= norm.lower_y + 1e-12
                at_upper = y >= norm.upper_y - 1e-12
                kkt = kkt_residual(grad, jac_eq, jac_in, ceq, cin,
                                   lam_eq, mu_in, at_lower, at_upper)
                if violation <= options.tol_con \
                        and kkt <= options.tol_opt and not qp.elastic:
                    stop_status = "feasible-optimal"
                    trace.append(IterationRecord(iteration, f, violation,
                                                 0.0, nu, 0, qp.elastic))
                    break

            # ---- penalty update (multiplier driven) -----------------
            if not qp.elastic:
                lam_max = 0.0
                if lam_eq.size:
                    lam_max = float(np.max(np.abs(lam_eq)))
                if mu_in.size:
                    lam_max = max(lam_max, float(np.max(mu_in)))
                if nu < lam_max:
                    nu = min(max(lam_max, 0.5 * (nu + lam_max)),
                             options.penalty_cap)
                    merit0 = _merit(f, ceq, cin, nu)
            # make the step a descent direction for the merit function
            infeas_l1 = (float(np.sum(np.abs(ceq)))
                         + float(np.sum(np.maximum(0.0, -cin))))
            descent = float(grad @ d) - nu * infeas_l1
            if descent >= 0.0 and violation > options.tol_con \
                    and infeas_l1 > 0.0:
                nu = min(1.5 * (float(grad @ d) / infeas_l1 + 1.0),
                         options.penalty_cap)
                descent = float(grad @ d) - nu * infeas_l1
                merit0 = _merit(f, ceq, cin, nu)

            # ---- backtracking line search on the merit --------------
            # candidate steps are evaluated in blocks through the batched
            # evaluator: one extra column is nearly free next to the
            # per-call overhead, while deep backtracking paid it serially
            alphas = options.backtrack_factor ** np.arange(
                options.max_backtracks + 1)
            best = None
            soc_tried = False
            backtracks = 0
            idx = 0
            while idx < alphas.size and not accepted:
                # the full step usually passes, so probe it alone first
                # and only switch to blocks once backtracking starts
                block = alphas[idx:idx + (1 if idx == 0 else 8)]
                y_block = np.clip(y[None, :] + block[:, None] * d[None, :],
                                  norm.lower_y, norm.upper_y)
                f_b, ceq_b, cin_b = nlp.evaluate_batch(norm.to_x(y_block))
                for j in range(block.size):
                    backtracks = idx + j
                    alpha = float(block[j])
                    y_trial = y_block[j]
                    f_t, ceq_t, cin_t = float(f_b[j]), ceq_b[j], cin_b[j]
                    finite = (np.isfinite(f_t) and np.all(np.isfinite(ceq_t))
                              and np.all(np.isfinite(cin_t)))
                    if not finite:
                        continue
                    merit_t = _merit(f_t, ceq_t, cin_t, nu)
                    if best is None or merit_t < best[0]:
                        best = (merit_t, y_trial, f_t, ceq_t, cin_t, alpha)
                    if merit_t <= merit0 + options.armijo_c1 * alpha * min(
                            descent, 0.0):
                        accepted = True
                        break
                    if backtracks == 0 and not soc_tried:
                        # second-order correction: curved constraints can
                        # reject the whole step; retry with a correction
                        # built from the constraint values at the trial
                        # point under the same linearization
                        soc_tried = True
                        soc = solve_qp(
                            hess_qp, grad, jac_eq, ceq_t, jac_in, cin_t,
                            norm.lower_y - y_trial, norm.upper_y - y_trial,
                            max_iterations=options.qp_max_iterations)
                        if soc.status == "optimal":
                            y_soc = np.clip(y_trial + soc.x,
                                            norm.lower_y, norm.upper_y)
                            f_s, ceq_s, cin_s = evaluate(y_soc)
                            if np.isfinite(f_s) \
                                    and np.all(np.isfinite(ceq_s)) \
                                    and np.all(np.isfinite(cin_s)):
                                merit_s = _merit(f_s, ceq_s, cin_s, nu)
                                if merit_s < best[0]:
                                    best = (merit_s, y_soc, f_s, ceq_s,
                                            cin_s, alpha)
                                if merit_s <= merit0 + options.armijo_c1 \
                                        * min(descent, 0.0):
                                    y_trial, f_t, ceq_t, cin_t = \
                                        y_soc, f_s, ceq_s, cin_s
                                    accepted = True
                                    break
                idx += block.size
            if not accepted and best is not None and best[0] < merit0:
                # weak acceptance: the merit still improved
                accepted = True
                merit_t, y_trial, f_t, ceq_t, cin_t, alpha = best
            if accepted:
                break
            sigma = max(sigma * 50.0, 1e-2 * hess_scale)

        if stop_status is not None:
            status = stop_status
            break
        if not accepted:
            # a stale quasi-Newton model is the usual culprit; restart it
            # once and only stop when a fresh model also fails
            if resets_in_row < 1:
                resets_in_row += 1
                hess = np.eye(n)
                sigma = 0.0
                grad = None  # skip the next curvature update
                continue
            status = "infeasible" if violation > options.tol_con \
                else "feasible-stalled"
            message = "line search could not reduce the merit function"
            break
        resets_in_row = 0
        # adapt the damping for the next iteration from search effort;
        # near the feasible manifold the undamped model is trustworthy
        if _violation(ceq_t, cin_t) <= options.tol_con:
            sigma = 0.0
        elif backtracks >= 5:
            sigma = max(sigma * 10.0, 1e-3 * hess_scale)
        elif backtracks <= 1 and sigma > 0.0:
            sigma = 0.0 if sigma < 1e-6 * hess_scale else sigma / 5.0

        step_norm = float(np.max(np.abs(y_trial - y), initial=0.0))
        y_prev = y
        y, f, ceq, cin = y_trial, f_t, ceq_t, cin_t
        vio_now = _violation(ceq, cin)
        trace.append(IterationRecord(iteration, f, vio_now,
                                     step_norm, nu, backtracks, qp.elastic))

        # a long run of infeasible iterations with no violation progress
        # means the restoration is orbiting a local minimum of the
        # infeasibility; calling that early keeps failed attempts cheap
        if vio_now <= options.tol_con or vio_now < 0.99 * best_violation:
            stall_count = 0
        else:
            stall_count += 1
            if stall_count >= options.stall_window:
                status = "infeasible"
                message = "constraint violation stagnated"
                break
        best_violation = min(best_violation, vio_now)

        if step_norm <= options.tol_step * (1.0 + float(np.max(np.abs(y)))):
            status = "feasible-stalled" if _violation(ceq, cin) <= \
                options.tol_con else "infeasible"
            message = "step size below tolerance"
            break
    else:
        iteration = options.max_iterations

    # final status resolution for loop exhaustion
    violation = _violation(ceq, cin)
    if status == "max-iterations" and violation <= options.tol_con:
        # ran out of iterations while feasible; certify what we have
        status = "feasible-stalled"
        message = "iteration cap reached while feasible"

    # ---- independent feasibility audit ------------------------------
    if status.startswith("feasible"):
        f_chk, ceq_chk, cin_chk = (lambda r: (float(r[0][0]), r[1][0],
                                              r[2][0]))(
            nlp.evaluate_batch(norm.to_x(y)[None, :]))
        if _violation(ceq_chk, cin_chk) > options.tol_con:
            status = "infeasible"
            message = "re-audit contradicted feasibility"

    return SolverResult(status=status, x=norm.to_x(y), iterations=iteration,
                        objective=f, max_violation=violation, kkt=kkt,
                        wall_time=time.perf_counter() - start,
                        message=message, trace=trace)


def _bfgs_update(hess: np.ndarray, s: np.ndarray, y_diff: np.ndarray,
                 damping: float = 0.2) -> None:
    """Powell-damped BFGS update of ``hess`` in place."""
    s_norm = float(s @ s)
    if s_norm <= 1e-32:
        return
    hs = hess @ s
    s_hs = float(s @ hs)
    s_y = float(s @ y_diff)
    if s_y < damping * s_hs:
        theta = (1.0 - damping) * s_hs / (s_hs - s_y)
        y_diff = theta * y_diff + (1.0 - theta) * hs
        s_y = float(s @ y_diff)
    if s_y <= 1e-32 or s_hs <= 0.0:
        return
    hess -= np.outer(hs, hs) / s_hs
    hess += np.outer(y_diff, y_diff) / s_y

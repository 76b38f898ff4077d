"""Dense convex quadratic programming by the dual active-set method.

Solves

    minimize    1/2 d'H d + g'd
    subject to  A_eq d + b_eq  = 0
                A_in d + b_in >= 0
                lb <= d <= ub

for symmetric positive-definite ``H`` (the quasi-Newton model guarantees
this).  The core is the Goldfarb-Idnani dual method: start at the
unconstrained minimizer (dual feasible by construction), repeatedly add the
most violated constraint to the active set, taking dual steps that drop
blocking constraints as needed.  The inverse-Cholesky basis ``J`` and the
active-set triangle ``R`` are maintained by Givens rotations, so each
add/drop costs O(n^2).

Equality rows are added first and can never be dropped.  When the
linearized constraints are inconsistent (the dual is unbounded), the
wrapper re-solves an elastic relaxation with the offending rows moved into
a quadratic penalty and reports the residual slack, so the caller always
receives a usable step.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["QpResult", "solve_qp"]

_VIOLATION_TOL = 1e-11
_ZERO_TOL = 1e-13


@dataclass
class QpResult:
    """Solution of one QP.

    ``status`` is ``optimal`` or ``infeasible``.  ``slack`` is the worst
    constraint residual of the returned point (zero when the constraints
    were consistent); ``elastic`` marks steps obtained from the penalty
    relaxation.  Multipliers follow the Lagrangian
    ``f - lam'(A_eq d + b_eq) - mu'(A_in d + b_in) - mu_lb'(d - lb)
    - mu_ub'(ub - d)`` with ``mu`` non-negative.
    """

    x: np.ndarray
    status: str
    lam_eq: np.ndarray
    mu_in: np.ndarray
    mu_lb: np.ndarray
    mu_ub: np.ndarray
    iterations: int
    elastic: bool = False
    slack: float = 0.0


def _cholesky_with_jitter(h: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor, nudging near-singular matrices as needed."""
    jitter = 0.0
    scale = np.trace(h) / max(h.shape[0], 1)
    for _ in range(4):
        try:
            return np.linalg.cholesky(
                h if jitter == 0.0 else h + jitter * np.eye(h.shape[0]))
        except np.linalg.LinAlgError:
            jitter = max(1e-12 * scale, 10.0 * jitter, 1e-14)
    raise np.linalg.LinAlgError("Hessian model is not positive definite")


def _solve_upper(r: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Back substitution for a small upper-triangular system."""
    q = b.size
    out = np.empty(q)
    for i in range(q - 1, -1, -1):
        out[i] = (b[i] - r[i, i + 1:q] @ out[i + 1:q]) / r[i, i]
    return out


class _Rows:
    """Constraint rows n'd >= rhs (equalities first), with bookkeeping."""

    def __init__(self, a_eq, b_eq, a_in, b_in, lb, ub, n):
        normals = []
        rhs = []
        kinds = []          # ("eq"|"in"|"lb"|"ub", original index)
        self.n_eq = 0 if a_eq is None else a_eq.shape[0]
        if a_eq is not None:
            for i in range(a_eq.shape[0]):
                normals.append(a_eq[i])
                rhs.append(-b_eq[i])
                kinds.append(("eq", i))
        if a_in is not None:
            for i in range(a_in.shape[0]):
                normals.append(a_in[i])
                rhs.append(-b_in[i])
                kinds.append(("in", i))
        eye = np.eye(n)
        if lb is not None:
            for i in range(n):
                if np.isfinite(lb[i]):
                    normals.append(eye[i])
                    rhs.append(lb[i])
                    kinds.append(("lb", i))
        if ub is not None:
            for i in range(n):
                if np.isfinite(ub[i]):
                    normals.append(-eye[i])
                    rhs.append(-ub[i])
                    kinds.append(("ub", i))
        self.normals = (np.array(normals) if normals
                        else np.zeros((0, n)))
        self.rhs = np.array(rhs) if rhs else np.zeros(0)
        self.kinds = kinds

    def __len__(self):
        return len(self.kinds)


def _dual_active_set(h, g, rows: _Rows, max_iterations: int):
    """Core Goldfarb-Idnani loop.  Returns (x, u, active, signs, status, it).

    ``signs[j]`` records the orientation used for active equality rows (the
    method works with effective normals ``sign * n`` so a violated equality
    always looks like a violated >= constraint).
    """
    n = h.shape[0]
    lower = _cholesky_with_jitter(h)
    x = -np.linalg.solve(h, g)
    j_mat = np.linalg.inv(lower).T          # J = L^{-T}, J' H J = I
    r_mat = np.zeros((n, n))
    active: list[int] = []
    signs: list[float] = []
    u = np.zeros(0)
    q = 0
    iterations = 0
    pending_eq = list(range(rows.n_eq))
    skipped: set[int] = set()

    while iterations < max_iterations:
        iterations += 1
        # ---- select a violated constraint ---------------------------
        values = rows.normals @ x - rows.rhs
        sel = -1
        sign = 1.0
        if pending_eq:
            sel = pending_eq[0]
            sign = -1.0 if values[sel] > 0.0 else 1.0
            if abs(values[sel]) <= _VIOLATION_TOL:
                # already satisfied; still add it so it stays pinned
                sign = 1.0
        else:
            mask = np.ones(len(rows), dtype=bool)
            mask[active] = False
            mask[:rows.n_eq] = False
            if skipped:
                mask[list(skipped)] = False
            candidates = np.where(mask & (values < -_VIOLATION_TOL))[0]
            if candidates.size == 0:
                return x, u, active, signs, "optimal", iterations
            sel = int(candidates[np.argmin(values[candidates])])
        normal = sign * rows.normals[sel]
        violation = sign * values[sel]       # <= 0 (or ~0 for pinned eq)
        u_plus = 0.0

        # ---- inner add/drop loop for the selected constraint --------
        while True:
            d = j_mat.T @ normal
            z = j_mat[:, q:] @ d[q:]
            r = _solve_upper(r_mat, d[:q]) if q else np.zeros(0)
            z_dot = z @ normal

            t1 = np.inf
            drop = -1
            for pos in range(q):
                if active[pos] >= rows.n_eq and r[pos] > _ZERO_TOL:
                    ratio = u[pos] / r[pos]
                    if ratio < t1:
                        t1 = ratio
                        drop = pos
            t2 = -violation / z_dot if z_dot > _ZERO_TOL else np.inf
            t = min(t1, t2)
            if not np.isfinite(t):
                if violation >= -10.0 * _VIOLATION_TOL:
                    # dependent on the active set but satisfied to within
                    # noise: a consistent duplicate, not an infeasibility.
                    if sel in pending_eq:
                        pending_eq.remove(sel)
                    skipped.add(sel)
                    break
                return x, u, active, signs, "infeasible", iterations

            if np.isfinite(t2):
                x = x + t * z
                violation = violation + t * z_dot
            if q:
                u = u - t * r
            u_plus += t

            if t == t2 and np.isfinite(t2):
                # ---- add sel to the active set ----------------------
                for i in range(n - 1, q, -1):
                    c, s = _givens(d[i - 1], d[i])
                    d[i - 1], d[i] = c * d[i - 1] + s * d[i], 0.0
                    col_a = j_mat[:, i - 1].copy()
                    col_b = j_mat[:, i].copy()
                    j_mat[:, i - 1] = c * col_a + s * col_b
                    j_mat[:, i] = -s * col_a + c * col_b
                if abs(d[q]) <= _ZERO_TOL:
                    # dependent normal with nothing to move: consistent
                    # duplicate — treat as satisfied without adding.
                    if sel in pending_eq:
                        pending_eq.remove(sel)
                    skipped.add(sel)
                    break
                r_mat[:q + 1, q] = d[:q + 1]
                active.append(sel)
                signs.append(sign)
                u = np.append(u, u_plus)
                q += 1
                if sel in pending_eq:
                    pending_eq.remove(sel)
                break
            # ---- drop the blocking constraint, stay on sel ----------
            active.pop(drop)
            signs.pop(drop)
            u = np.delete(u, drop)
            for col in range(drop, q - 1):
                r_mat[:, col] = r_mat[:, col + 1]
            r_mat[:, q - 1] = 0.0
            q -= 1
            for i in range(drop, q):
                c, s = _givens(r_mat[i, i], r_mat[i + 1, i])
                row_a = r_mat[i, :].copy()
                row_b = r_mat[i + 1, :].copy()
                r_mat[i, :] = c * row_a + s * row_b
                r_mat[i + 1, :] = -s * row_a + c * row_b
                col_a = j_mat[:, i].copy()
                col_b = j_mat[:, i + 1].copy()
                j_mat[:, i] = c * col_a + s * col_b
                j_mat[:, i + 1] = -s * col_a + c * col_b

    return x, u, active, signs, "max-iterations", iterations


def _givens(a: float, b: float):
    """Rotation (c, s) with  [c s; -s c] [a; b] = [r; 0]."""
    if b == 0.0:
        return 1.0, 0.0
    h = np.hypot(a, b)
    return a / h, b / h


def _collect_multipliers(rows: _Rows, active, signs, u, shapes):
    n_eq, n_in, n = shapes
    lam_eq = np.zeros(n_eq)
    mu_in = np.zeros(n_in)
    mu_lb = np.zeros(n)
    mu_ub = np.zeros(n)
    for pos, row in enumerate(active):
        kind, idx = rows.kinds[row]
        value = u[pos]
        if kind == "eq":
            lam_eq[idx] = signs[pos] * value
        elif kind == "in":
            mu_in[idx] = value
        elif kind == "lb":
            mu_lb[idx] = value
        else:
            mu_ub[idx] = value
    return lam_eq, mu_in, mu_lb, mu_ub


def _max_violation(a_eq, b_eq, a_in, b_in, lb, ub, x) -> float:
    worst = 0.0
    if a_eq is not None and a_eq.size:
        worst = max(worst, float(np.max(np.abs(a_eq @ x + b_eq))))
    if a_in is not None and a_in.size:
        worst = max(worst, float(np.max(-(a_in @ x + b_in), initial=0.0)))
    if lb is not None:
        worst = max(worst, float(np.max(lb - x, initial=0.0)))
    if ub is not None:
        worst = max(worst, float(np.max(x - ub, initial=0.0)))
    return worst


def solve_qp(h, g, a_eq=None, b_eq=None, a_in=None, b_in=None,
             lb=None, ub=None, max_iterations: int | None = None) -> QpResult:
    """Solve the convex QP, falling back to an elastic relaxation.

    The elastic path re-solves with the general rows absorbed into a
    quadratic penalty (one-sided for inequalities, iterating the active
    violation set), keeping the box exact.  Its result carries
    ``elastic=True``, the achieved ``slack``, and penalty-consistent
    multiplier estimates.
    """
    h = np.asarray(h, dtype=float)
    g = np.asarray(g, dtype=float)
    n = g.size
    a_eq = None if a_eq is None or np.size(a_eq) == 0 else \
        np.asarray(a_eq, dtype=float).reshape(-1, n)
    b_eq = None if a_eq is None else np.asarray(b_eq, dtype=float).ravel()
    a_in = None if a_in is None or np.size(a_in) == 0 else \
        np.asarray(a_in, dtype=float).reshape(-1, n)
    b_in = None if a_in is None else np.asarray(b_in, dtype=float).ravel()
    lb = None if lb is None else np.asarray(lb, dtype=float).ravel()
    ub = None if ub is None else np.asarray(ub, dtype=float).ravel()
    n_eq = 0 if a_eq is None else a_eq.shape[0]
    n_in = 0 if a_in is None else a_in.shape[0]
    if max_iterations is None:
        max_iterations = 100 * (n + n_eq + n_in) + 1000

    rows = _Rows(a_eq, b_eq, a_in, b_in, lb, ub, n)
    x, u, active, signs, status, iterations = _dual_active_set(
        h, g, rows, max_iterations)
    if status == "optimal":
        lam_eq, mu_in, mu_lb, mu_ub = _collect_multipliers(
            rows, active, signs, u, (n_eq, n_in, n))
        slack = _max_violation(a_eq, b_eq, a_in, b_in, lb, ub, x)
        return QpResult(x=x, status="optimal", lam_eq=lam_eq, mu_in=mu_in,
                        mu_lb=mu_lb, mu_ub=mu_ub, iterations=iterations,
                        slack=slack)

    # ---- elastic relaxation -----------------------------------------
    # cap the model norm's influence so the penalty cannot destroy the
    # conditioning of the relaxed Hessian
    rho = 1e4 * (1.0 + min(float(np.max(np.abs(h))), 1e6))
    x_el = np.zeros(n)
    result = None
    for _ in range(4):
        h2 = h.copy()
        g2 = g.copy()
        if a_eq is not None:
            h2 += rho * (a_eq.T @ a_eq)
            g2 += rho * (a_eq.T @ b_eq)
        if a_in is not None:
            viol = (a_in @ x_el + b_in) < 0.0
            if np.any(viol):
                a_v = a_in[viol]
                h2 += rho * (a_v.T @ a_v)
                g2 += rho * (a_v.T @ b_in[viol])
        rows_box = _Rows(None, None, None, None, lb, ub, n)
        x_new, u2, active2, signs2, status2, it2 = _dual_active_set(
            h2, g2, rows_box, max_iterations)
        iterations += it2
        if status2 != "optimal":
            return QpResult(x=np.zeros(n), status="infeasible",
                            lam_eq=np.zeros(n_eq), mu_in=np.zeros(n_in),
                            mu_lb=np.zeros(n), mu_ub=np.zeros(n),
                            iterations=iterations, elastic=True,
                            slack=np.inf)
        converged = np.max(np.abs(x_new - x_el)) <= 1e-12 * (
            1.0 + np.max(np.abs(x_new)))
        x_el = x_new
        lam_eq = (-rho * (a_eq @ x_el + b_eq) if a_eq is not None
                  else np.zeros(0))
        mu_in = (rho * np.maximum(0.0, -(a_in @ x_el + b_in))
                 if a_in is not None else np.zeros(0))
        _, _, mu_lb, mu_ub = _collect_multipliers(
            rows_box, active2, signs2, u2, (0, 0, n))
        slack = _max_violation(a_eq, b_eq, a_in, b_in, lb, ub, x_el)
        result = QpResult(x=x_el, status="optimal", lam_eq=lam_eq,
                          mu_in=mu_in, mu_lb=mu_lb, mu_ub=mu_ub,
                          iterations=iterations, elastic=True, slack=slack)
        if converged:
            break
    return result

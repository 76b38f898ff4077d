"""Constrained optimization: dense convex QP and an SQP driver on top."""

from .qp import QpResult, solve_qp
from .sqp import IterationRecord, SolverOptions, SolverResult, kkt_residual, solve

__all__ = [
    "QpResult",
    "solve_qp",
    "SolverOptions",
    "SolverResult",
    "IterationRecord",
    "kkt_residual",
    "solve",
]

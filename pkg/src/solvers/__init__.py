from .geometry import CurvatureMatrix, FeasibleSetSpec, curvature_matrix
from .simplex import LinearProgram, LpResult, lp_solve, FREE, NONNEGATIVE
from .active_set import qp_project
from .inner import (
    SolverOutcome,
    objective_value,
    objective_value_pairwise,
    prune_dominated,
    approximate_bound,
    solve_exact,
    solve_m2,
    solve_approx,
    solve_zero,
    solve,
)

__all__ = [
    "CurvatureMatrix",
    "FeasibleSetSpec",
    "curvature_matrix",
    "LinearProgram",
    "LpResult",
    "lp_solve",
    "FREE",
    "NONNEGATIVE",
    "qp_project",
    "SolverOutcome",
    "objective_value",
    "objective_value_pairwise",
    "prune_dominated",
    "approximate_bound",
    "solve_exact",
    "solve_m2",
    "solve_approx",
    "solve_zero",
    "solve",
]

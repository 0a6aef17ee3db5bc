"""
Two-phase revised simplex

Solves   min c^T x   s.t.   A_ub x <= b_ub,   A_eq x = b_eq,   lo <= x <= hi
and reports Lagrange multipliers y (y >= 0 on inequality rows) such that
c + A_ub^T y_ub + A_eq^T y_eq = 0 on the optimal basis.

The basis matrix is LU-factorized from the original columns at every pivot,
so rounding error does not build up over long pivot sequences. Pricing is
Dantzig's rule with a fallback to Bland's rule while the objective stalls;
the ratio test is Harris' two-pass test.
"""
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger
from scipy.linalg import lu_factor, lu_solve

from ..config import settings
from ..core.errors import InfeasibleError, IterationLimitError, NumericalError, UnboundedError

Bound = Tuple[Optional[float], Optional[float]]

FREE: Bound = (None, None)
NONNEGATIVE: Bound = (0.0, None)


@dataclass(eq=False)
class LinearProgram:
    """Dense LP data; bounds default to x >= 0"""
    c: np.ndarray
    A_ub: Optional[np.ndarray] = None
    b_ub: Optional[np.ndarray] = None
    A_eq: Optional[np.ndarray] = None
    b_eq: Optional[np.ndarray] = None
    bounds: Optional[Sequence[Bound]] = None

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float).reshape(-1)
        n = self.c.size
        self.A_ub, self.b_ub = _rows(self.A_ub, self.b_ub, n, "ub")
        self.A_eq, self.b_eq = _rows(self.A_eq, self.b_eq, n, "eq")
        if self.bounds is None:
            self.bounds = [NONNEGATIVE] * n
        elif len(self.bounds) != n:
            raise ValueError(f"expected {n} bounds, got {len(self.bounds)}")
        for lo, hi in self.bounds:
            if lo is not None and hi is not None and lo > hi:
                raise ValueError(f"empty bound ({lo}, {hi})")
        data = [self.c, self.A_ub, self.b_ub, self.A_eq, self.b_eq]
        if not all(np.all(np.isfinite(item)) for item in data):
            raise ValueError("LP data must be finite")

    @property
    def n(self) -> int:
        return self.c.size


def _rows(A, b, n: int, name: str) -> Tuple[np.ndarray, np.ndarray]:
    if A is None:
        return np.zeros((0, n)), np.zeros(0)
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).reshape(-1)
    if A.shape != (b.size, n):
        raise ValueError(f"A_{name} has shape {A.shape}, expected ({b.size}, {n})")
    return A, b


@dataclass(eq=False)
class LpResult:
    x: np.ndarray
    objective: float
    duals_ub: np.ndarray
    duals_eq: np.ndarray
    dual_objective: float
    iterations: int
    basis: List[int] = field(default_factory=list)

    @property
    def duality_gap(self) -> float:
        return abs(self.objective - self.dual_objective)


@dataclass(eq=False)
class _StandardForm:
    """min c z  s.t.  A z = b, z >= 0  with  x = x0 + M z"""
    A: np.ndarray
    b: np.ndarray
    c: np.ndarray
    x0: np.ndarray
    M: np.ndarray
    n_user_ub: int
    n_ub: int
    n_struct: int


def _standard_form(lp: LinearProgram) -> _StandardForm:
    n = lp.n
    x0 = np.zeros(n)
    columns: List[Tuple[int, float]] = []
    bound_rows: List[Tuple[int, float]] = []

    for j, (lo, hi) in enumerate(lp.bounds):
        if lo is not None:
            x0[j] = lo
            columns.append((j, 1.0))
            if hi is not None:
                bound_rows.append((len(columns) - 1, hi - lo))
        elif hi is not None:
            x0[j] = hi
            columns.append((j, -1.0))
        else:
            columns.append((j, 1.0))
            columns.append((j, -1.0))

    n_struct = len(columns)
    M = np.zeros((n, n_struct))
    for k, (j, sign) in enumerate(columns):
        M[j, k] = sign

    ub_struct = lp.A_ub @ M
    ub_rhs = lp.b_ub - lp.A_ub @ x0
    if bound_rows:
        extra = np.zeros((len(bound_rows), n_struct))
        for r, (k, width) in enumerate(bound_rows):
            extra[r, k] = 1.0
        ub_struct = np.vstack([ub_struct, extra])
        ub_rhs = np.concatenate([ub_rhs, [width for _, width in bound_rows]])

    n_ub = ub_struct.shape[0]
    n_eq = lp.A_eq.shape[0]
    A = np.zeros((n_ub + n_eq, n_struct + n_ub))
    A[:n_ub, :n_struct] = ub_struct
    A[:n_ub, n_struct:] = np.eye(n_ub)
    A[n_ub:, :n_struct] = lp.A_eq @ M
    b = np.concatenate([ub_rhs, lp.b_eq - lp.A_eq @ x0])
    c = np.concatenate([lp.c @ M, np.zeros(n_ub)])
    return _StandardForm(A, b, c, x0, M, lp.A_ub.shape[0], n_ub, n_struct)


class _RevisedSimplex:
    """Basis over the columns of [A | artificials], refactorized from the original columns every pivot"""

    def __init__(self, A: np.ndarray, b: np.ndarray, tol: float):
        rows, cols = A.shape
        self.tol = tol
        self.sign = np.where(b < 0.0, -1.0, 1.0)
        A = A * self.sign[:, None]
        b = b * self.sign

        # a column equal to e_i can start in the basis; other rows get an artificial
        basis = np.full(rows, -1, dtype=int)
        singletons = np.count_nonzero(A, axis=0) == 1
        for i in range(rows):
            candidates = np.flatnonzero((A[i] == 1.0) & singletons)
            if candidates.size:
                basis[i] = candidates[0]
        needs_artificial = np.flatnonzero(basis < 0)
        self.artificial_rows = needs_artificial
        self.n_original = cols
        self.n_artificial = needs_artificial.size
        self.A = np.zeros((rows, cols + self.n_artificial))
        self.A[:, :cols] = A
        for k, i in enumerate(needs_artificial):
            self.A[i, cols + k] = 1.0
            basis[i] = cols + k
        self.b = b
        self.basis = basis
        self.feasibility_tol = tol * (1.0 + float(np.abs(b).max(initial=0.0)))
        self.iterations = 0

    @property
    def n_rows(self) -> int:
        return self.A.shape[0]

    @property
    def n_columns(self) -> int:
        return self.A.shape[1]

    def factor(self) -> Tuple[np.ndarray, np.ndarray]:
        B = self.A[:, self.basis]
        lu = lu_factor(B, check_finite=False)
        pivots = np.abs(np.diag(lu[0]))
        if pivots.min(initial=1.0) <= 1e-13 * max(1.0, pivots.max(initial=0.0)):
            raise NumericalError(
                "simplex basis is singular",
                {"basis": self.basis.tolist(), "iterations": self.iterations},
            )
        return lu

    def primal(self, lu) -> np.ndarray:
        return lu_solve(lu, self.b, check_finite=False)

    def duals(self, lu, cost: np.ndarray) -> np.ndarray:
        return lu_solve(lu, cost[self.basis], trans=1, check_finite=False)

    def ratio_test(self, x_B: np.ndarray, column: np.ndarray, bland: bool) -> int:
        """Harris two-pass ratio test; -1 when no row limits the step"""
        pivot_tol = self.tol * max(1.0, float(np.abs(column).max(initial=0.0)))
        eligible = np.flatnonzero(column > pivot_tol)
        if eligible.size == 0:
            return -1
        x = np.maximum(x_B[eligible], 0.0)
        d = column[eligible]
        theta_max = float(np.min((x + self.feasibility_tol) / d))
        ties = eligible[x / d <= theta_max]
        if bland:
            return int(ties[np.argmin(self.basis[ties])])
        return int(ties[np.argmax(column[ties])])

    def run(self, cost: np.ndarray, allowed: int, max_iterations: int) -> float:
        """Dantzig pricing, switching to Bland's rule while the objective stalls"""
        cost_tol = self.tol * (1.0 + float(np.abs(cost).max(initial=0.0)))
        bland, stalled, best = False, 0, np.inf
        while True:
            lu = self.factor()
            x_B = self.primal(lu)
            value = float(cost[self.basis] @ x_B)
            reduced = cost[:allowed] - self.A[:, :allowed].T @ self.duals(lu, cost)
            reduced[self.basis[self.basis < allowed]] = 0.0
            candidates = np.flatnonzero(reduced < -cost_tol)
            if candidates.size == 0:
                return value

            if value < best - cost_tol:
                best, stalled, bland = value, 0, False
            else:
                stalled += 1
                bland = bland or stalled > self.n_rows

            e = int(candidates[0] if bland else candidates[np.argmin(reduced[candidates])])
            r = self.ratio_test(x_B, lu_solve(lu, self.A[:, e], check_finite=False), bland)
            if r < 0:
                raise UnboundedError(
                    "linear program is unbounded", {"entering": e, "iterations": self.iterations}
                )
            if self.iterations >= max_iterations:
                raise IterationLimitError(
                    f"simplex exceeded {max_iterations} pivots",
                    {"iterations": self.iterations, "basis": self.basis.tolist()},
                )
            self.basis[r] = e
            self.iterations += 1

    def drive_out_artificials(self) -> None:
        for r in range(self.n_rows):
            if self.basis[r] < self.n_original:
                continue
            lu = self.factor()
            unit = np.zeros(self.n_rows)
            unit[r] = 1.0
            # row r of B^-1 A
            row = lu_solve(lu, unit, trans=1, check_finite=False) @ self.A[:, : self.n_original]
            row[self.basis[self.basis < self.n_original]] = 0.0
            k = int(np.argmax(np.abs(row)))
            if abs(row[k]) > 1e3 * self.tol:
                self.basis[r] = k
            else:
                logger.debug(f"simplex: row {r} is redundant")


def lp_solve(
    lp: LinearProgram,
    tol: Optional[float] = None,
    max_iterations: Optional[int] = None,
) -> LpResult:
    """Solve lp with the two-phase simplex method"""
    tol = settings.lp_tolerance if tol is None else tol
    max_iterations = settings.lp_max_iterations if max_iterations is None else max_iterations
    std = _standard_form(lp)
    if std.b.size == 0:
        raise ValueError("linear program needs at least one constraint or finite bound")
    simplex = _RevisedSimplex(std.A, std.b, tol)

    # Phase 1: drive the artificials to zero
    if simplex.n_artificial:
        phase1_cost = np.zeros(simplex.n_columns)
        phase1_cost[simplex.n_original:] = 1.0
        infeasibility = simplex.run(phase1_cost, simplex.n_columns, max_iterations)
        if infeasibility > simplex.feasibility_tol:
            raise InfeasibleError(
                "linear program is infeasible",
                {"infeasibility": float(infeasibility), "iterations": simplex.iterations},
            )
        simplex.drive_out_artificials()

    # Phase 2: original objective, artificials never re-enter
    phase2_cost = np.zeros(simplex.n_columns)
    phase2_cost[: simplex.n_original] = std.c
    simplex.run(phase2_cost, simplex.n_original, max_iterations)

    # solution read off a fresh factorization of the final basis
    lu = simplex.factor()
    z = np.zeros(simplex.n_columns)
    z[simplex.basis] = simplex.primal(lu)
    z = np.clip(z[: simplex.n_original], 0.0, None)

    residual = float(np.abs(std.A @ z - std.b).max(initial=0.0))
    if residual > 1e-6 * (1.0 + float(np.abs(std.b).max(initial=0.0))):
        raise NumericalError(
            "simplex solution failed its residual check",
            {"residual": residual, "condition": float(np.linalg.cond(simplex.A[:, simplex.basis]))},
        )

    # lambda for the sign-scaled rows, then undo the scaling
    lam = simplex.sign * simplex.duals(lu, phase2_cost)
    multipliers = -lam

    x = std.x0 + std.M @ z[: std.n_struct]
    objective_value = float(lp.c @ x)
    dual_objective = float(std.b @ lam + lp.c @ std.x0)
    logger.debug(
        f"simplex: {simplex.iterations} pivots, objective {objective_value:.12g}, "
        f"gap {abs(objective_value - dual_objective):.2e}"
    )
    return LpResult(
        x=x,
        objective=objective_value,
        duals_ub=multipliers[: std.n_user_ub],
        duals_eq=multipliers[std.n_ub:],
        dual_objective=dual_objective,
        iterations=simplex.iterations,
        basis=simplex.basis.tolist(),
    )

"""
Per-round inner solvers for the direction q

Every solver answers the same question: given normalized weights u, the
step size eps and the loss box, pick q in the feasible direction set that
keeps max over the box of l^T Q (l - q) small. Dominated options are
removed first; their q entries are reported as 0.
"""
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np
from loguru import logger

from ..config import SolverKind, settings
from ..core.accounting import corner_matrix
from ..core.errors import InvalidDistributionError, NumericalError, SolverCapError
from ..core.types import BoxConstraint
from .active_set import qp_project
from .geometry import FeasibleSetSpec
from .simplex import FREE, NONNEGATIVE, LinearProgram, lp_solve

EQUILIBRIUM_TOLERANCE = 1e-7


@dataclass(eq=False)
class SolverOutcome:
    """Direction q over all m options plus the round's worst-case value

    `weights` holds the normalized weights the direction was computed for:
    zero on pruned options and renormalized over the rest.
    """
    q: np.ndarray
    value: float
    kind: SolverKind
    active: np.ndarray
    weights: np.ndarray
    duals: Optional[Dict[int, float]] = None

    @property
    def m(self) -> int:
        return self.q.size

    def feasible_set(self, epsilon: float) -> FeasibleSetSpec:
        return FeasibleSetSpec(self.weights, epsilon)


def objective_value(u: np.ndarray, loss: np.ndarray, q: np.ndarray) -> float:
    """l^T Q (l - q) with Q = diag(u) - u u^T"""
    u, loss, q = (np.asarray(x, dtype=float) for x in (u, loss, q))
    if not (u.shape == loss.shape == q.shape):
        raise ValueError("u, loss and q must have the same length")
    residual = loss - q
    return float(u @ (loss * residual) - (u @ loss) * (u @ residual))


def objective_value_pairwise(u: np.ndarray, loss: np.ndarray, q: np.ndarray) -> float:
    """Same quantity written as a sum over option pairs"""
    u, loss, q = (np.asarray(x, dtype=float) for x in (u, loss, q))
    dl = loss[:, None] - loss[None, :]
    dq = q[:, None] - q[None, :]
    return float(0.5 * np.sum(np.outer(u, u) * (dl * dl - dl * dq)))


def prune_dominated(box: BoxConstraint) -> Tuple[np.ndarray, np.ndarray]:
    """Split options into (active, fixed_zero)

    Option i is dropped when lower[i] >= upper[j] for some j != i: option j
    is then never worse. The option with the smallest upper bound (lowest
    index on ties) always survives.
    """
    m = box.m
    if m == 1:
        return np.array([0]), np.array([], dtype=int)
    order = np.argsort(box.upper, kind="stable")
    smallest, runner_up = order[0], order[1]
    # smallest upper bound among the other options
    others_min = np.full(m, box.upper[smallest])
    others_min[smallest] = box.upper[runner_up]
    dominated = box.lower >= others_min
    dominated[smallest] = False
    return np.flatnonzero(~dominated), np.flatnonzero(dominated)


def _reduce(
    u: np.ndarray, box: BoxConstraint, active: Optional[np.ndarray]
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(active indices carrying weight, u on them, u embedded in m entries)"""
    u = np.asarray(u, dtype=float).reshape(-1)
    if u.size != box.m:
        raise ValueError(f"u has {u.size} entries, box has {box.m}")
    if active is None:
        active, _ = prune_dominated(box)
    active = np.asarray(active, dtype=int)
    active = active[u[active] > 0.0]
    if active.size == 0:
        raise InvalidDistributionError("no active option carries weight", {"u": u.tolist()})
    u_active = u[active] / u[active].sum()
    weights = np.zeros(box.m)
    weights[active] = u_active
    return active, u_active, weights


def _embed(m: int, active: np.ndarray, values: np.ndarray) -> np.ndarray:
    full = np.zeros(m)
    full[active] = values
    return full


def solve_exact(
    u: np.ndarray, epsilon: float, box: BoxConstraint, active: Optional[np.ndarray] = None
) -> SolverOutcome:
    """Exact minmax over the box corners

    The LP  min xi  s.t.  xi >= c^T Q c - (Q c)^T q  for every corner c,
    q in the feasible set, is solved through its dual, whose variables are
    the corner weights y (the adversary's mixed strategy), one multiplier
    per inequality row and one free multiplier for sum(q) = 0. The primal
    (xi, q) comes back as the equality-row multipliers.
    """
    if box.m > settings.max_exact_options:
        raise SolverCapError(
            "use approximate solver", {"m": box.m, "limit": settings.max_exact_options}
        )
    active, u_a, weights = _reduce(u, box, active)
    k = active.size
    C = corner_matrix(box.restrict(active))
    QC = u_a * C - (C @ u_a)[:, None] * u_a
    g = np.sum(C * QC, axis=1)
    n_corners = C.shape[0]

    spec = FeasibleSetSpec(u_a, epsilon)
    G, _ = spec.constraint_matrix()
    c = np.concatenate([-g, np.ones(k), [0.0]])
    A_eq = np.zeros((k + 1, n_corners + k + 1))
    A_eq[0, :n_corners] = 1.0
    A_eq[1:, :n_corners] = QC.T
    A_eq[1:, n_corners:n_corners + k] = -G.T
    A_eq[1:, -1] = -1.0
    b_eq = np.concatenate([[1.0], np.zeros(k)])
    bounds = [NONNEGATIVE] * (n_corners + k) + [FREE]
    result = lp_solve(LinearProgram(c=c, A_eq=A_eq, b_eq=b_eq, bounds=bounds))

    r_star = -result.objective
    q_a = result.duals_eq[1:]
    q_a = q_a - q_a.mean()

    # tolerances scale with the size of q
    scale = 1.0 + float(np.abs(q_a).max())
    excess = float(spec.scaled_deviation(q_a).max()) - 1.0
    if excess > 0.0:
        if excess > EQUILIBRIUM_TOLERANCE * scale:
            raise NumericalError(
                "LP direction violates the feasible set", {"excess": excess, "q": q_a.tolist()}
            )
        q_a = q_a / (1.0 + excess)

    worst = float(np.max(g - QC @ q_a))
    if abs(worst - r_star) > EQUILIBRIUM_TOLERANCE * (scale + abs(r_star)):
        raise NumericalError(
            "LP value does not match the worst corner",
            {"lp_value": r_star, "worst_corner": worst, "duality_gap": result.duality_gap},
        )

    y = np.clip(result.x[:n_corners], 0.0, None)
    total = y.sum()
    if abs(total - 1.0) > 1e-9:
        logger.warning(f"solve_exact: renormalizing corner duals by {1.0 / total:.12g}")
    y = y / total
    bits = (np.arange(n_corners)[:, None] >> np.arange(k)) & 1
    full_index = bits @ (np.int64(1) << active.astype(np.int64))
    duals = {int(idx): float(p) for idx, p in zip(full_index, y) if p > 0.0}

    return SolverOutcome(
        q=_embed(box.m, active, q_a),
        value=worst,
        kind=SolverKind.EXACT_LP,
        active=active,
        weights=weights,
        duals=duals,
    )


def solve_m2(
    u: np.ndarray, epsilon: float, box: BoxConstraint, active: Optional[np.ndarray] = None
) -> SolverOutcome:
    """Closed form for two options: q[0] is the clipped center difference"""
    if box.m != 2:
        raise ValueError(f"closed form needs exactly two options, got {box.m}")
    active, u_a, weights = _reduce(u, box, active)
    if active.size == 1:
        return SolverOutcome(np.zeros(2), 0.0, SolverKind.CLOSED_FORM_M2, active, weights)

    centers = box.upper + box.lower
    mu = 0.5 * (centers[0] - centers[1])
    lo, hi = FeasibleSetSpec(u_a, epsilon).m2_interval()
    q1 = float(np.clip(mu, lo, hi))
    d = 2.0 * q1
    a = box.upper[0] - box.lower[1]
    b = box.lower[0] - box.upper[1]
    value = u_a[0] * u_a[1] * max(a * a - a * d, b * b - b * d)
    return SolverOutcome(
        q=np.array([q1, -q1]),
        value=float(value),
        kind=SolverKind.CLOSED_FORM_M2,
        active=active,
        weights=weights,
    )


def approximate_bound(u: np.ndarray, box: BoxConstraint) -> float:
    """1/2 sum_{i != j} u_i u_j (upper_i - lower_j)(upper_j - lower_i)"""
    u = np.asarray(u, dtype=float)
    spread = box.upper[:, None] - box.lower[None, :]
    terms = np.outer(u, u) * spread * spread.T
    np.fill_diagonal(terms, 0.0)
    return float(0.5 * terms.sum())


def solve_approx(
    u: np.ndarray, epsilon: float, box: BoxConstraint, active: Optional[np.ndarray] = None
) -> SolverOutcome:
    """Project the centered interval midpoints onto the feasible set"""
    active, u_a, weights = _reduce(u, box, active)
    if active.size == 1:
        return SolverOutcome(np.zeros(box.m), 0.0, SolverKind.APPROXIMATE, active, weights)
    reduced = box.restrict(active)
    centers = reduced.upper + reduced.lower
    mu = centers - centers.mean()
    q_a = qp_project(mu, FeasibleSetSpec(u_a, epsilon))
    return SolverOutcome(
        q=_embed(box.m, active, q_a),
        value=approximate_bound(u_a, reduced),
        kind=SolverKind.APPROXIMATE,
        active=active,
        weights=weights,
    )


def solve_zero(u: np.ndarray, epsilon: float, box: BoxConstraint) -> SolverOutcome:
    """q = 0: plain multiplicative weights, valued by the variance bound"""
    u = np.asarray(u, dtype=float).reshape(-1)
    spread = float(box.upper.max() - box.lower.min())
    return SolverOutcome(
        q=np.zeros(box.m),
        value=0.25 * spread * spread,
        kind=SolverKind.ZERO,
        active=np.arange(box.m),
        weights=u / u.sum(),
    )


def solve(
    u: np.ndarray,
    epsilon: float,
    box: BoxConstraint,
    kind: SolverKind,
    active: Optional[np.ndarray] = None,
) -> SolverOutcome:
    """Dispatch to the solver for `kind`; two options always use the closed form"""
    kind = SolverKind(kind)
    if kind is SolverKind.ZERO:
        return solve_zero(u, epsilon, box)
    if kind is SolverKind.CLOSED_FORM_M2 or box.m == 2:
        return solve_m2(u, epsilon, box, active)
    if kind is SolverKind.EXACT_LP:
        return solve_exact(u, epsilon, box, active)
    return solve_approx(u, epsilon, box, active)

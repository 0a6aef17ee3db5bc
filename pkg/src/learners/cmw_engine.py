"""
Constrained multiplicative weights engine

Each round the engine turns the cumulative losses into weights u with an
adaptive step size, asks an inner solver for a correction direction q that
accounts for the announced loss box, and plays

    p = u - (eps / 2) Q q,    Q = diag(u) - u u^T.

After the loss is revealed, the realized second-order term l^T Q (l - q),
floored at r_bar, feeds the step-size schedule.
"""
import math
from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional, Tuple

import numpy as np
from loguru import logger
from pydantic import BaseModel, Field, model_validator

from ..config import SolverKind, settings
from ..core.errors import (
    CmwError,
    ConstraintViolationError,
    InfeasibleDirectionError,
    InvariantViolationError,
)
from ..core.types import BoxConstraint, Distribution, LossVector
from ..solvers import FeasibleSetSpec, SolverOutcome, objective_value, prune_dominated, solve

CAP_TOLERANCE = 1e-9
SCHEDULE_TOLERANCE = 1e-9

# Solvers whose realized value is provably within the variance cap L^2/4
CAPPED_SOLVERS = (SolverKind.EXACT_LP, SolverKind.CLOSED_FORM_M2, SolverKind.ZERO)


class CmwConfig(BaseModel):
    """Per-game configuration"""

    m: int = Field(ge=2)
    T: int = Field(ge=1)
    L: float = Field(gt=0.0)
    c1: float = Field(default=1e-2, gt=0.0)
    c2: Optional[float] = Field(default=None, gt=0.0)
    solver_kind: SolverKind = SolverKind.EXACT_LP
    fixed_epsilon: Optional[float] = Field(default=None, gt=0.0)
    prune: bool = True
    debug_assert: Optional[bool] = None

    @model_validator(mode="after")
    def _check_solver(self) -> "CmwConfig":
        if self.solver_kind is SolverKind.CLOSED_FORM_M2 and self.m != 2:
            raise ValueError("closed_form_m2 requires m = 2")
        if self.solver_kind is SolverKind.EXACT_LP and self.m > settings.max_exact_options:
            raise ValueError(
                f"m={self.m} exceeds the exact solver limit of "
                f"{settings.max_exact_options}; use approximate solver"
            )
        return self

    @property
    def default_c2(self) -> float:
        return 2.0 * math.log(self.m) * self.L ** 2

    @property
    def c2_value(self) -> float:
        return self.default_c2 if self.c2 is None else self.c2

    @property
    def uses_default_schedule(self) -> bool:
        return (
            self.fixed_epsilon is None
            and math.isclose(self.c2_value, self.default_c2, rel_tol=1e-12)
        )

    @property
    def assertions_enabled(self) -> bool:
        return settings.debug_assert if self.debug_assert is None else self.debug_assert


@dataclass(eq=False)
class CmwState:
    cumulative: np.ndarray
    r_bar: float
    c2: float
    r_tilde_sum: float = 0.0
    r_tilde_trace: List[float] = field(default_factory=list)
    step: int = 0
    # running sums of r_j / sqrt(s_{j-1}) and 1 / s_{j-1}
    ratio_sum: float = 0.0
    inverse_sum: float = 0.0

    @property
    def m(self) -> int:
        return self.cumulative.size

    @property
    def s(self) -> float:
        """c2 plus the accumulated r_tilde"""
        return self.c2 + self.r_tilde_sum


class RegretBound(NamedTuple):
    value: float
    # set when the schedule is not the one the bound is proved for
    advisory: bool


def r_bar(config: CmwConfig) -> float:
    """c1 ln(m)^(2/3) L^2 T^(-1/3)"""
    return config.c1 * math.log(config.m) ** (2.0 / 3.0) * config.L ** 2 * config.T ** (-1.0 / 3.0)


def init_state(config: CmwConfig) -> CmwState:
    return CmwState(cumulative=np.zeros(config.m), r_bar=r_bar(config), c2=config.c2_value)


def epsilon(state: CmwState, config: CmwConfig) -> float:
    """sqrt(2 ln m / (c2 + sum r_tilde)), or the configured constant"""
    if config.fixed_epsilon is not None:
        return config.fixed_epsilon
    return math.sqrt(2.0 * math.log(config.m) / (state.c2 + state.r_tilde_sum))


def weights(
    state: CmwState, eps: float, active: Optional[np.ndarray] = None
) -> Tuple[np.ndarray, float]:
    """(w, phi) with w_i = exp(-eps * cumulative_i) scaled so the largest active weight is 1

    Options outside `active` get weight 0.
    """
    if not eps > 0.0:
        raise ValueError(f"epsilon must be positive, got {eps}")
    if active is None:
        active = np.arange(state.m)
    active = np.asarray(active, dtype=int)
    w = np.zeros(state.m)
    exponents = state.cumulative[active]
    w[active] = np.exp(-eps * (exponents - exponents.min()))
    return w, float(w.sum())


def distribution(u: np.ndarray, eps: float, q: np.ndarray) -> Distribution:
    """p = u - (eps/2) Q q, computed as u * (1 - (eps/2)(q - u^T q))"""
    spec = FeasibleSetSpec(u, eps)
    if not spec.contains(q, tol=settings.membership_tolerance):
        raise InfeasibleDirectionError(
            "direction outside feasible set",
            {"q": np.asarray(q).tolist(), "epsilon": eps},
        )
    # Q 1 = 0 keeps the sum at one; Distribution clamps rounding noise below zero
    return Distribution(spec.u * (1.0 - spec.scaled_deviation(q)))


def observe(
    state: CmwState,
    loss: LossVector,
    solver_outcome: SolverOutcome,
    u: np.ndarray,
    eps: float,
    box: Optional[BoxConstraint] = None,
) -> CmwState:
    """Record the revealed loss and the round's r_tilde"""
    if box is not None and not box.contains(loss.values, tol=settings.membership_tolerance):
        raise ConstraintViolationError(
            "environment violated constraint",
            {"step": state.step, "loss": loss.values.tolist(),
             "lower": box.lower.tolist(), "upper": box.upper.tolist()},
        )
    realized = objective_value(u, loss.values, solver_outcome.q)
    r_tilde = max(realized, state.r_bar)

    s_prev = state.s
    state.ratio_sum += r_tilde / math.sqrt(s_prev)
    state.inverse_sum += 1.0 / s_prev
    state.r_tilde_sum += r_tilde
    state.r_tilde_trace.append(r_tilde)
    state.cumulative = state.cumulative + loss.values
    state.step += 1
    return state


def regret_bound(state: CmwState, config: CmwConfig) -> RegretBound:
    """3 sqrt(ln m S) + (7 ln m L^3 / (4 r_bar)) ln(8 ln m + 4 S / L^2), S = sum r_tilde"""
    log_m = math.log(config.m)
    L = config.L
    total = state.r_tilde_sum
    value = 3.0 * math.sqrt(log_m * total) + (7.0 * log_m * L ** 3 / (4.0 * state.r_bar)) * math.log(
        8.0 * log_m + 4.0 * total / L ** 2
    )
    return RegretBound(value, not config.uses_default_schedule)


@dataclass(eq=False)
class RoundPlan:
    epsilon: float
    u: np.ndarray
    outcome: SolverOutcome
    distribution: Distribution
    box: BoxConstraint


class ConstrainedHedge:
    """Stateful agent: call `plan(box)` for the round's distribution, then `update(loss)`"""

    def __init__(self, config: CmwConfig):
        self.config = config
        self.state = init_state(config)
        self._plan: Optional[RoundPlan] = None
        self._warned_cap = False

        if not config.uses_default_schedule:
            logger.warning(
                f"CMW: c2={config.c2_value:.6g}, fixed_epsilon={config.fixed_epsilon}; "
                "regret bound is advisory for this schedule"
            )
        eps0 = epsilon(self.state, config)
        if eps0 * config.L > 1.0:
            logger.warning(f"CMW: epsilon*L = {eps0 * config.L:.4g} > 1 at t=0")
        logger.debug(
            f"CMW: m={config.m}, T={config.T}, L={config.L}, r_bar={self.state.r_bar:.6g}, "
            f"solver={config.solver_kind.value}"
        )

    @property
    def m(self) -> int:
        return self.config.m

    def plan(self, box: BoxConstraint) -> RoundPlan:
        if box.m != self.m:
            raise ValueError(f"box has {box.m} options, expected {self.m}")
        eps = epsilon(self.state, self.config)
        kind = self.config.solver_kind
        if self.config.prune and kind is not SolverKind.ZERO:
            active, _ = prune_dominated(box)
        else:
            active = np.arange(self.m)
        w, phi = weights(self.state, eps, active)
        u = w / phi
        outcome = solve(u, eps, box, kind, active)
        p = distribution(outcome.weights, eps, outcome.q)
        self._plan = RoundPlan(eps, u, outcome, p, box)
        return self._plan

    def update(self, loss: LossVector) -> float:
        """Consume the revealed loss; returns the round's r_tilde"""
        plan = self._plan
        if plan is None:
            raise CmwError("update called before plan", {"step": self.state.step})
        self._plan = None
        observe(self.state, loss, plan.outcome, plan.outcome.weights, plan.epsilon, plan.box)
        r_tilde = self.state.r_tilde_trace[-1]
        self._check_round(r_tilde, plan)
        return r_tilde

    def regret_bound(self) -> RegretBound:
        return regret_bound(self.state, self.config)

    def _check_round(self, r_tilde: float, plan: RoundPlan) -> None:
        cap = 0.25 * self.config.L ** 2
        kind = plan.outcome.kind
        if r_tilde > cap + CAP_TOLERANCE:
            if kind in CAPPED_SOLVERS and self.config.assertions_enabled:
                raise InvariantViolationError(
                    "r_tilde exceeds L^2/4",
                    {"step": self.state.step, "r_tilde": r_tilde, "cap": cap, "solver": kind.value},
                )
            if not self._warned_cap:
                logger.warning(
                    f"CMW: r_tilde={r_tilde:.6g} exceeds L^2/4={cap:.6g} at step {self.state.step} "
                    f"({kind.value} solver)"
                )
                self._warned_cap = True

        if self.config.assertions_enabled and self.config.uses_default_schedule:
            self.check_schedule()

    def check_schedule(self) -> None:
        """Raise if either step-size schedule inequality fails at the current step"""
        state, L = self.state, self.config.L
        s_t = state.s
        ratio_bound = 2.0 * math.sqrt(2.0 * s_t)
        if state.ratio_sum > ratio_bound + SCHEDULE_TOLERANCE:
            raise InvariantViolationError(
                "step-size ratio sum exceeds its bound",
                {"step": state.step, "sum": state.ratio_sum, "bound": ratio_bound},
            )
        inverse_bound = math.log(4.0 * s_t / L ** 2) / state.r_bar + 1.0 / state.c2
        if state.inverse_sum > inverse_bound + SCHEDULE_TOLERANCE:
            raise InvariantViolationError(
                "inverse step-size sum exceeds its bound",
                {"step": state.step, "sum": state.inverse_sum, "bound": inverse_bound},
            )

"""
Worst-case environment play over box corners
"""
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np
from loguru import logger

from ..core.errors import InvalidDistributionError
from ..core.types import BoxConstraint, LossVector
from ..solvers import FREE, FeasibleSetSpec, LinearProgram, lp_solve, prune_dominated, solve_exact

PROB_TOLERANCE = 1e-7
NEGATIVE_TOLERANCE = 1e-9


def corner_vector(box: BoxConstraint, index: int) -> np.ndarray:
    """Corner `index` of box: bit i selects upper[i]"""
    bits = (int(index) >> np.arange(box.m)) & 1
    return np.where(bits.astype(bool), box.upper, box.lower)


@dataclass(frozen=True, eq=False)
class CornerStrategy:
    """Mixed strategy over the corners of an m-option box, keyed by corner index"""
    corner_probs: Dict[int, float]
    m: int

    def __post_init__(self):
        probs = np.array(list(self.corner_probs.values()), dtype=float)
        if probs.size == 0:
            raise InvalidDistributionError("empty corner strategy")
        if np.any(probs < -NEGATIVE_TOLERANCE):
            raise InvalidDistributionError(
                f"negative corner probability {probs.min():.3e}", {"corner_probs": self.corner_probs}
            )
        if abs(probs.sum() - 1.0) > PROB_TOLERANCE:
            raise InvalidDistributionError(
                f"corner probabilities sum to {probs.sum()!r}", {"corner_probs": self.corner_probs}
            )
        if any(not 0 <= index < (1 << self.m) for index in self.corner_probs):
            raise ValueError(f"corner index outside [0, 2^{self.m})")

    @classmethod
    def point_mass(cls, m: int, index: int) -> "CornerStrategy":
        return cls({int(index): 1.0}, m)

    @property
    def support(self) -> Tuple[int, ...]:
        return tuple(sorted(i for i, p in self.corner_probs.items() if p > 0.0))

    def as_arrays(self) -> Tuple[np.ndarray, np.ndarray]:
        indices = np.array(list(self.corner_probs.keys()), dtype=np.int64)
        probs = np.clip(np.array(list(self.corner_probs.values()), dtype=float), 0.0, None)
        return indices, probs / probs.sum()

    def expected_loss(self, box: BoxConstraint) -> np.ndarray:
        indices, probs = self.as_arrays()
        return sum(p * corner_vector(box, i) for i, p in zip(indices, probs))

    def sample(self, box: BoxConstraint, rng: np.random.Generator) -> LossVector:
        indices, probs = self.as_arrays()
        return LossVector(corner_vector(box, indices[rng.choice(indices.size, p=probs)]))


def worst_case_strategy(
    u: np.ndarray, epsilon: float, box: BoxConstraint
) -> Tuple[CornerStrategy, float]:
    """Corner duals of the exact minmax LP, and the game value r_star"""
    outcome = solve_exact(u, epsilon, box)
    return CornerStrategy(outcome.duals, box.m), outcome.value


def verify_equilibrium(
    strategy: CornerStrategy,
    u: np.ndarray,
    epsilon: float,
    box: BoxConstraint,
    r_star: Optional[float] = None,
) -> float:
    """r_star minus the best value any feasible q achieves against `strategy`

    The expected objective E[l^T Q l] - (Q E[l])^T q is linear in q, so its
    minimum over the feasible set is one LP. A gap near zero certifies the
    strategy as an equilibrium strategy.
    """
    u = np.asarray(u, dtype=float).reshape(-1)
    if r_star is None:
        r_star = solve_exact(u, epsilon, box).value

    active, _ = prune_dominated(box)
    active = active[u[active] > 0.0]
    u_a = u[active] / u[active].sum()

    indices, probs = strategy.as_arrays()
    C = np.array([corner_vector(box, i)[active] for i in indices])
    QC = u_a * C - (C @ u_a)[:, None] * u_a
    second_moment = float(probs @ np.sum(C * QC, axis=1))
    h = probs @ QC

    spec = FeasibleSetSpec(u_a, epsilon)
    if epsilon == 0.0 or active.size == 1:
        # feasible set is the whole hyperplane sum(q) = 0
        centered = h - h.mean()
        best = second_moment if np.linalg.norm(centered) <= 1e-12 else -np.inf
    else:
        G, g_rhs = spec.constraint_matrix()
        k = active.size
        result = lp_solve(
            LinearProgram(
                c=-h,
                A_ub=G,
                b_ub=g_rhs,
                A_eq=np.ones((1, k)),
                b_eq=np.zeros(1),
                bounds=[FREE] * k,
            )
        )
        best = second_moment + result.objective

    gap = float(r_star - best)
    logger.debug(f"verify_equilibrium: r_star={r_star:.10g}, best response={best:.10g}, gap={gap:.3e}")
    return gap


def adversarial_environment(
    u: np.ndarray, epsilon: float, box: BoxConstraint, rng: np.random.Generator
) -> LossVector:
    """Sample a loss from the worst-case strategy against weights u"""
    strategy, _ = worst_case_strategy(u, epsilon, box)
    return strategy.sample(box, rng)


class AdversarialEnvironment:
    """Environment that answers every round with fresh worst-case corner play"""

    def __init__(self, rng: np.random.Generator):
        self.rng = rng
        self.r_star_trace: List[float] = []
        self.last_strategy: Optional[CornerStrategy] = None

    def respond(self, u: np.ndarray, epsilon: float, box: BoxConstraint) -> LossVector:
        strategy, r_star = worst_case_strategy(u, epsilon, box)
        self.last_strategy = strategy
        self.r_star_trace.append(r_star)
        return strategy.sample(box, self.rng)

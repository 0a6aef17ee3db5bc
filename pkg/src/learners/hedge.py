"""
Hedge - classical multiplicative weights with a fixed step size
"""
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from loguru import logger
from scipy.special import softmax

from ..core.types import Distribution, LossVector


def _check_horizon(m: int, T: int, L: float) -> None:
    if m < 2:
        raise ValueError(f"need at least two options, got m={m}")
    if T < 1:
        raise ValueError(f"horizon must be positive, got T={T}")
    if not L > 0.0:
        raise ValueError(f"loss range must be positive, got L={L}")


def hedge_epsilon(m: int, T: int, L: float) -> float:
    """sqrt(8 ln m / T) / L"""
    _check_horizon(m, T, L)
    return math.sqrt(8.0 * math.log(m) / T) / L


def hedge_regret_bound(m: int, T: int, L: float) -> float:
    """L sqrt(ln m * T / 2)"""
    _check_horizon(m, T, L)
    return L * math.sqrt(math.log(m) * T / 2.0)


@dataclass(eq=False)
class HedgeState:
    cumulative: np.ndarray
    epsilon: float
    steps_seen: int = 0

    def __post_init__(self):
        self.cumulative = np.array(self.cumulative, dtype=float).reshape(-1)
        if not self.epsilon > 0.0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")

    @property
    def m(self) -> int:
        return self.cumulative.size


def hedge_distribution(state: HedgeState) -> Distribution:
    """p_i proportional to exp(-eps * cumulative_i), max-shifted by softmax"""
    return Distribution(softmax(-state.epsilon * state.cumulative))


@dataclass(eq=False)
class Hedge:
    """Hedge agent: play `distribution()`, then feed the revealed loss to `update()`"""
    m: int
    T: int
    L: float = 1.0
    epsilon: Optional[float] = None
    state: HedgeState = field(init=False)

    def __post_init__(self):
        if self.epsilon is None:
            self.epsilon = hedge_epsilon(self.m, self.T, self.L)
        self.state = HedgeState(np.zeros(self.m), self.epsilon)
        logger.debug(f"Hedge: m={self.m}, T={self.T}, L={self.L}, epsilon={self.epsilon:.6g}")

    def distribution(self) -> Distribution:
        return hedge_distribution(self.state)

    def update(self, loss: LossVector) -> None:
        if loss.m != self.m:
            raise ValueError(f"loss has {loss.m} entries, expected {self.m}")
        self.state.cumulative = self.state.cumulative + loss.values
        self.state.steps_seen += 1

    def regret_bound(self) -> float:
        return hedge_regret_bound(self.m, self.T, self.L)

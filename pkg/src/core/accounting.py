"""
Regret accounting, loss range, action sampling and box corners
"""
from typing import List, Sequence, Tuple

import numpy as np

from ..config import settings
from .errors import CmwError
from .types import BoxConstraint, Distribution, GameHistory, LossRange, LossVector


def loss_range(constraints: Sequence[BoxConstraint]) -> LossRange:
    """Largest upper[i] - lower[j] over all steps and option pairs"""
    if not constraints:
        raise CmwError("no constraints")
    value = max(float(box.upper.max() - box.lower.min()) for box in constraints)
    return LossRange(max(value, 0.0))


def regret(history: GameHistory) -> float:
    """Cumulative expected loss minus the best single option in hindsight"""
    if not history.expected_losses:
        raise CmwError("regret of an empty history")
    _, best = best_in_hindsight(history.cumulative_per_option)
    return float(np.sum(history.expected_losses)) - best


def best_in_hindsight(cumulative: Sequence[float]) -> Tuple[int, float]:
    """Lowest index attaining the minimum cumulative loss, and that minimum"""
    cumulative = np.asarray(cumulative, dtype=float)
    index = int(np.argmin(cumulative))
    return index, float(cumulative[index])


def sample(dist: Distribution, rng: np.random.Generator) -> int:
    """Draw an option index according to dist"""
    return int(rng.choice(dist.m, p=dist.probs))


def corner_matrix(box: BoxConstraint) -> np.ndarray:
    """All 2^m corners of box as rows

    Row k selects upper[i] when bit i of k is set, lower[i] otherwise.
    """
    m = box.m
    if m > settings.max_corner_options:
        raise CmwError(
            "corner enumeration too large",
            {"m": m, "limit": settings.max_corner_options},
        )
    index = np.arange(1 << m, dtype=np.int64)[:, None]
    bits = (index >> np.arange(m, dtype=np.int64)) & 1
    return np.where(bits.astype(bool), box.upper, box.lower)


def corners(box: BoxConstraint) -> List[LossVector]:
    return [LossVector(row) for row in corner_matrix(box)]

"""
Domain types: losses, box constraints, distributions, game history
"""
from dataclasses import dataclass, field
from typing import List, Sequence

import numpy as np

from .errors import InvalidDistributionError

CLAMP_TOLERANCE = 1e-12
SUM_TOLERANCE = 1e-9


def _as_vector(values: Sequence[float], name: str, min_size: int = 1) -> np.ndarray:
    array = np.array(values, dtype=float).reshape(-1)
    if array.size < min_size:
        raise ValueError(f"{name} has {array.size} entries, needs at least {min_size}")
    if not np.all(np.isfinite(array)):
        raise ValueError(f"{name} must be finite, got {array}")
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class LossVector:
    """Loss revealed by the environment, one entry per option"""
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _as_vector(self.values, "loss", min_size=2))

    @property
    def m(self) -> int:
        return self.values.size

    def __len__(self) -> int:
        return self.values.size


@dataclass(frozen=True, eq=False)
class BoxConstraint:
    """Per-option loss intervals [lower[i], upper[i]]"""
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = _as_vector(self.lower, "lower")
        upper = _as_vector(self.upper, "upper")
        if lower.shape != upper.shape:
            raise ValueError(f"lower/upper length mismatch: {lower.size} vs {upper.size}")
        if np.any(lower > upper):
            bad = np.flatnonzero(lower > upper).tolist()
            raise ValueError(f"lower > upper for options {bad}")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def m(self) -> int:
        return self.lower.size

    @property
    def widths(self) -> np.ndarray:
        return self.upper - self.lower

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.upper + self.lower)

    def contains(self, loss: np.ndarray, tol: float = 1e-9) -> bool:
        loss = np.asarray(loss, dtype=float)
        return bool(np.all(loss >= self.lower - tol) and np.all(loss <= self.upper + tol))

    def restrict(self, indices: Sequence[int]) -> "BoxConstraint":
        indices = np.asarray(indices, dtype=int)
        return BoxConstraint(self.lower[indices], self.upper[indices])

    @classmethod
    def uniform(cls, m: int, low: float = 0.0, high: float = 1.0) -> "BoxConstraint":
        return cls(np.full(m, low), np.full(m, high))


@dataclass(frozen=True, eq=False)
class Distribution:
    """Point on the probability simplex

    Entries in [-1e-12, 0) are clamped to zero and the vector renormalized;
    anything more negative is rejected.
    """
    probs: np.ndarray

    def __post_init__(self):
        probs = np.array(self.probs, dtype=float).reshape(-1)
        if probs.size == 0 or not np.all(np.isfinite(probs)):
            raise InvalidDistributionError(f"invalid probabilities {probs}")
        if np.any(probs < -CLAMP_TOLERANCE):
            raise InvalidDistributionError(
                f"negative probability {probs.min():.3e}",
                {"probs": probs.tolist()},
            )
        total = probs.sum()
        if abs(total - 1.0) > SUM_TOLERANCE:
            raise InvalidDistributionError(
                f"probabilities sum to {total!r}", {"probs": probs.tolist()}
            )
        if np.any(probs < 0.0):
            probs = np.clip(probs, 0.0, None)
            probs = probs / probs.sum()
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    @property
    def m(self) -> int:
        return self.probs.size

    def expected_loss(self, loss: np.ndarray) -> float:
        return float(self.probs @ np.asarray(loss, dtype=float))

    @classmethod
    def uniform(cls, m: int) -> "Distribution":
        return cls(np.full(m, 1.0 / m))


@dataclass(frozen=True, eq=False)
class LossRange:
    """The constant L: largest spread between any two options' losses"""
    value: float

    def __post_init__(self):
        if not np.isfinite(self.value) or self.value < 0.0:
            raise ValueError(f"loss range must be a nonnegative real, got {self.value}")

    def __float__(self) -> float:
        return float(self.value)


@dataclass(eq=False)
class GameHistory:
    """Per-step expected and realized losses plus per-option cumulative losses"""
    m: int
    expected_losses: List[float] = field(default_factory=list)
    realized_losses: List[float] = field(default_factory=list)
    cumulative_per_option: np.ndarray = None

    def __post_init__(self):
        if self.cumulative_per_option is None:
            self.cumulative_per_option = np.zeros(self.m)
        else:
            self.cumulative_per_option = np.array(self.cumulative_per_option, dtype=float)

    def record(self, dist: Distribution, loss: LossVector, action: int) -> None:
        self.expected_losses.append(dist.expected_loss(loss.values))
        self.realized_losses.append(float(loss.values[action]))
        self.cumulative_per_option = self.cumulative_per_option + loss.values

    @property
    def steps(self) -> int:
        return len(self.expected_losses)

    @property
    def expected_cost(self) -> float:
        return float(np.sum(self.expected_losses))

    @property
    def realized_cost(self) -> float:
        return float(np.sum(self.realized_losses))

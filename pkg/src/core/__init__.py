from .errors import (
    CmwError,
    InvalidDistributionError,
    ConstraintViolationError,
    InfeasibleDirectionError,
    SolverError,
    InfeasibleError,
    UnboundedError,
    IterationLimitError,
    NumericalError,
    SolverCapError,
    InvariantViolationError,
    BoundViolationError,
)
from .types import LossVector, BoxConstraint, Distribution, LossRange, GameHistory
from .accounting import loss_range, regret, best_in_hindsight, sample, corner_matrix, corners

__all__ = [
    "CmwError",
    "InvalidDistributionError",
    "ConstraintViolationError",
    "InfeasibleDirectionError",
    "SolverError",
    "InfeasibleError",
    "UnboundedError",
    "IterationLimitError",
    "NumericalError",
    "SolverCapError",
    "InvariantViolationError",
    "BoundViolationError",
    "LossVector",
    "BoxConstraint",
    "Distribution",
    "LossRange",
    "GameHistory",
    "loss_range",
    "regret",
    "best_in_hindsight",
    "sample",
    "corner_matrix",
    "corners",
]

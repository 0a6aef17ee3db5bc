"""
Error hierarchy shared by all modules
"""
from typing import Any, Dict, Optional


class CmwError(Exception):
    """Base class for every error raised by this package"""

    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.diagnostics: Dict[str, Any] = diagnostics or {}


class InvalidDistributionError(CmwError, ValueError):
    """Probabilities are negative beyond tolerance or do not sum to one"""


class ConstraintViolationError(CmwError):
    """The environment revealed a loss outside the announced box"""


class InfeasibleDirectionError(CmwError, ValueError):
    """A direction q lies outside the feasible set"""


class SolverError(CmwError):
    """Base class for inner-solver failures"""


class InfeasibleError(SolverError):
    """Linear program has no feasible point"""


class UnboundedError(SolverError):
    """Linear program objective is unbounded below"""


class IterationLimitError(SolverError):
    """Iterative solver exceeded its iteration cap"""


class NumericalError(SolverError):
    """Basis became numerically singular or the solution failed its residual check"""


class SolverCapError(SolverError):
    """Problem too large for the requested solver"""


class InvariantViolationError(CmwError, AssertionError):
    """A runtime-checked invariant failed"""


class BoundViolationError(InvariantViolationError):
    """Realized regret exceeded its theoretical bound"""

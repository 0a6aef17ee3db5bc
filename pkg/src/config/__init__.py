from .settings import (
    settings,
    create_directories,
    SolverKind,
    Algorithm,
    Suite,
    SOLVER_ALIASES,
)

__all__ = [
    "settings",
    "create_directories",
    "SolverKind",
    "Algorithm",
    "Suite",
    "SOLVER_ALIASES",
]

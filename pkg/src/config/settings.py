"""
Configuration settings for Constrained Multiplicative Weights
"""
import os
from enum import Enum

from pydantic_settings import BaseSettings, SettingsConfigDict


class SolverKind(str, Enum):
    EXACT_LP = "exact_lp"
    CLOSED_FORM_M2 = "closed_form_m2"
    APPROXIMATE = "approximate"
    ZERO = "zero"


class Algorithm(str, Enum):
    CMW = "cmw"
    MW = "mw"
    BEST = "best"


class Suite(str, Enum):
    PSD = "psd"
    SCHEDULE = "schedule"
    BOUNDS = "bounds"
    SOLVERS = "solvers"
    EQUILIBRIUM = "equilibrium"
    ALL = "all"


# CLI spelling -> solver kind
SOLVER_ALIASES = {
    "exact": SolverKind.EXACT_LP,
    "m2": SolverKind.CLOSED_FORM_M2,
    "approx": SolverKind.APPROXIMATE,
}


class Settings(BaseSettings):
    """Main configuration settings"""

    model_config = SettingsConfigDict(env_file=".env", env_prefix="CMW_", extra="ignore")

    # Application settings
    app_name: str = "Constrained Multiplicative Weights"
    version: str = "1.0.0"
    debug: bool = False

    # Per-step schedule inequality checks in the engine (CMW_DEBUG_ASSERT=1)
    debug_assert: bool = False

    # Output
    output_dir: str = "results"
    # Experiment defaults when neither a flag nor a config file sets them
    default_seed: int = 0
    default_trials: int = 100  # random intervals
    histogram_bin_width: float = 2.0

    # Solver limits
    max_exact_options: int = 16
    max_corner_options: int = 25
    lp_tolerance: float = 1e-9
    lp_max_iterations: int = 50000
    qp_iteration_factor: int = 50

    # Protocol checks
    membership_tolerance: float = 1e-9

    # Logging
    log_level: str = "INFO"
    log_file: str = "logs/cmw.log"


# Global settings instance
settings = Settings()


def create_directories(*directories: str) -> None:
    """Create the given directories, or the output directory when none are given"""
    for directory in directories or (settings.output_dir,):
        os.makedirs(directory, exist_ok=True)

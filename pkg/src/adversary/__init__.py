from .strategy import (
    CornerStrategy,
    AdversarialEnvironment,
    corner_vector,
    worst_case_strategy,
    verify_equilibrium,
    adversarial_environment,
)

__all__ = [
    "CornerStrategy",
    "AdversarialEnvironment",
    "corner_vector",
    "worst_case_strategy",
    "verify_equilibrium",
    "adversarial_environment",
]

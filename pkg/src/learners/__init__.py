from .hedge import (
    Hedge,
    HedgeState,
    hedge_epsilon,
    hedge_distribution,
    hedge_regret_bound,
)
from .cmw_engine import (
    CmwConfig,
    CmwState,
    ConstrainedHedge,
    RegretBound,
    RoundPlan,
    r_bar,
    init_state,
    epsilon,
    weights,
    distribution,
    observe,
    regret_bound,
)

__all__ = [
    "Hedge",
    "HedgeState",
    "hedge_epsilon",
    "hedge_distribution",
    "hedge_regret_bound",
    "CmwConfig",
    "CmwState",
    "ConstrainedHedge",
    "RegretBound",
    "RoundPlan",
    "r_bar",
    "init_state",
    "epsilon",
    "weights",
    "distribution",
    "observe",
    "regret_bound",
]

"""
Seeded experiment harness: random intervals, logistic-map identification,
worst-case adversary games
"""
import math
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, List, Optional, Sequence, Tuple, TypeVar, Union

import numpy as np
from loguru import logger
from pydantic import BaseModel, Field, model_validator

from ..adversary import AdversarialEnvironment
from ..config import Algorithm, SolverKind, settings
from ..core.accounting import loss_range, sample
from ..core.errors import BoundViolationError
from ..core.types import BoxConstraint, LossVector
from ..learners import CmwConfig, ConstrainedHedge, Hedge
from ..solvers import objective_value
from .records import TraceRecorder, TrialRecord, TrialResult

BOUND_TOLERANCE = 1e-9

Seed = Union[int, Sequence[int]]


def _check_exact_cap(m: int, solver_kind: SolverKind) -> None:
    if solver_kind is SolverKind.EXACT_LP and m > settings.max_exact_options:
        raise ValueError(
            f"m={m} exceeds the exact solver limit of {settings.max_exact_options}; "
            "use approximate solver"
        )


class RandomIntervalConfig(BaseModel):
    m: int = Field(default=10, ge=2)
    T: int = Field(default=200, ge=1)
    trials: int = Field(default_factory=lambda: settings.default_trials, ge=1)
    seed: int = Field(default_factory=lambda: settings.default_seed)
    solver_kind: SolverKind = SolverKind.EXACT_LP
    hedge_L: float = Field(default=1.0, gt=0.0)
    c1: float = Field(default=1e-2, gt=0.0)
    c2: Optional[float] = Field(default=None, gt=0.0)

    @model_validator(mode="after")
    def _check(self) -> "RandomIntervalConfig":
        _check_exact_cap(self.m, self.solver_kind)
        if self.solver_kind is SolverKind.CLOSED_FORM_M2 and self.m != 2:
            raise ValueError("closed_form_m2 requires m = 2")
        return self


class LogisticMapConfig(BaseModel):
    m: int = Field(default=50, ge=2)
    theta_lo: float = 3.0
    theta_hi: float = 3.9
    theta_true: float = 3.57
    noise_bound: float = Field(default=0.05, ge=0.0)
    T: int = Field(default=200, ge=1)
    x0: float = Field(default=0.2, gt=0.0, lt=1.0)
    trials: int = Field(default=1, ge=1)
    seed: int = Field(default_factory=lambda: settings.default_seed)
    solver_kind: SolverKind = SolverKind.APPROXIMATE
    # None: tightest uniform bound on any one-step error over the grid
    L: Optional[float] = Field(default=None, gt=0.0)
    hedge_L: Optional[float] = Field(default=None, gt=0.0)
    c1: float = Field(default=1e-2, gt=0.0)
    c2: Optional[float] = Field(default=None, gt=0.0)

    @model_validator(mode="after")
    def _check(self) -> "LogisticMapConfig":
        if not self.theta_lo < self.theta_hi:
            raise ValueError("theta_lo must be below theta_hi")
        if (self.theta_true + self.noise_bound) * 0.25 > 1.0:
            raise ValueError("theta_true + noise_bound must stay at or below 4")
        _check_exact_cap(self.m, self.solver_kind)
        return self

    @property
    def theta_grid(self) -> np.ndarray:
        return np.linspace(self.theta_lo, self.theta_hi, self.m)

    @property
    def loss_bound(self) -> float:
        if self.L is not None:
            return self.L
        spread = max(self.theta_true - self.theta_lo, self.theta_hi - self.theta_true)
        return (spread + self.noise_bound) * 0.25

    @property
    def mw_loss_bound(self) -> float:
        return self.loss_bound if self.hedge_L is None else self.hedge_L


class AdversarialConfig(BaseModel):
    m: int = Field(default=3, ge=2)
    T: int = Field(default=100, ge=1)
    trials: int = Field(default=20, ge=1)
    seed: int = Field(default_factory=lambda: settings.default_seed)
    hedge_L: float = Field(default=1.0, gt=0.0)
    c1: float = Field(default=1e-2, gt=0.0)
    c2: Optional[float] = Field(default=None, gt=0.0)

    @model_validator(mode="after")
    def _check(self) -> "AdversarialConfig":
        _check_exact_cap(self.m, SolverKind.EXACT_LP)
        return self


def rng_streams(seed: Seed, n: int = 3) -> List[np.random.Generator]:
    """Independent generators: environment first, then one per agent"""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n)]


def draw_box(rng: np.random.Generator, m: int) -> BoxConstraint:
    """Each interval spans two sorted uniforms on [0, 1]"""
    pairs = np.sort(rng.uniform(size=(m, 2)), axis=1)
    return BoxConstraint(pairs[:, 0], pairs[:, 1])


def _check_bound(record: TrialRecord, L: float, observed_range: float, advisory: bool = False) -> None:
    if observed_range > L + BOUND_TOLERANCE:
        logger.warning(
            f"{record.algorithm.value}: observed loss range {observed_range:.6g} exceeds "
            f"L={L:.6g}; bound check skipped"
        )
        return
    if record.final_regret > record.bound + BOUND_TOLERANCE:
        if advisory:
            logger.warning(
                f"{record.algorithm.value}: regret {record.final_regret:.6g} exceeds the advisory "
                f"bound {record.bound:.6g}"
            )
            return
        raise BoundViolationError(
            f"{record.algorithm.value} regret exceeds its bound",
            {"regret": record.final_regret, "bound": record.bound, "steps": record.steps},
        )


class _Game:
    """CMW and MW agents with their trace recorders"""

    def __init__(self, cmw_config: CmwConfig, mw_L: float, cmw_rng, mw_rng):
        self.cmw = ConstrainedHedge(cmw_config)
        self.mw = Hedge(cmw_config.m, cmw_config.T, mw_L)
        self.cmw_rng, self.mw_rng = cmw_rng, mw_rng
        self.cmw_trace = TraceRecorder(Algorithm.CMW, cmw_config.m)
        self.mw_trace = TraceRecorder(Algorithm.MW, cmw_config.m)
        self.boxes: List[BoxConstraint] = []

    def step_cmw(self, plan, loss: LossVector) -> None:
        action = sample(plan.distribution, self.cmw_rng)
        r_tilde = self.cmw.update(loss)
        bound = self.cmw.regret_bound().value
        self.cmw_trace.record(plan.distribution, loss, action, plan.epsilon, r_tilde, bound)

    def step_mw(self, dist, loss: LossVector) -> None:
        action = sample(dist, self.mw_rng)
        self.mw.update(loss)
        second_order = objective_value(dist.probs, loss.values, np.zeros(loss.m))
        self.mw_trace.record(dist, loss, action, self.mw.epsilon, second_order, self.mw.regret_bound())

    def finish(self, index: int, cmw_r_star=None, mw_r_star=None) -> TrialResult:
        cmw = self.cmw_trace.finish(cmw_r_star)
        mw = self.mw_trace.finish(mw_r_star)
        observed = float(loss_range(self.boxes))
        _check_bound(cmw, self.cmw.config.L, observed, self.cmw.regret_bound().advisory)
        _check_bound(mw, self.mw.L, observed)
        return TrialResult(index=index, cmw=cmw, mw=mw)


def _trial_index(seed: Seed) -> int:
    return int(seed[-1]) if isinstance(seed, (list, tuple)) else 0


def random_intervals_trial(config: RandomIntervalConfig, seed: Seed) -> TrialResult:
    """One game on random intervals; both agents see the same boxes and losses"""
    env, cmw_rng, mw_rng = rng_streams(seed)
    cmw_config = CmwConfig(
        m=config.m, T=config.T, L=1.0, c1=config.c1, c2=config.c2, solver_kind=config.solver_kind
    )
    game = _Game(cmw_config, config.hedge_L, cmw_rng, mw_rng)

    for _ in range(config.T):
        box = draw_box(env, config.m)
        game.boxes.append(box)
        plan = game.cmw.plan(box)
        dist = game.mw.distribution()
        loss = LossVector(env.uniform(box.lower, box.upper))
        game.step_cmw(plan, loss)
        game.step_mw(dist, loss)

    result = game.finish(_trial_index(seed))
    logger.debug(
        f"random intervals trial {result.index}: CMW regret {result.cmw.final_regret:.4f}, "
        f"MW regret {result.mw.final_regret:.4f}"
    )
    return result


def logistic_truth_step(
    x: float, rng: np.random.Generator, theta_true: float = 3.57, noise_bound: float = 0.05
) -> float:
    """(theta_true + n) x (1 - x) with n uniform on [-noise_bound, noise_bound]"""
    n = rng.uniform(-noise_bound, noise_bound) if noise_bound > 0.0 else 0.0
    return (theta_true + n) * x * (1.0 - x)


def logistic_loss_and_interval(
    x: float,
    theta: Union[float, np.ndarray],
    x_next: float,
    theta_true: float = 3.57,
    noise_bound: float = 0.05,
) -> Tuple[np.ndarray, Tuple[np.ndarray, np.ndarray]]:
    """One-step prediction error of candidate theta and its a priori interval

    With g = x(1-x) and d = |theta_true - theta| the error lies in
    [max(0, d - noise_bound) g, (d + noise_bound) g].
    """
    theta = np.asarray(theta, dtype=float)
    g = x * (1.0 - x)
    d = np.abs(theta_true - theta)
    lower = np.maximum(0.0, d - noise_bound) * g
    upper = (d + noise_bound) * g
    loss = np.abs(x_next - theta * g)
    # rounding can leave the error a few ulps outside its interval
    return np.clip(loss, lower, upper), (lower, upper)


def logistic_map_run(config: LogisticMapConfig, seed: Seed) -> TrialResult:
    """Online identification of the logistic-map parameter over a grid of candidates"""
    env, cmw_rng, mw_rng = rng_streams(seed)
    grid = config.theta_grid
    cmw_config = CmwConfig(
        m=config.m,
        T=config.T,
        L=config.loss_bound,
        c1=config.c1,
        c2=config.c2,
        solver_kind=config.solver_kind,
    )
    game = _Game(cmw_config, config.mw_loss_bound, cmw_rng, mw_rng)

    x = config.x0
    for _ in range(config.T):
        x_next = logistic_truth_step(x, env, config.theta_true, config.noise_bound)
        loss, (lower, upper) = logistic_loss_and_interval(
            x, grid, x_next, config.theta_true, config.noise_bound
        )
        box = BoxConstraint(lower, upper)
        game.boxes.append(box)
        plan = game.cmw.plan(box)
        dist = game.mw.distribution()
        loss = LossVector(loss)
        game.step_cmw(plan, loss)
        game.step_mw(dist, loss)
        x = x_next

    result = game.finish(_trial_index(seed))
    nearest = set(np.argsort(np.abs(grid - config.theta_true))[:3].tolist())
    if result.cmw.best_index not in nearest:
        logger.warning(
            f"logistic run {result.index}: best option {result.cmw.best_index} "
            f"(theta={grid[result.cmw.best_index]:.4f}) is not next to theta_true"
        )
    logger.debug(
        f"logistic run {result.index}: CMW cost {result.cmw.expected_cost:.4f}, "
        f"MW cost {result.mw.expected_cost:.4f}, best {result.best_cost:.4f}"
    )
    return result


def adversarial_trial(config: AdversarialConfig, seed: Seed) -> TrialResult:
    """CMW and MW each facing per-round worst-case corner play on random boxes"""
    env, cmw_rng, mw_rng, cmw_adv_rng, mw_adv_rng = rng_streams(seed, 5)
    cmw_config = CmwConfig(
        m=config.m, T=config.T, L=1.0, c1=config.c1, c2=config.c2, solver_kind=SolverKind.EXACT_LP
    )
    game = _Game(cmw_config, config.hedge_L, cmw_rng, mw_rng)
    cmw_adversary = AdversarialEnvironment(cmw_adv_rng)
    mw_adversary = AdversarialEnvironment(mw_adv_rng)

    for _ in range(config.T):
        box = draw_box(env, config.m)
        game.boxes.append(box)
        plan = game.cmw.plan(box)
        game.step_cmw(plan, cmw_adversary.respond(plan.outcome.weights, plan.epsilon, box))
        dist = game.mw.distribution()
        game.step_mw(dist, mw_adversary.respond(dist.probs, game.mw.epsilon, box))

    return game.finish(
        _trial_index(seed), cmw_adversary.r_star_trace, mw_adversary.r_star_trace
    )


TrialFn = Callable[[BaseModel, Seed], TrialResult]
C = TypeVar("C", bound=BaseModel)


def run_trials(fn: TrialFn, config: C, jobs: int = 1) -> List[TrialResult]:
    """Run config.trials seeded trials, in parallel when jobs > 1, ordered by trial index"""
    seeds = [[config.seed, index] for index in range(config.trials)]
    logger.info(f"Running {config.trials} trial(s) of {fn.__name__} with {jobs} job(s)")
    if jobs <= 1 or config.trials == 1:
        results = [fn(config, seed) for seed in seeds]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            results = list(executor.map(fn, [config] * len(seeds), seeds))
    logger.info(f"Finished {len(results)} trial(s)")
    return results


def mean_r_star(record: TrialRecord) -> float:
    if not record.r_star_trace:
        return math.nan
    return float(np.mean(record.r_star_trace))

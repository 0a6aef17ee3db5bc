"""
Invariant suites behind `cmw verify`
"""
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from loguru import logger

from ..adversary import AdversarialEnvironment, verify_equilibrium, worst_case_strategy
from ..config import SolverKind, Suite
from ..core.accounting import regret, sample
from ..core.errors import CmwError
from ..core.types import BoxConstraint, GameHistory, LossVector
from ..learners import CmwConfig, ConstrainedHedge, Hedge, hedge_epsilon, hedge_regret_bound
from ..solvers import curvature_matrix, solve_approx, solve_exact, solve_m2
from .harness import draw_box

GAP_TOLERANCE = 1e-6
BOUND_TOLERANCE = 1e-9


@dataclass(eq=False)
class SuiteResult:
    suite: Suite
    passed: bool
    detail: str
    metrics: Dict[str, float] = field(default_factory=dict)


def _small_epsilon(rng: np.random.Generator) -> float:
    # eps L <= 0.1 with L <= 1
    return float(rng.uniform(0.01, 0.1))


def suite_psd(seed: int = 0, samples: int = 1000) -> SuiteResult:
    rng = np.random.default_rng(seed)
    worst_eig, worst_row_sum = math.inf, 0.0
    for _ in range(samples):
        m = int(rng.integers(2, 21))
        Q = curvature_matrix(rng.dirichlet(np.ones(m)))
        worst_eig = min(worst_eig, Q.min_eigenvalue())
        worst_row_sum = max(worst_row_sum, float(np.abs(Q.matvec(np.ones(m))).max()))
    passed = worst_eig >= -1e-10 and worst_row_sum <= 1e-12
    return SuiteResult(
        Suite.PSD,
        passed,
        f"min eigenvalue {worst_eig:.3e}, max |Q1| {worst_row_sum:.3e} over {samples} weight vectors",
        {"min_eigenvalue": worst_eig, "max_row_sum": worst_row_sum},
    )


def suite_schedule(seed: int = 0, games: int = 20) -> SuiteResult:
    """Step-size schedule inequalities checked at every step of default-c2 games"""
    rng = np.random.default_rng(seed)
    for game in range(games):
        m = int(rng.integers(2, 7))
        T = int(rng.integers(10, 201))
        agent = ConstrainedHedge(CmwConfig(m=m, T=T, L=1.0, debug_assert=True))
        try:
            for _ in range(T):
                box = draw_box(rng, m)
                agent.plan(box)
                agent.update(LossVector(rng.uniform(box.lower, box.upper)))
        except CmwError as e:
            return SuiteResult(Suite.SCHEDULE, False, f"game {game} (m={m}, T={T}): {e}", e.diagnostics)
    return SuiteResult(Suite.SCHEDULE, True, f"schedule inequalities held at every step of {games} games")


def _hedge_equivalence(rng: np.random.Generator, m: int, T: int) -> float:
    """Largest gap between hedge and the engine forced to q = 0 with hedge's step size"""
    eps = hedge_epsilon(m, T, 1.0)
    hedge = Hedge(m, T, 1.0)
    engine = ConstrainedHedge(
        CmwConfig(m=m, T=T, L=1.0, solver_kind=SolverKind.ZERO, fixed_epsilon=eps)
    )
    worst = 0.0
    for _ in range(T):
        box = draw_box(rng, m)
        plan = engine.plan(box)
        worst = max(worst, float(np.abs(plan.distribution.probs - hedge.distribution().probs).max()))
        loss = LossVector(rng.uniform(box.lower, box.upper))
        engine.update(loss)
        hedge.update(loss)
    return worst


def suite_bounds(seed: int = 0, games: int = 100) -> SuiteResult:
    """Realized regret against both theoretical bounds over a mixed game battery

    Every fifth game uses the worst-case corner adversary instead of random losses.
    """
    rng = np.random.default_rng(seed)
    worst_mw, worst_cmw, worst_equiv = 0.0, 0.0, 0.0
    for game in range(games):
        adversarial = game % 5 == 4
        m = int(rng.integers(2, 6 if adversarial else 11))
        T = int(rng.integers(10, 201))
        kind = SolverKind.EXACT_LP if m <= 6 else SolverKind.APPROXIMATE
        cmw = ConstrainedHedge(CmwConfig(m=m, T=T, L=1.0, solver_kind=kind))
        mw = Hedge(m, T, 1.0)
        cmw_history, mw_history = GameHistory(m), GameHistory(m)
        adversary = AdversarialEnvironment(rng) if adversarial else None

        for _ in range(T):
            box = draw_box(rng, m)
            plan = cmw.plan(box)
            dist = mw.distribution()
            if adversary is not None:
                cmw_loss = adversary.respond(plan.outcome.weights, plan.epsilon, box)
                mw_loss = adversary.respond(dist.probs, mw.epsilon, box)
            else:
                cmw_loss = mw_loss = LossVector(rng.uniform(box.lower, box.upper))
            cmw.update(cmw_loss)
            mw.update(mw_loss)
            cmw_history.record(plan.distribution, cmw_loss, sample(plan.distribution, rng))
            mw_history.record(dist, mw_loss, sample(dist, rng))

        cmw_bound = cmw.regret_bound().value
        mw_bound = hedge_regret_bound(m, T, 1.0)
        cmw_regret, mw_regret = regret(cmw_history), regret(mw_history)
        if cmw_regret > cmw_bound + BOUND_TOLERANCE or mw_regret > mw_bound + BOUND_TOLERANCE:
            return SuiteResult(
                Suite.BOUNDS,
                False,
                f"game {game} (m={m}, T={T}): CMW {cmw_regret:.4g}/{cmw_bound:.4g}, "
                f"MW {mw_regret:.4g}/{mw_bound:.4g}",
            )
        worst_cmw = max(worst_cmw, cmw_regret / cmw_bound)
        worst_mw = max(worst_mw, mw_regret / mw_bound)

    for _ in range(5):
        worst_equiv = max(worst_equiv, _hedge_equivalence(rng, int(rng.integers(2, 11)), 50))
    passed = worst_equiv <= 1e-12
    return SuiteResult(
        Suite.BOUNDS,
        passed,
        f"max regret/bound: CMW {worst_cmw:.4f}, MW {worst_mw:.4f}; "
        f"q=0 vs hedge max gap {worst_equiv:.2e}",
        {"cmw_ratio": worst_cmw, "mw_ratio": worst_mw, "hedge_gap": worst_equiv},
    )


def grid_minmax(
    u: np.ndarray,
    epsilon: float,
    box: BoxConstraint,
    center: np.ndarray,
    half_width: float,
    step: float,
) -> Tuple[float, np.ndarray]:
    """Brute-force min over feasible q = center + (a, b, -a-b) of the max-corner objective, m = 3"""
    offsets = np.arange(-half_width, half_width + step / 2, step)
    a, b = np.meshgrid(offsets, offsets, indexing="ij")
    q = np.stack([a.ravel(), b.ravel(), -(a + b).ravel()], axis=1) + center
    q = q[np.all(0.5 * epsilon * (q - (q @ u)[:, None]) <= 1.0 + 1e-12, axis=1)]
    bits = (np.arange(8)[:, None] >> np.arange(3)) & 1
    C = np.where(bits.astype(bool), box.upper, box.lower)
    QC = u * C - (C @ u)[:, None] * u
    g = np.sum(C * QC, axis=1)
    worst = np.max(g[None, :] - q @ QC.T, axis=1)
    best = int(np.argmin(worst))
    return float(worst[best]), q[best]


def zoom_minmax(u: np.ndarray, epsilon: float, box: BoxConstraint, half_width: float) -> float:
    """Repeated grid search, each level centered on the previous minimizer and 20x finer"""
    center = np.zeros(3)
    best = np.inf
    while half_width > 1e-5:
        step = half_width / 200.0
        best, center = grid_minmax(u, epsilon, box, center, half_width, step)
        half_width = 10.0 * step
    return best


def suite_solvers(seed: int = 0, instances: int = 200) -> SuiteResult:
    """Exact LP against the m = 2 closed form, a grid search for m = 3 and the variance bound"""
    rng = np.random.default_rng(seed)
    worst_m2, worst_approx, worst_grid = 0.0, 0.0, 0.0
    for _ in range(instances // 2):
        box, u, eps = draw_box(rng, 2), rng.dirichlet(np.ones(2)), _small_epsilon(rng)
        exact, closed = solve_exact(u, eps, box), solve_m2(u, eps, box)
        worst_m2 = max(worst_m2, abs(exact.value - closed.value))
        worst_approx = max(worst_approx, float(np.abs(solve_approx(u, eps, box).q - closed.q).max()))

    for _ in range(instances - instances // 2):
        box = draw_box(rng, 3)
        u, eps = rng.dirichlet(np.ones(3)), _small_epsilon(rng)
        exact = solve_exact(u, eps, box)
        if exact.active.size < 3:
            continue
        # |q_i| <= 4 / (eps min u) on the feasible set; the minimizer sits well inside that
        reach = 4.0 / (eps * u.min())
        half_width = min(reach, max(2.0, 2.0 * float(np.abs(exact.q).max())))
        worst_grid = max(worst_grid, abs(zoom_minmax(u, eps, box, half_width) - exact.value))

    uniform_gap = 0.0
    for m in range(2, 9):
        value = solve_exact(np.full(m, 1.0 / m), 1e-3, BoxConstraint.uniform(m)).value
        uniform_gap = max(uniform_gap, abs(value - (m // 2) * ((m + 1) // 2) / m ** 2))

    passed = worst_m2 <= 1e-9 and worst_approx <= 1e-6 and worst_grid <= 2e-3 and uniform_gap <= 1e-7
    return SuiteResult(
        Suite.SOLVERS,
        passed,
        f"m=2 value gap {worst_m2:.2e}, m=2 approx q gap {worst_approx:.2e}, "
        f"m=3 grid gap {worst_grid:.2e}, uniform box gap {uniform_gap:.2e}",
        {"m2_gap": worst_m2, "approx_gap": worst_approx, "grid_gap": worst_grid, "uniform_gap": uniform_gap},
    )


def suite_equilibrium(seed: int = 0, instances: int = 100, m: Optional[int] = None) -> SuiteResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(instances):
        size = m if m is not None else int(rng.integers(2, 6))
        box, u, eps = draw_box(rng, size), rng.dirichlet(np.ones(size)), _small_epsilon(rng)
        strategy, r_star = worst_case_strategy(u, eps, box)
        worst = max(worst, abs(verify_equilibrium(strategy, u, eps, box, r_star)))

    strategy, _ = worst_case_strategy(np.full(2, 0.5), 0.05, BoxConstraint.uniform(2))
    split = max(abs(strategy.corner_probs.get(1, 0.0) - 0.5), abs(strategy.corner_probs.get(2, 0.0) - 0.5))
    passed = worst <= GAP_TOLERANCE and split <= GAP_TOLERANCE
    return SuiteResult(
        Suite.EQUILIBRIUM,
        passed,
        f"max gap {worst:.2e} over {instances} instances, unit-square split error {split:.2e}",
        {"max_gap": worst, "split_error": split},
    )


SUITES: Dict[Suite, Callable[..., SuiteResult]] = {
    Suite.PSD: suite_psd,
    Suite.SCHEDULE: suite_schedule,
    Suite.BOUNDS: suite_bounds,
    Suite.SOLVERS: suite_solvers,
    Suite.EQUILIBRIUM: suite_equilibrium,
}


def run_suites(
    suite: Suite,
    seed: int = 0,
    games: Optional[int] = None,
    instances: Optional[int] = None,
    m: Optional[int] = None,
) -> List[SuiteResult]:
    """Run one suite, or every suite for Suite.ALL"""
    selected = list(SUITES) if suite is Suite.ALL else [suite]
    results = []
    for name in selected:
        kwargs = {"seed": seed}
        if name in (Suite.SCHEDULE, Suite.BOUNDS) and games is not None:
            kwargs["games"] = games
        if name in (Suite.SOLVERS, Suite.EQUILIBRIUM) and instances is not None:
            kwargs["instances"] = instances
        if name is Suite.EQUILIBRIUM and m is not None:
            kwargs["m"] = m
        logger.info(f"Running verification suite '{name.value}'")
        result = SUITES[name](**kwargs)
        (logger.info if result.passed else logger.error)(f"{name.value}: {result.detail}")
        results.append(result)
    return results

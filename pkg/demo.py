#!/usr/bin/env python3
"""
Constrained Multiplicative Weights - Quick Demo Script

Plays one random-interval game and one logistic-map identification run,
then prints how CMW and plain MW fared against the best option.
"""
import sys

from loguru import logger
from rich.console import Console
from rich.table import Table

try:
    from src.config import SolverKind, settings
    from src.core import CmwError
    from src.experiments import (
        LogisticMapConfig,
        RandomIntervalConfig,
        TrialResult,
        logistic_map_run,
        random_intervals_trial,
    )
except ImportError as e:
    logger.error(f"❌ Import error: {e}")
    logger.error("Please make sure all dependencies are installed: pip install -r requirements.txt")
    sys.exit(1)

console = Console()


class SimpleDemo:
    """Small seeded games with a readable summary"""

    def __init__(self, seed: int = 0):
        self.seed = seed

    def _report(self, title: str, result: TrialResult) -> None:
        table = Table(title=title)
        table.add_column("", style="cyan")
        table.add_column("Expected cost", justify="right")
        table.add_column("Realized cost", justify="right")
        table.add_column("Regret", justify="right")
        table.add_column("Bound", justify="right")
        for record in (result.cmw, result.mw):
            table.add_row(
                record.algorithm.value.upper(),
                f"{record.expected_cost:.4f}",
                f"{record.realized_cost:.4f}",
                f"{record.final_regret:.4f}",
                f"{record.bound:.4f}",
            )
        table.add_row("BEST", f"{result.best_cost:.4f}", f"{result.best_cost:.4f}", "", "")
        console.print(table)

    def run_random_intervals_demo(self) -> TrialResult:
        logger.info("🎲 Random intervals: m=10, T=200")
        config = RandomIntervalConfig(m=10, T=200, trials=1, seed=self.seed)
        result = random_intervals_trial(config, [self.seed, 0])
        self._report("Random intervals", result)
        return result

    def run_logistic_demo(self) -> TrialResult:
        logger.info("📈 Logistic map: 50 candidate parameters on [3.0, 3.9]")
        config = LogisticMapConfig(seed=self.seed, solver_kind=SolverKind.APPROXIMATE)
        result = logistic_map_run(config, [self.seed, 0])
        self._report("Logistic-map identification", result)

        grid = config.theta_grid
        weights = result.cmw.final_distribution
        top = weights.argsort()[::-1][:3]
        console.print(
            "CMW mass concentrates on theta = "
            + ", ".join(f"{grid[i]:.4f} ({weights[i]:.2f})" for i in top)
            + f"; true value {config.theta_true}"
        )
        return result


def main():
    """Main demo function"""
    logger.remove()
    logger.add(sys.stderr, level=settings.log_level)
    demo = SimpleDemo()
    try:
        demo.run_random_intervals_demo()
        demo.run_logistic_demo()
        logger.info("✅ Demo finished")
    except CmwError as e:
        logger.error(f"❌ Demo failed: {type(e).__name__}: {e}")
        sys.exit(1)
    except KeyboardInterrupt:
        logger.info("🛑 Demo interrupted by user")


if __name__ == "__main__":
    main()

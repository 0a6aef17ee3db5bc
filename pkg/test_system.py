#!/usr/bin/env python3
"""
Constrained Multiplicative Weights - System Check Script

Quick script to verify the installation end to end. Run it directly;
the pytest suite lives in the other test_*.py files.
"""
import sys

import numpy as np
from loguru import logger


def check_imports() -> bool:
    """Check that all modules can be imported"""
    logger.info("🧪 Checking module imports...")
    try:
        from src.config import settings  # noqa: F401
        from src.core import BoxConstraint, Distribution  # noqa: F401
        from src.solvers import solve, lp_solve, qp_project  # noqa: F401
        from src.learners import ConstrainedHedge, Hedge  # noqa: F401
        from src.adversary import worst_case_strategy  # noqa: F401
        from src.experiments import run_trials, run_suites  # noqa: F401
        return True
    except ImportError as e:
        logger.error(f"❌ Import failed: {e}")
        return False


def check_configuration() -> bool:
    logger.info("🧪 Checking configuration...")
    from src.config import settings

    logger.info(f"✅ App name: {settings.app_name}")
    logger.info(f"✅ Exact solver limit: {settings.max_exact_options} options")
    return settings.max_exact_options <= settings.max_corner_options


def check_solvers() -> bool:
    """Exact LP and the m = 2 closed form agree on a fixed instance"""
    logger.info("🧪 Checking inner solvers...")
    from src.core import BoxConstraint
    from src.solvers import solve_exact, solve_m2

    box = BoxConstraint(np.array([0.1, 0.3]), np.array([0.6, 0.9]))
    u = np.array([0.4, 0.6])
    exact, closed = solve_exact(u, 0.05, box), solve_m2(u, 0.05, box)
    logger.info(f"✅ r* = {exact.value:.6f} (closed form {closed.value:.6f})")
    return abs(exact.value - closed.value) <= 1e-9


def check_game() -> bool:
    """A short game runs and stays under its regret bound"""
    logger.info("🧪 Checking a short game...")
    from src.experiments import RandomIntervalConfig, random_intervals_trial

    result = random_intervals_trial(RandomIntervalConfig(m=4, T=30, trials=1), [0, 0])
    logger.info(f"✅ CMW regret {result.cmw.final_regret:.4f} / bound {result.cmw.bound:.4f}")
    return result.cmw.final_regret <= result.cmw.bound


def check_verification() -> bool:
    logger.info("🧪 Checking verification suites...")
    from src.config import Suite
    from src.experiments import run_suites

    results = run_suites(Suite.EQUILIBRIUM, seed=0, instances=10)
    return all(r.passed for r in results)


def run_all_checks() -> bool:
    """Run all system checks"""
    logger.info("🚀 Starting system checks...")

    checks = [
        ("Module Imports", check_imports),
        ("Configuration", check_configuration),
        ("Inner Solvers", check_solvers),
        ("Short Game", check_game),
        ("Verification", check_verification),
    ]

    passed = 0
    for name, check in checks:
        logger.info(f"📋 Running check: {name}")
        try:
            if check():
                passed += 1
                logger.info(f"✅ {name} PASSED")
            else:
                logger.error(f"❌ {name} FAILED")
        except Exception as e:
            logger.error(f"❌ {name} FAILED with exception: {e}")

    logger.info(f"📊 Results: {passed}/{len(checks)} checks passed")
    if passed == len(checks):
        logger.info("🎉 All checks passed. Try:")
        logger.info("  python demo.py")
        logger.info("  python main.py run random-intervals --trials 10")
        logger.info("  python main.py verify")
    return passed == len(checks)


def main():
    try:
        sys.exit(0 if run_all_checks() else 1)
    except KeyboardInterrupt:
        logger.info("🛑 Checks interrupted by user")
        sys.exit(1)


if __name__ == "__main__":
    main()

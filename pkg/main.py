"""
Constrained Multiplicative Weights - Command line entry point

Runs the seeded experiments, the invariant suites and manifest replays.
"""
import sys
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Tuple, Type

import click
from dotenv import dotenv_values
from loguru import logger
from pydantic import BaseModel, ValidationError
from rich.console import Console
from rich.table import Table

from src.config import SOLVER_ALIASES, SolverKind, Suite, create_directories, settings
from src.core import CmwError
from src.experiments import (
    AdversarialConfig,
    ExperimentSummary,
    LogisticMapConfig,
    RandomIntervalConfig,
    RunManifest,
    adversarial_trial,
    aggregate,
    logistic_map_run,
    mean_r_star,
    random_intervals_trial,
    run_suites,
    run_trials,
    write_summary_json,
    write_trials,
)

console = Console()

# command name -> (config model, trial function)
EXPERIMENTS: Dict[str, Tuple[Type[BaseModel], Callable]] = {
    "random-intervals": (RandomIntervalConfig, random_intervals_trial),
    "logistic": (LogisticMapConfig, logistic_map_run),
    "adversarial": (AdversarialConfig, adversarial_trial),
}

SOLVER_CHOICES = click.Choice(sorted(SOLVER_ALIASES) + [kind.value for kind in SolverKind])


def configure_logging(level: str, log_file: Optional[str] = None) -> None:
    """stderr sink at `level`, plus a rotating file sink when requested"""
    logger.remove()
    logger.add(sys.stderr, level=level.upper(), format="{time:HH:mm:ss} | {level: <8} | {message}")
    if log_file:
        create_directories(str(Path(log_file).parent))
        logger.add(log_file, level="DEBUG", rotation="10 MB", encoding="utf-8")


def _solver_kind(value: str) -> SolverKind:
    return SOLVER_ALIASES.get(value) or SolverKind(value)


def build_config(
    command: str, config_file: Optional[str], flags: Dict[str, Any]
) -> BaseModel:
    """Config file values, overridden by the flags that were given, validated by the model"""
    model, _ = EXPERIMENTS[command]
    values: Dict[str, Any] = {}
    if config_file:
        values.update({k: v for k, v in dotenv_values(config_file).items() if v is not None})
    values.update({k: v for k, v in flags.items() if v is not None})
    if "solver" in values:
        values["solver_kind"] = _solver_kind(str(values.pop("solver")))
    try:
        return model(**values)
    except ValidationError as e:
        messages = "; ".join(err["msg"] for err in e.errors())
        raise click.UsageError(messages)
    except ValueError as e:
        raise click.UsageError(str(e))


def print_summary(command: str, summary: ExperimentSummary, extra: Optional[Dict[str, str]] = None) -> None:
    table = Table(title=f"{command}: {summary.trials} trial(s)")
    table.add_column("Algorithm", style="cyan")
    table.add_column("Median regret", justify="right")
    table.add_column("Mean regret", justify="right")
    table.add_column("Mean expected cost", justify="right")
    table.add_column("Mean realized cost", justify="right")
    for name, stats in summary.algorithms.items():
        table.add_row(
            name.upper(),
            f"{stats.median_regret:.4f}",
            f"{stats.mean_regret:.4f}",
            f"{stats.mean_expected_cost:.4f}",
            f"{stats.mean_realized_cost:.4f}",
        )
    console.print(table)
    console.print(
        f"CMW cheaper than MW in {summary.cmw_beats_mw:.0%} of trials "
        f"(realized: {summary.cmw_beats_mw_realized:.0%}); "
        f"CMW regret negative in {summary.cmw_negative_regret:.0%}"
    )
    for key, value in (extra or {}).items():
        console.print(f"{key}: {value}")


def execute(command: str, config: BaseModel, jobs: int, out: Optional[str]) -> Path:
    """Run the trials, write traces, summary and manifest; returns the output directory"""
    _, trial_fn = EXPERIMENTS[command]
    out_dir = Path(out or Path(settings.output_dir) / command)
    create_directories(str(out_dir))
    manifest = RunManifest(
        command=command, config=config.model_dump(mode="json"), seed=config.seed, jobs=jobs
    )
    try:
        results = run_trials(trial_fn, config, jobs)
    except CmwError as e:
        logger.error(f"{type(e).__name__}: {e} {e.diagnostics}")
        raise click.ClickException(f"{type(e).__name__}: {e}")

    summary = aggregate(results)
    paths = write_trials(results, out_dir)
    paths.append(write_summary_json(summary, out_dir / "summary.json"))
    manifest.finish(paths).save(out_dir / "manifest.yaml")

    extra = {}
    if command == "adversarial":
        extra["Mean r* faced by CMW"] = f"{sum(mean_r_star(r.cmw) for r in results) / len(results):.6f}"
        extra["Mean r* faced by MW"] = f"{sum(mean_r_star(r.mw) for r in results) / len(results):.6f}"
    print_summary(command, summary, extra)
    console.print(f"Outputs written to [bold]{out_dir}[/bold]")
    return out_dir


def common_options(func):
    """Flags shared by every experiment command"""
    options = [
        click.option("--trials", type=click.IntRange(min=1), default=None, help="Number of seeded trials"),
        click.option("--seed", type=int, default=None, help="Base seed"),
        click.option("--c1", type=float, default=None, help="Floor constant for r_bar"),
        click.option("--c2", type=float, default=None, help="Step-size offset (default 2 ln(m) L^2)"),
        click.option("--hedge-L", "hedge_L", type=float, default=None, help="Loss range used by MW"),
        click.option("--jobs", type=click.IntRange(min=1), default=1, show_default=True),
        click.option("--out", type=click.Path(file_okay=False), default=None, help="Output directory"),
        click.option("--config", "config_file", type=click.Path(exists=True, dir_okay=False),
                     default=None, help="key=value file; flags override it"),
    ]
    for option in reversed(options):
        func = option(func)
    return func


@click.group()
@click.option("--log-level", default=None, help="Log level (default from CMW_LOG_LEVEL)")
@click.option("--log-file", default=None, help="Also log to this file")
@click.version_option(settings.version, prog_name="cmw")
def cli(log_level: Optional[str], log_file: Optional[str]):
    """Constrained multiplicative weights experiments and checks"""
    configure_logging(log_level or settings.log_level, log_file or (settings.log_file if settings.debug else None))


@cli.group()
def run():
    """Run an experiment and write traces, summary and manifest"""


@run.command("random-intervals")
@click.option("--m", type=click.IntRange(min=2), default=None, help="Number of options")
@click.option("--T", "T", type=click.IntRange(min=1), default=None, help="Horizon")
@click.option("--solver", type=SOLVER_CHOICES, default=None, help="Inner solver")
@common_options
def run_random_intervals(config_file, jobs, out, **flags):
    """Losses drawn uniformly from random intervals"""
    config = build_config("random-intervals", config_file, flags)
    execute("random-intervals", config, jobs, out)


@run.command("logistic")
@click.option("--m", type=click.IntRange(min=2), default=None, help="Grid size")
@click.option("--T", "T", type=click.IntRange(min=1), default=None, help="Horizon")
@click.option("--x0", type=click.FloatRange(0.0, 1.0, min_open=True, max_open=True), default=None)
@click.option("--theta-true", "theta_true", type=float, default=None)
@click.option("--noise", "noise_bound", type=click.FloatRange(min=0.0), default=None)
@click.option("--L", "L", type=click.FloatRange(min=0.0, min_open=True), default=None,
              help="Loss range used by CMW")
@click.option("--solver", type=SOLVER_CHOICES, default=None, help="Inner solver")
@common_options
def run_logistic(config_file, jobs, out, **flags):
    """Online identification of the logistic-map parameter"""
    config = build_config("logistic", config_file, flags)
    execute("logistic", config, jobs, out)


@run.command("adversarial")
@click.option("--m", type=click.IntRange(min=2), default=None, help="Number of options")
@click.option("--T", "T", type=click.IntRange(min=1), default=None, help="Horizon")
@common_options
def run_adversarial(config_file, jobs, out, **flags):
    """Both algorithms against per-round worst-case corner play"""
    config = build_config("adversarial", config_file, flags)
    execute("adversarial", config, jobs, out)


@cli.command()
@click.option("--suite", type=click.Choice([s.value for s in Suite]), default=Suite.ALL.value, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--games", type=click.IntRange(min=1), default=None, help="Games for schedule/bounds")
@click.option("--instances", type=click.IntRange(min=1), default=None, help="Instances for solvers/equilibrium")
@click.option("--m", type=click.IntRange(2, settings.max_exact_options), default=None,
              help="Option count for equilibrium")
def verify(suite, seed, games, instances, m):
    """Run invariant suites; exit 1 if any fails"""
    try:
        results = run_suites(Suite(suite), seed=seed, games=games, instances=instances, m=m)
    except CmwError as e:
        raise click.ClickException(f"{type(e).__name__}: {e}")

    table = Table(title="Verification")
    table.add_column("Suite", style="cyan")
    table.add_column("Status")
    table.add_column("Detail")
    for result in results:
        status = "[green]PASS[/green]" if result.passed else "[red]FAIL[/red]"
        table.add_row(result.suite.value, status, result.detail)
    console.print(table)
    if not all(result.passed for result in results):
        sys.exit(1)


@cli.command()
@click.argument("manifest_path", metavar="MANIFEST", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", type=click.Path(file_okay=False), default=None,
              help="Output directory (default: next to the manifest)")
def replay(manifest_path, out):
    """Rerun the command recorded in a manifest"""
    manifest = RunManifest.load(manifest_path)
    if manifest.command not in EXPERIMENTS:
        raise click.UsageError(f"unknown command in manifest: {manifest.command}")
    model, _ = EXPERIMENTS[manifest.command]
    try:
        config = model(**manifest.config)
    except ValidationError as e:
        raise click.UsageError(str(e))
    logger.info(f"Replaying {manifest.command} from {manifest_path}")
    execute(manifest.command, config, manifest.jobs, out or str(Path(manifest_path).parent))


def main():
    cli()


if __name__ == "__main__":
    main()

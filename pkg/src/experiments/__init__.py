from .records import (
    CSV_HEADER,
    TraceRow,
    TrialRecord,
    TrialResult,
    TraceRecorder,
    Histogram,
    AlgorithmSummary,
    ExperimentSummary,
    histogram,
    aggregate,
)
from .harness import (
    RandomIntervalConfig,
    LogisticMapConfig,
    AdversarialConfig,
    rng_streams,
    draw_box,
    random_intervals_trial,
    logistic_truth_step,
    logistic_loss_and_interval,
    logistic_map_run,
    adversarial_trial,
    run_trials,
    mean_r_star,
)
from .output import RunManifest, write_trace_csv, write_summary_json, write_trials
from .verification import SuiteResult, SUITES, run_suites

__all__ = [
    "CSV_HEADER",
    "TraceRow",
    "TrialRecord",
    "TrialResult",
    "TraceRecorder",
    "Histogram",
    "AlgorithmSummary",
    "ExperimentSummary",
    "histogram",
    "aggregate",
    "RandomIntervalConfig",
    "LogisticMapConfig",
    "AdversarialConfig",
    "rng_streams",
    "draw_box",
    "random_intervals_trial",
    "logistic_truth_step",
    "logistic_loss_and_interval",
    "logistic_map_run",
    "adversarial_trial",
    "run_trials",
    "mean_r_star",
    "RunManifest",
    "write_trace_csv",
    "write_summary_json",
    "write_trials",
    "SuiteResult",
    "SUITES",
    "run_suites",
]

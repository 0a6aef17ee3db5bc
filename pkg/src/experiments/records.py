"""
Per-step traces, per-trial records and cross-trial summaries
"""
from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple, Optional, Sequence

import numpy as np
from pydantic import BaseModel

from ..config import Algorithm, settings
from ..core.accounting import best_in_hindsight, regret
from ..core.errors import CmwError
from ..core.types import Distribution, GameHistory, LossVector

CSV_HEADER = (
    "t",
    "epsilon",
    "r_tilde",
    "p_expected_loss",
    "realized_loss",
    "action",
    "best_cum",
    "regret",
    "bound",
)


class TraceRow(NamedTuple):
    t: int
    epsilon: float
    r_tilde: float
    p_expected_loss: float
    realized_loss: float
    action: int
    best_cum: float
    regret: float
    bound: float


@dataclass(eq=False)
class TrialRecord:
    algorithm: Algorithm
    rows: List[TraceRow]
    expected_cost: float
    realized_cost: float
    best_cost: float
    best_index: int
    final_regret: float
    bound: float
    final_distribution: np.ndarray
    r_star_trace: Optional[List[float]] = None

    @property
    def steps(self) -> int:
        return len(self.rows)


@dataclass(eq=False)
class TrialResult:
    """One seeded game: CMW and MW on the same environment draws"""
    index: int
    cmw: TrialRecord
    mw: TrialRecord

    @property
    def best_cost(self) -> float:
        return self.cmw.best_cost


class TraceRecorder:
    """Accumulates the trace of one algorithm through a game"""

    def __init__(self, algorithm: Algorithm, m: int):
        self.algorithm = algorithm
        self.history = GameHistory(m)
        self.rows: List[TraceRow] = []
        self.last_distribution: Optional[Distribution] = None

    def record(
        self,
        dist: Distribution,
        loss: LossVector,
        action: int,
        epsilon: float,
        r_tilde: float,
        bound: float,
    ) -> TraceRow:
        self.history.record(dist, loss, action)
        self.last_distribution = dist
        _, best = best_in_hindsight(self.history.cumulative_per_option)
        row = TraceRow(
            t=self.history.steps - 1,
            epsilon=float(epsilon),
            r_tilde=float(r_tilde),
            p_expected_loss=self.history.expected_losses[-1],
            realized_loss=self.history.realized_losses[-1],
            action=int(action),
            best_cum=best,
            regret=regret(self.history),
            bound=float(bound),
        )
        self.rows.append(row)
        return row

    def finish(self, r_star_trace: Optional[Sequence[float]] = None) -> TrialRecord:
        if not self.rows:
            raise CmwError("no steps recorded")
        best_index, best_cost = best_in_hindsight(self.history.cumulative_per_option)
        last = self.rows[-1]
        return TrialRecord(
            algorithm=self.algorithm,
            rows=self.rows,
            expected_cost=self.history.expected_cost,
            realized_cost=self.history.realized_cost,
            best_cost=best_cost,
            best_index=best_index,
            final_regret=last.regret,
            bound=last.bound,
            final_distribution=np.array(self.last_distribution.probs),
            r_star_trace=list(r_star_trace) if r_star_trace is not None else None,
        )


class Histogram(BaseModel):
    edges: List[float]
    counts: List[int]


class AlgorithmSummary(BaseModel):
    median_regret: float
    mean_regret: float
    median_expected_cost: float
    mean_expected_cost: float
    mean_realized_cost: float
    cost_histogram: Histogram


class ExperimentSummary(BaseModel):
    trials: int
    algorithms: Dict[str, AlgorithmSummary]
    # fractions over trials
    cmw_beats_mw: float
    cmw_beats_mw_realized: float
    cmw_negative_regret: float
    max_bound_ratio: Dict[str, float]


def histogram(values: Sequence[float], bin_width: float) -> Histogram:
    """Fixed-width bins aligned to multiples of bin_width, covering every value"""
    values = np.asarray(values, dtype=float)
    lo = np.floor(values.min() / bin_width) * bin_width
    n_bins = max(1, int(np.ceil((values.max() - lo) / bin_width)))
    edges = lo + bin_width * np.arange(n_bins + 1)
    if edges[-1] < values.max():
        edges = np.append(edges, edges[-1] + bin_width)
    counts, edges = np.histogram(values, bins=edges)
    return Histogram(edges=edges.tolist(), counts=counts.tolist())


def _summarize(
    regrets: np.ndarray, expected: np.ndarray, realized: np.ndarray, bin_width: float
) -> AlgorithmSummary:
    return AlgorithmSummary(
        median_regret=float(np.median(regrets)),
        mean_regret=float(np.mean(regrets)),
        median_expected_cost=float(np.median(expected)),
        mean_expected_cost=float(np.mean(expected)),
        mean_realized_cost=float(np.mean(realized)),
        cost_histogram=histogram(expected, bin_width),
    )


def _bound_ratio(records: Sequence[TrialRecord]) -> float:
    ratios = [r.final_regret / r.bound for r in records if r.bound > 0.0]
    return float(max(ratios)) if ratios else 0.0


def aggregate(trials: Sequence[TrialResult], bin_width: Optional[float] = None) -> ExperimentSummary:
    """Histograms and regret statistics per algorithm across trials"""
    if not trials:
        raise CmwError("aggregate needs at least one trial")
    bin_width = settings.histogram_bin_width if bin_width is None else bin_width
    cmw = [t.cmw for t in trials]
    mw = [t.mw for t in trials]

    cmw_regret = np.array([r.final_regret for r in cmw])
    mw_regret = np.array([r.final_regret for r in mw])
    cmw_cost = np.array([r.expected_cost for r in cmw])
    mw_cost = np.array([r.expected_cost for r in mw])
    cmw_realized = np.array([r.realized_cost for r in cmw])
    mw_realized = np.array([r.realized_cost for r in mw])
    best = np.array([t.best_cost for t in trials])

    return ExperimentSummary(
        trials=len(trials),
        algorithms={
            Algorithm.CMW.value: _summarize(cmw_regret, cmw_cost, cmw_realized, bin_width),
            Algorithm.MW.value: _summarize(mw_regret, mw_cost, mw_realized, bin_width),
            Algorithm.BEST.value: _summarize(np.zeros(len(trials)), best, best, bin_width),
        },
        cmw_beats_mw=float(np.mean(cmw_cost < mw_cost)),
        cmw_beats_mw_realized=float(np.mean(cmw_realized < mw_realized)),
        cmw_negative_regret=float(np.mean(cmw_regret < 0.0)),
        max_bound_ratio={
            Algorithm.CMW.value: _bound_ratio(cmw),
            Algorithm.MW.value: _bound_ratio(mw),
        },
    )

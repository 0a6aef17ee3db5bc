"""
Trace CSV, summary JSON and run manifest
"""
import csv
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import yaml
from loguru import logger
from pydantic import BaseModel, Field

from ..config import settings
from .records import CSV_HEADER, ExperimentSummary, TrialRecord, TrialResult

PathLike = Union[str, Path]


def _format(value: Any) -> str:
    if isinstance(value, float):
        return "%.17g" % value
    return str(value)


def write_trace_csv(record: TrialRecord, path: PathLike) -> Path:
    """One row per step; UTF-8, LF line endings, 17 significant digits"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for row in record.rows:
            writer.writerow([_format(value) for value in row])
    return path


def write_summary_json(summary: ExperimentSummary, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(summary.model_dump_json(indent=2) + "\n", encoding="utf-8")
    return path


def write_trials(results: Sequence[TrialResult], out_dir: PathLike) -> List[Path]:
    """trial_NNN_cmw.csv and trial_NNN_mw.csv for every trial"""
    out_dir = Path(out_dir)
    paths = []
    for result in results:
        for record in (result.cmw, result.mw):
            name = f"trial_{result.index:03d}_{record.algorithm.value}.csv"
            paths.append(write_trace_csv(record, out_dir / name))
    logger.info(f"Wrote {len(paths)} trace file(s) to {out_dir}")
    return paths


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


class RunManifest(BaseModel):
    """Everything needed to rerun a command and reproduce its outputs"""

    command: str
    config: Dict[str, Any]
    seed: int
    jobs: int = 1
    version: str = Field(default_factory=lambda: settings.version)
    started_at: str = Field(default_factory=_now)
    finished_at: Optional[str] = None
    outputs: List[str] = Field(default_factory=list)

    def finish(self, outputs: Sequence[PathLike]) -> "RunManifest":
        self.outputs = [str(p) for p in outputs]
        self.finished_at = _now()
        return self

    def save(self, path: PathLike) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as fh:
            yaml.safe_dump(self.model_dump(mode="json"), fh, sort_keys=False, allow_unicode=True)
        return path

    @classmethod
    def load(cls, path: PathLike) -> "RunManifest":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.model_validate(yaml.safe_load(fh))

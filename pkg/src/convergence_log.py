"""
Convergence Log
Per-iteration records kept by both solvers and written as CSV.
"""

import time
import logging
from dataclasses import dataclass
from typing import List

import pandas as pd

from .tensor_io import PathLike, atomic_write

logger = logging.getLogger(__name__)

CSV_COLUMNS = ["iter", "objective", "rse_observed", "elapsed_ms"]


@dataclass(frozen=True)
class LogRecord:
    iter: int
    objective: float
    rse_observed: float
    elapsed_ms: float


class ConvergenceLog:
    """Ordered log of (iter, objective, rse_observed, elapsed_ms) rows"""

    def __init__(self, record_timing: bool = True):
        self.record_timing = record_timing
        self.records: List[LogRecord] = []
        self._start = time.perf_counter()

    def elapsed_ms(self) -> float:
        return (time.perf_counter() - self._start) * 1000.0

    def record(self, iteration: int, objective: float, rse_observed: float) -> LogRecord:
        if self.records and iteration <= self.records[-1].iter:
            raise ValueError(f"Iteration {iteration} does not follow {self.records[-1].iter}")
        elapsed = self.elapsed_ms() if self.record_timing else 0.0
        row = LogRecord(int(iteration), float(objective), float(rse_observed), elapsed)
        self.records.append(row)
        return row

    @property
    def iterations(self) -> int:
        """Last recorded iteration number"""
        return self.records[-1].iter if self.records else 0

    @property
    def objectives(self) -> List[float]:
        return [r.objective for r in self.records]

    def __len__(self) -> int:
        return len(self.records)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([vars(r) for r in self.records], columns=CSV_COLUMNS)

    def write_csv(self, path: PathLike):
        with atomic_write(path, "w") as f:
            self.to_frame().to_csv(f, index=False, lineterminator="\n")
        logger.info(f"Wrote convergence log ({len(self.records)} rows) to {path}")

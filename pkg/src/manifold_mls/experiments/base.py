"""Report interfaces."""

from __future__ import annotations

import abc
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from ..utils import finite_or_none


class Report(abc.ABC):
    """Base class for experiment results.

    ``summary`` is written as ``<name>.json`` and every entry of ``tables``
    as ``<name>_<table>.csv``.
    """

    name: str

    @abc.abstractmethod
    def summary(self) -> Dict[str, Any]:
        """JSON-serializable overview, including the configuration and seeds."""

    def tables(self) -> Dict[str, pd.DataFrame]:
        return {}

    def timings(self) -> Dict[str, float]:
        """Wall-clock seconds per phase, kept apart from the reproducible summary."""

        return {}


@dataclass(slots=True)
class BenchReport(Report):
    """Per-trial errors of a repeated experiment with timing per phase.

    Failed trials carry ``nan`` in ``errors`` and a message in ``failures``.
    """

    name: str
    errors: List[float]
    seeds: List[int]
    metric: str
    config: Dict[str, Any] = field(default_factory=dict)
    phase_seconds: Dict[str, float] = field(default_factory=dict)
    failures: Dict[int, str] = field(default_factory=dict)
    reference: Optional[Tuple[float, float]] = None

    @property
    def n_trials(self) -> int:
        return len(self.errors)

    @property
    def finite_errors(self) -> np.ndarray:
        values = np.asarray(self.errors, dtype=float)
        return values[np.isfinite(values)]

    @property
    def mean(self) -> float:
        values = self.finite_errors
        return float(values.mean()) if values.size else math.nan

    @property
    def std(self) -> float:
        values = self.finite_errors
        if values.size < 2:
            return 0.0 if values.size else math.nan
        return float(values.std(ddof=1))

    def within_reference_band(self, width: float = 3.0) -> Optional[bool]:
        """``|mean - ref_mean| <= width * ref_std`` when a reference exists."""

        if self.reference is None:
            return None
        ref_mean, ref_std = self.reference
        return bool(abs(self.mean - ref_mean) <= width * ref_std)

    def summary(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "metric": self.metric,
            "n_trials": self.n_trials,
            "n_failed": len(self.failures),
            "mean": finite_or_none(self.mean),
            "std": finite_or_none(self.std),
            "display": f"{self.mean:.2f}±{self.std:.2f}",
            "reference": None if self.reference is None else {"mean": self.reference[0], "std": self.reference[1]},
            "within_reference_band": self.within_reference_band(),
            "seeds": list(self.seeds),
            "failures": {str(k): v for k, v in self.failures.items()},
            "config": self.config,
        }

    def timings(self) -> Dict[str, float]:
        return dict(self.phase_seconds)

    def tables(self) -> Dict[str, pd.DataFrame]:
        trials = pd.DataFrame(
            {
                "trial": np.arange(self.n_trials),
                "seed": self.seeds,
                "error": self.errors,
                "status": ["ok" if i not in self.failures else "failed" for i in range(self.n_trials)],
            }
        )
        return {"trials": trials}


__all__ = ["BenchReport", "Report"]

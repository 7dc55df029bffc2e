"""Per-query cost as a function of the ambient dimension."""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from ..approximator import ApproxConfig, local_fit, resolve_config
from ..datasets.embedding import random_isometry
from ..errors import MMLSError
from ..samples import SampleSet
from ..utils import finite_or_none
from .base import Report

logger = logging.getLogger(__name__)


@dataclass(slots=True)
class ScalingRow:
    ambient_dim: int
    median_seconds: float
    max_deviation: float
    n_failed: int


@dataclass(slots=True)
class ScalingReport(Report):
    rows: List[ScalingRow] = field(default_factory=list)
    config: Dict[str, Any] = field(default_factory=dict)
    name: str = "scaling"

    def time_ratios(self) -> List[float]:
        """``time(n_{i+1}) / time(n_i)`` for consecutive entries."""

        return [
            b.median_seconds / a.median_seconds if a.median_seconds > 0 else math.nan
            for a, b in zip(self.rows, self.rows[1:])
        ]

    @property
    def max_deviation(self) -> float:
        values = [row.max_deviation for row in self.rows if math.isfinite(row.max_deviation)]
        return max(values) if values else math.nan

    def summary(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "ambient_dims": [row.ambient_dim for row in self.rows],
            "median_seconds": [row.median_seconds for row in self.rows],
            "time_ratios": [finite_or_none(r) for r in self.time_ratios()],
            "max_deviation": finite_or_none(self.max_deviation),
            "config": self.config,
        }

    def tables(self) -> Dict[str, pd.DataFrame]:
        return {
            "timings": pd.DataFrame(
                [
                    {
                        "ambient_dim": row.ambient_dim,
                        "median_seconds": row.median_seconds,
                        "max_deviation": row.max_deviation,
                        "n_failed": row.n_failed,
                    }
                    for row in self.rows
                ]
            )
        }


def run_scaling(
    samples: SampleSet,
    queries: np.ndarray,
    n_list: Sequence[int],
    cfg: ApproxConfig,
    *,
    seed: int = 0,
) -> ScalingReport:
    """Embed samples and queries isometrically into each ``n`` and time every query.

    ``k`` and ``h`` are resolved once on the base data so every dimension
    runs with the same weights. Deviations are measured against the
    predictions in the first dimension of ``n_list``.
    """

    cfg = resolve_config(samples, cfg.with_seed(seed))
    queries = np.atleast_2d(np.asarray(queries, dtype=float))
    report = ScalingReport(
        config={
            "n_samples": samples.n_samples,
            "base_dim": samples.ambient_dim,
            "n_list": [int(n) for n in n_list],
            "n_queries": int(queries.shape[0]),
            "seed": seed,
            "approx": cfg.model_dump(),
        }
    )

    baseline: Optional[np.ndarray] = None
    for n_target in n_list:
        basis = random_isometry(samples.ambient_dim, int(n_target), seed)
        embedded = SampleSet(samples.points @ basis.T, samples.values)
        lifted = queries @ basis.T

        predictions = np.full((queries.shape[0], samples.value_dim), np.nan)
        seconds = []
        n_failed = 0
        for i, query in enumerate(lifted):
            start = time.perf_counter()
            try:
                predictions[i] = local_fit(query, embedded, cfg.with_seed(seed + i)).value
            except MMLSError as exc:
                n_failed += 1
                logger.warning("n=%d query %d failed: %s", n_target, i, exc)
            seconds.append(time.perf_counter() - start)

        if baseline is None:
            baseline = predictions
        deviation = np.abs(predictions - baseline)
        row = ScalingRow(
            ambient_dim=int(n_target),
            median_seconds=float(np.median(seconds)) if seconds else math.nan,
            max_deviation=float(np.nanmax(deviation)) if np.any(np.isfinite(deviation)) else math.nan,
            n_failed=n_failed,
        )
        report.rows.append(row)
        logger.info("n=%d: median %.3e s/query", row.ambient_dim, row.median_seconds)
    return report


__all__ = ["ScalingReport", "ScalingRow", "run_scaling"]

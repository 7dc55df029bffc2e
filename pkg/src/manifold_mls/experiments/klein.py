"""Klein bottle regression benchmark."""

from __future__ import annotations

import itertools
import logging
import math
import time
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..approximator import ApproxConfig, approximate_batch, resolve_config
from ..datasets.klein import gen_klein, reference_error
from ..utils import finite_or_none, run_parallel
from .base import BenchReport, Report

logger = logging.getLogger(__name__)

# Test sets are drawn from a seed stream disjoint from the training sets.
TEST_SEED_OFFSET = 1_000_000


def _rmse(predicted: np.ndarray, truth: np.ndarray) -> float:
    return float(np.sqrt(np.mean((predicted - truth) ** 2)))


def _run_trial(
    n_points: int, snrdb: float, sigma_r: float, n_test: int, seed: int, cfg: ApproxConfig
) -> Tuple[float, Optional[str], Dict[str, float], Dict[str, Any]]:
    timings: Dict[str, float] = {}
    start = time.perf_counter()
    train = gen_klein(n_points, sigma_r=sigma_r, snrdb=snrdb, seed=seed)
    test = gen_klein(n_test, sigma_r=0.0, snrdb=math.inf, seed=seed + TEST_SEED_OFFSET)
    timings["generate"] = time.perf_counter() - start

    start = time.perf_counter()
    cfg = resolve_config(train, cfg.with_seed(seed))
    batch = approximate_batch(test.points, train, cfg)
    timings["approximate"] = time.perf_counter() - start
    weight = cfg.weight.model_dump()

    ok = np.all(np.isfinite(batch.values), axis=1)
    if not np.any(ok):
        return math.nan, f"all {n_test} test queries failed", timings, weight
    message = f"{batch.n_failed} test queries failed" if batch.n_failed else None
    return _rmse(batch.values[ok], test.truth[ok]), message, timings, weight


def run_klein(
    n_points: int,
    snrdb: float,
    sigma_r: float,
    m: int,
    trials: int = 20,
    seed: int = 0,
    *,
    n_test: int = 500,
    cfg: Optional[ApproxConfig] = None,
    max_concurrency: int = 1,
) -> BenchReport:
    """RMSE against the clean target on an independent test set, per trial.

    Trial ``t`` draws its training set with seed ``seed + t``. Auto ``k``/``h``
    are resolved per training set and listed in ``config["weights"]``.
    """

    cfg = replace(cfg or ApproxConfig(), d=2, m=int(m))
    seeds = [int(seed) + t for t in range(int(trials))]
    outcomes = run_parallel(
        [lambda s=s: _run_trial(n_points, snrdb, sigma_r, n_test, s, cfg) for s in seeds],
        limit=max_concurrency,
    )

    errors: List[float] = []
    failures: Dict[int, str] = {}
    timings: Dict[str, float] = {}
    weights: List[Dict[str, Any]] = []
    for trial, (error, message, phase, weight) in enumerate(outcomes):
        errors.append(error)
        weights.append(weight)
        if message and not math.isfinite(error):
            failures[trial] = message
        elif message:
            logger.warning("klein trial %d: %s", trial, message)
        for key, seconds in phase.items():
            timings[key] = timings.get(key, 0.0) + seconds

    report = BenchReport(
        name=f"klein_n{n_points}_snr{snrdb:g}_sr{sigma_r:g}_m{m}",
        errors=errors,
        seeds=seeds,
        metric="rmse",
        config={
            "n_points": n_points,
            "snrdb": snrdb,
            "sigma_r": sigma_r,
            "m": m,
            "trials": trials,
            "n_test": n_test,
            "seed": seed,
            "approx": cfg.model_dump(),
            "weights": weights,
        },
        phase_seconds=timings,
        failures=failures,
        reference=reference_error(n_points, snrdb, sigma_r, m),
    )
    logger.info("%s: %s", report.name, report.summary()["display"])
    return report


@dataclass(slots=True)
class KleinGridReport(Report):
    """One row per benchmark configuration."""

    runs: List[BenchReport] = field(default_factory=list)
    config: Dict[str, Any] = field(default_factory=dict)
    name: str = "klein_bench"

    def rows(self) -> pd.DataFrame:
        records = []
        for run in self.runs:
            ref = run.reference
            records.append(
                {
                    "n_points": run.config["n_points"],
                    "snrdb": run.config["snrdb"],
                    "sigma_r": run.config["sigma_r"],
                    "m": run.config["m"],
                    "trials": run.n_trials,
                    "n_failed": len(run.failures),
                    "mean": run.mean,
                    "std": run.std,
                    "reference_mean": ref[0] if ref else math.nan,
                    "reference_std": ref[1] if ref else math.nan,
                    "within_band": run.within_reference_band(),
                }
            )
        return pd.DataFrame(records)

    def summary(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "configurations": [
                {
                    "name": run.name,
                    "mean": finite_or_none(run.mean),
                    "std": finite_or_none(run.std),
                    "reference": run.summary()["reference"],
                    "within_reference_band": run.within_reference_band(),
                    "seeds": run.seeds,
                }
                for run in self.runs
            ],
            "config": self.config,
        }

    def tables(self) -> Dict[str, pd.DataFrame]:
        trials = []
        for run in self.runs:
            frame = run.tables()["trials"]
            frame.insert(0, "configuration", run.name)
            trials.append(frame)
        return {
            "grid": self.rows(),
            "trials": pd.concat(trials, ignore_index=True) if trials else pd.DataFrame(),
        }

    def timings(self) -> Dict[str, float]:
        return {f"{run.name}.{phase}": seconds for run in self.runs for phase, seconds in run.timings().items()}


def run_klein_grid(
    n_list: Sequence[int],
    snrdb_list: Sequence[float],
    sigma_r_list: Sequence[float],
    m_list: Sequence[int],
    trials: int = 20,
    seed: int = 0,
    *,
    n_test: int = 500,
    cfg: Optional[ApproxConfig] = None,
    max_concurrency: int = 1,
) -> KleinGridReport:
    """Every combination of the four parameter lists, each with the same seeds."""

    report = KleinGridReport(
        config={
            "n_points": list(n_list),
            "snrdb": list(snrdb_list),
            "sigma_r": list(sigma_r_list),
            "m": list(m_list),
            "trials": trials,
            "n_test": n_test,
            "seed": seed,
        }
    )
    for sigma_r, n_points, snrdb, m in itertools.product(sigma_r_list, n_list, snrdb_list, m_list):
        report.runs.append(
            run_klein(
                int(n_points),
                float(snrdb),
                float(sigma_r),
                int(m),
                trials,
                seed,
                n_test=n_test,
                cfg=cfg,
                max_concurrency=max_concurrency,
            )
        )
    return report


__all__ = ["KleinGridReport", "TEST_SEED_OFFSET", "run_klein", "run_klein_grid"]

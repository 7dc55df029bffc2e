"""Empirical approximation order on sphere grids.

For clean data the error should behave like ``M * h**(m + 1)``, so for two
resolutions ``log(err_i / err_j) ~ (m + 1) * log(h_i / h_j)``. The slope is
fitted by least squares (through the origin) over every unordered pair of
resolutions, once with the proxy ``h = 1/sqrt(N)`` and once with the
measured ``h_est``.

Unless the configuration fixes them, each grid ``g x g`` runs with ``h = pi / g``
and ``k = max(4, m + 3)``.
"""

from __future__ import annotations

import itertools
import logging
import math
import time
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
from scipy import stats

from ..approximator import ApproxConfig, approximate_batch
from ..datasets.sphere import angular_error, gen_sphere_grid, sphere_patch_queries
from ..errors import ConfigurationError
from ..frame import AffineFrame
from ..kernel import WeightSpec, weight_eval
from ..samples import SampleSet
from ..utils import finite_or_none, run_parallel
from .base import Report

logger = logging.getLogger(__name__)

DEFAULT_RESOLUTIONS = (20, 30, 40, 50)
CONFIDENCE = 0.95
GRID_MIN_K = 4.0


@dataclass(frozen=True, slots=True)
class SlopeFit:
    slope: float
    ci_low: float
    ci_high: float
    n_points: int

    def model_dump(self) -> Dict[str, Any]:
        return {
            "slope": finite_or_none(self.slope),
            "ci_low": finite_or_none(self.ci_low),
            "ci_high": finite_or_none(self.ci_high),
            "n_points": self.n_points,
        }


def fit_slope(x: Sequence[float], y: Sequence[float], confidence: float = CONFIDENCE) -> SlopeFit:
    """Least-squares slope of ``y = s * x`` with a Student-t confidence interval."""

    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    keep = np.isfinite(x) & np.isfinite(y)
    x, y = x[keep], y[keep]
    if x.size == 0 or not np.any(x != 0):
        return SlopeFit(math.nan, math.nan, math.nan, int(x.size))
    sxx = float(x @ x)
    slope = float(x @ y) / sxx
    if x.size < 2:
        return SlopeFit(slope, math.nan, math.nan, 1)
    resid = y - slope * x
    se = math.sqrt(float(resid @ resid) / (x.size - 1) / sxx)
    half = float(stats.t.ppf(0.5 + confidence / 2, x.size - 1)) * se
    return SlopeFit(slope, slope - half, slope + half, int(x.size))


@dataclass(slots=True)
class ResolutionResult:
    grid_size: int
    n_samples: int
    h_est: float
    max_error: float
    mean_error: float
    mean_frame_residual: float
    n_failed: int
    seconds: float
    k: float = math.nan
    h: float = math.nan

    @property
    def h_proxy(self) -> float:
        return 1.0 / math.sqrt(self.n_samples)

    @property
    def usable(self) -> bool:
        return math.isfinite(self.max_error) and self.max_error > 0


@dataclass(slots=True)
class ConvergenceReport(Report):
    m: int
    seed: int
    n_queries: int
    resolutions: List[ResolutionResult]
    config: Dict[str, Any] = field(default_factory=dict)
    name: str = "convergence"

    def pairs(self) -> pd.DataFrame:
        rows = []
        usable = [res for res in self.resolutions if res.usable]
        for a, b in itertools.combinations(usable, 2):
            rows.append(
                {
                    "n_i": a.n_samples,
                    "n_j": b.n_samples,
                    "log_h_ratio": math.log(a.h_proxy / b.h_proxy),
                    "log_h_est_ratio": math.log(a.h_est / b.h_est),
                    "log_err_ratio": math.log(a.max_error / b.max_error),
                    "log_residual_ratio": _log_ratio(a.mean_frame_residual, b.mean_frame_residual),
                }
            )
        columns = ["n_i", "n_j", "log_h_ratio", "log_h_est_ratio", "log_err_ratio", "log_residual_ratio"]
        return pd.DataFrame(rows, columns=columns)

    @property
    def slope_fit(self) -> SlopeFit:
        pairs = self.pairs()
        return fit_slope(pairs["log_h_ratio"], pairs["log_err_ratio"])

    @property
    def slope_fit_h_est(self) -> SlopeFit:
        pairs = self.pairs()
        return fit_slope(pairs["log_h_est_ratio"], pairs["log_err_ratio"])

    @property
    def frame_residual_fit(self) -> SlopeFit:
        """Order of the weighted mean distance of the support samples to the frame."""

        pairs = self.pairs()
        return fit_slope(pairs["log_h_ratio"], pairs["log_residual_ratio"])

    @property
    def slope(self) -> float:
        return self.slope_fit.slope

    def summary(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "m": self.m,
            "seed": self.seed,
            "n_queries": self.n_queries,
            "expected_order": self.m + 1,
            "slope": self.slope_fit.model_dump(),
            "slope_h_est": self.slope_fit_h_est.model_dump(),
            "frame_residual_slope": self.frame_residual_fit.model_dump(),
            "weights": {
                str(res.grid_size): {"k": finite_or_none(res.k), "h": finite_or_none(res.h)}
                for res in self.resolutions
            },
            "aborted_resolutions": [res.grid_size for res in self.resolutions if not res.usable],
            "config": self.config,
        }

    def tables(self) -> Dict[str, pd.DataFrame]:
        per_resolution = pd.DataFrame(
            [
                {
                    "grid_size": res.grid_size,
                    "n_samples": res.n_samples,
                    "h_proxy": res.h_proxy,
                    "h_est": res.h_est,
                    "max_error": res.max_error,
                    "mean_error": res.mean_error,
                    "mean_frame_residual": res.mean_frame_residual,
                    "k": res.k,
                    "h": res.h,
                    "n_failed": res.n_failed,
                }
                for res in self.resolutions
            ]
        )
        return {"resolutions": per_resolution, "pairs": self.pairs()}

    def timings(self) -> Dict[str, float]:
        return {f"grid_{res.grid_size}": res.seconds for res in self.resolutions}


def _log_ratio(a: float, b: float) -> float:
    if a > 0 and b > 0 and math.isfinite(a) and math.isfinite(b):
        return math.log(a / b)
    return math.nan


def grid_weight(spec: WeightSpec, grid_size: int, m: int) -> WeightSpec:
    """Fill unset ``k``/``h`` with the grid-matched ``max(4, m + 3)`` and ``pi / g``."""

    return spec.resolved(k=max(GRID_MIN_K, float(m + 3)), h=math.pi / int(grid_size))


def mean_support_residual(frame: AffineFrame, samples: SampleSet, spec: WeightSpec) -> float:
    """Weighted mean distance to ``H`` of the samples in the support of ``q``."""

    idx, dist = samples.neighbors(frame.origin, spec.support_radius)
    if idx.size == 0:
        return math.nan
    weights = weight_eval(dist, spec)
    total = float(weights.sum())
    if not total > 0:
        return math.nan
    return float(weights @ frame.residuals(samples.points[idx])) / total


def _evaluate_resolution(
    grid_size: int, queries: np.ndarray, truth: np.ndarray, cfg: ApproxConfig
) -> ResolutionResult:
    start = time.perf_counter()
    samples = gen_sphere_grid(grid_size)
    cfg = replace(cfg, weight=grid_weight(cfg.weight, grid_size, cfg.m))
    batch = approximate_batch(queries, samples, cfg, keep_frames=True)
    errors = angular_error(batch.values, truth, periodic=(True, False))
    finite = errors[np.isfinite(errors)]
    residuals = np.array(
        [
            mean_support_residual(frame, samples, cfg.weight)
            for i, frame in enumerate(batch.frames or [])
            if frame is not None and i not in batch.failures
        ]
    )
    residuals = residuals[np.isfinite(residuals)]
    if batch.n_failed:
        logger.warning("grid %d: %d of %d queries failed", grid_size, batch.n_failed, len(queries))
    result = ResolutionResult(
        grid_size=grid_size,
        n_samples=samples.n_samples,
        h_est=samples.stats.h_est,
        max_error=float(finite.max()) if finite.size else math.nan,
        mean_error=float(finite.mean()) if finite.size else math.nan,
        mean_frame_residual=float(residuals.mean()) if residuals.size else math.nan,
        n_failed=batch.n_failed,
        seconds=time.perf_counter() - start,
        k=float(cfg.weight.k),
        h=float(cfg.weight.h),
    )
    logger.info(
        "grid %d (N=%d, k=%.3g, h=%.3g): max error %.3e",
        grid_size,
        result.n_samples,
        result.k,
        result.h,
        result.max_error,
    )
    return result


def run_convergence(
    m: int,
    resolutions: Sequence[int] = DEFAULT_RESOLUTIONS,
    seed: int = 0,
    *,
    n_queries: int = 200,
    cfg: Optional[ApproxConfig] = None,
    max_concurrency: int = 1,
) -> ConvergenceReport:
    """Max error of the ``(phi, theta)`` approximation on grids ``g x g`` for each ``g``.

    The same held-out on-sphere queries are used at every resolution.
    """

    grids = [int(g) for g in resolutions]
    if len(grids) < 3:
        raise ConfigurationError(f"convergence needs at least 3 resolutions, got {len(grids)}")
    if n_queries < 1:
        raise ConfigurationError("convergence needs at least one query")
    cfg = replace(cfg or ApproxConfig(), d=2, m=int(m)).with_seed(seed)
    queries, truth = sphere_patch_queries(n_queries, seed)

    results = run_parallel(
        [lambda g=g: _evaluate_resolution(g, queries, truth, cfg) for g in grids],
        limit=max_concurrency,
    )
    return ConvergenceReport(
        m=int(m),
        seed=int(seed),
        n_queries=int(n_queries),
        resolutions=list(results),
        config=cfg.model_dump(),
    )


__all__ = [
    "ConvergenceReport",
    "ResolutionResult",
    "SlopeFit",
    "fit_slope",
    "grid_weight",
    "mean_support_residual",
    "run_convergence",
]

"""Leave-one-out cross-validation."""

from __future__ import annotations

import logging
import math
import time
from typing import Optional, Sequence, Union

import numpy as np

from ..approximator import ApproxConfig, approximate, resolve_config
from ..datasets.sphere import angular_error
from ..errors import MMLSError
from ..samples import SampleSet
from ..utils import run_parallel
from .base import BenchReport

logger = logging.getLogger(__name__)

Periodic = Union[bool, Sequence[bool], None]


def _fold_error(samples: SampleSet, index: int, cfg: ApproxConfig, periodic: Periodic) -> float:
    estimate = approximate(samples.points[index], samples.without(index), cfg.with_seed(cfg.seed + index))
    target = samples.values[index]
    if periodic is None or periodic is False:
        return float(np.linalg.norm(estimate - target))
    flags = [True] * samples.value_dim if periodic is True else list(periodic)
    return float(angular_error(estimate[None, :], target[None, :], periodic=flags)[0])


def run_loo_cv(
    samples: SampleSet,
    cfg: ApproxConfig,
    *,
    periodic: Periodic = None,
    n_folds: Optional[int] = None,
    seed: int = 0,
    max_concurrency: int = 1,
) -> BenchReport:
    """Fit on all samples but one and evaluate at the held-out location.

    Every sample is held out once unless ``n_folds`` asks for a random subset.
    The bandwidth is resolved once on the full set and shared by all folds.
    """

    if samples.n_samples < 2:
        raise ValueError("leave-one-out needs at least two samples")
    cfg = resolve_config(samples, cfg.with_seed(seed))
    indices = np.arange(samples.n_samples)
    if n_folds is not None and n_folds < samples.n_samples:
        indices = np.sort(np.random.default_rng(seed).choice(samples.n_samples, size=int(n_folds), replace=False))

    def fold(index: int):
        try:
            return _fold_error(samples, index, cfg, periodic), None
        except MMLSError as exc:
            logger.warning("fold %d failed: %s", index, exc)
            return math.nan, f"{type(exc).__name__}: {exc}"

    start = time.perf_counter()
    outcomes = run_parallel([lambda i=int(i): fold(i) for i in indices], limit=max_concurrency)
    elapsed = time.perf_counter() - start

    return BenchReport(
        name="loo_cv",
        errors=[error for error, _ in outcomes],
        seeds=[int(seed) + int(i) for i in indices],
        metric="angular" if periodic else "euclidean",
        config={
            "n_samples": samples.n_samples,
            "ambient_dim": samples.ambient_dim,
            "held_out": [int(i) for i in indices],
            "periodic": periodic if isinstance(periodic, (bool, type(None))) else list(periodic),
            "seed": seed,
            "approx": cfg.model_dump(),
        },
        phase_seconds={"folds": elapsed},
        failures={trial: message for trial, (_, message) in enumerate(outcomes) if message},
    )


__all__ = ["run_loo_cv"]

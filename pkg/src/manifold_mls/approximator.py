"""Function approximation over a sampled manifold.

For a query ``r`` the approximation is ``psi~(r) = p_r(0)`` where ``p_r`` is a
weighted least-squares polynomial over the local frame of ``r``:

1. find the frame ``(q, U)`` of ``r`` (:func:`manifold_mls.frame.find_local_frame`);
2. map the samples in the support of ``q`` to chart coordinates
   ``x_i = U^T (r_i - q)``;
3. fit a degree-``m`` polynomial to ``(x_i, psi_i)`` with weights
   ``theta(||r_i - q||)`` (ambient distances, never chart distances);
4. return its constant coefficients.

Projecting a point onto the approximating manifold is the same procedure with
the ambient coordinates ``r_i`` as targets.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional

import numpy as np
from tqdm.auto import tqdm

from .errors import ENLARGEABLE, ConfigurationError, MMLSError
from .frame import AffineFrame, FrameSearchConfig, find_local_frame, project_to_frame
from .kernel import WeightFamily, WeightSpec, inverse_weight_eval, weight_eval
from .polybasis import DEFAULT_RCOND, WlsProblem, kkt_coeffs, n_monomials, wls_fit
from .samples import SampleSet

logger = logging.getLogger(__name__)

# Queries closer than this fraction of h to a sample are exact hits in
# interpolatory mode.
EXACT_HIT = 1e-12
MAX_ANCHORS = 64
# The truncated-exp weight stays above 1/e only inside half its support, so the
# auto radius puts the target_support-th neighbour at that half.
SUPPORT_REACH = 2.0


@dataclass(frozen=True, slots=True)
class ApproxConfig:
    """Parameters of the two-stage approximation."""

    d: int = 2
    m: int = 1
    weight: WeightSpec = field(default_factory=WeightSpec)
    frame_cfg: FrameSearchConfig = field(default_factory=FrameSearchConfig)
    interpolatory: bool = False
    support_factor: float = 3.0
    rcond: float = DEFAULT_RCOND
    max_enlargements: int = 5
    enlargement_factor: float = 1.5
    adaptive_support: bool = False

    def __post_init__(self) -> None:
        if int(self.d) < 1:
            raise ConfigurationError(f"d must be >= 1, got {self.d}")
        if int(self.m) < 0:
            raise ConfigurationError(f"m must be >= 0, got {self.m}")
        if not self.support_factor >= 1:
            raise ConfigurationError(f"support_factor must be >= 1, got {self.support_factor}")
        if not self.enlargement_factor > 1:
            raise ConfigurationError(f"enlargement_factor must be > 1, got {self.enlargement_factor}")

    @property
    def n_basis(self) -> int:
        return n_monomials(self.d, self.m)

    @property
    def target_support(self) -> int:
        """Desired number of samples inside the support radius."""

        return int(math.ceil(self.support_factor * max(self.n_basis, self.d + 1)))

    @property
    def is_interpolatory(self) -> bool:
        return self.interpolatory or self.weight.family is WeightFamily.INTERPOLATORY

    @property
    def seed(self) -> int:
        return self.frame_cfg.seed

    def with_seed(self, seed: int) -> "ApproxConfig":
        return replace(self, frame_cfg=replace(self.frame_cfg, seed=int(seed)))

    def model_dump(self) -> Dict[str, Any]:
        return {
            "d": self.d,
            "m": self.m,
            "weight": self.weight.model_dump(),
            "frame": self.frame_cfg.model_dump(),
            "interpolatory": self.interpolatory,
            "support_factor": self.support_factor,
            "rcond": self.rcond,
            "adaptive_support": self.adaptive_support,
        }


@dataclass(frozen=True, slots=True)
class LocalFit:
    """Result of one local evaluation, kept for diagnostics."""

    value: np.ndarray
    frame: Optional[AffineFrame]
    weight: WeightSpec
    support_count: int
    exact_hit: bool = False


@dataclass(slots=True)
class BatchResult:
    """Row ``i`` of ``values`` is NaN when query ``i`` failed; see ``failures``."""

    values: np.ndarray
    failures: Dict[int, MMLSError] = field(default_factory=dict)
    frames: Optional[List[Optional[AffineFrame]]] = None

    @property
    def status(self) -> List[str]:
        return ["ok" if i not in self.failures else type(self.failures[i]).__name__ for i in range(len(self.values))]

    @property
    def n_failed(self) -> int:
        return len(self.failures)


# ----------------------------------------------------------------------
def resolve_config(samples: SampleSet, cfg: ApproxConfig) -> ApproxConfig:
    """Fill in an "auto" bandwidth and support multiplier from the data.

    ``h`` defaults to the estimated fill distance. ``k`` is chosen so that
    about ``cfg.target_support`` samples around a typical sample lie within
    ``k * h / SUPPORT_REACH`` (median over up to 64 anchor samples), where they
    carry significant weight.
    """

    spec = cfg.weight
    if spec.is_resolved:
        return cfg

    h = spec.h if spec.h is not None else samples.stats.h_est
    k = spec.k
    if k is None:
        anchors = np.unique(np.linspace(0, samples.n_samples - 1, min(MAX_ANCHORS, samples.n_samples)).astype(int))
        radii = [samples.kth_neighbor_distance(samples.points[i], cfg.target_support) for i in anchors]
        radius = SUPPORT_REACH * float(np.median(radii))
        if not radius > 0:
            raise ConfigurationError("cannot size the support automatically: samples are degenerate")
        k = radius / h
    resolved = spec.resolved(k=k, h=h)
    logger.debug("resolved weight: k=%.4g h=%.4g radius=%.4g", resolved.k, resolved.h, resolved.support_radius)
    return replace(cfg, weight=resolved, adaptive_support=True)


def _frame_weight(spec: WeightSpec) -> WeightSpec:
    # The frame search always runs with a smooth, finite weight.
    if spec.family is WeightFamily.INTERPOLATORY:
        return replace(spec, family=WeightFamily.TRUNCATED_EXP)
    return spec


def _fit_once(r: np.ndarray, samples: SampleSet, cfg: ApproxConfig, spec: WeightSpec, project: bool) -> LocalFit:
    frame = find_local_frame(r, samples, _frame_weight(spec), cfg.d, cfg.frame_cfg)
    idx, dist = samples.neighbors(frame.origin, spec.support_radius)
    points = samples.points[idx]
    X = project_to_frame(points, frame)
    targets = points - frame.origin if project else samples.values[idx]

    if cfg.is_interpolatory:
        coeffs = kkt_coeffs(X, inverse_weight_eval(dist, spec), cfg.m, rcond=cfg.rcond)
        value = coeffs @ targets
    else:
        weights = weight_eval(dist, spec)
        value = wls_fit(WlsProblem(X, targets, weights), cfg.m, rcond=cfg.rcond).value_at_origin()
    if project:
        value = frame.origin + value
    return LocalFit(value=np.asarray(value, dtype=float), frame=frame, weight=spec, support_count=int(idx.size))


def local_fit(r: np.ndarray, samples: SampleSet, cfg: ApproxConfig, *, project: bool = False) -> LocalFit:
    """Evaluate the approximation (or the projection) at ``r`` with diagnostics."""

    cfg = resolve_config(samples, cfg)
    r = np.asarray(r, dtype=float).ravel()
    if r.shape[0] != samples.ambient_dim:
        raise ConfigurationError(f"query has dimension {r.shape[0]}, samples live in dimension {samples.ambient_dim}")

    spec = cfg.weight
    if cfg.is_interpolatory:
        index, distance = samples.nearest(r)
        if distance <= EXACT_HIT * spec.h:
            hit = samples.points[index] if project else samples.values[index]
            return LocalFit(value=np.array(hit), frame=None, weight=spec, support_count=1, exact_hit=True)

    attempts = cfg.max_enlargements if cfg.adaptive_support else 0
    for attempt in range(attempts + 1):
        try:
            return _fit_once(r, samples, cfg, spec, project)
        except ENLARGEABLE as exc:
            if attempt == attempts:
                raise
            spec = spec.scaled_support(cfg.enlargement_factor)
            logger.warning(
                "%s at query; enlarging support radius to %.4g (attempt %d/%d)",
                type(exc).__name__,
                spec.support_radius,
                attempt + 1,
                attempts,
            )
    raise AssertionError("unreachable")  # pragma: no cover


def approximate(r: np.ndarray, samples: SampleSet, cfg: ApproxConfig) -> np.ndarray:
    """``psi~(r)``: the ñ-vector approximation at query ``r``."""

    return local_fit(r, samples, cfg).value


def project_point(r: np.ndarray, samples: SampleSet, cfg: ApproxConfig) -> np.ndarray:
    """Project ``r`` onto the approximating manifold."""

    return local_fit(r, samples, cfg, project=True).value


def _run_batch(
    queries: np.ndarray,
    samples: SampleSet,
    cfg: ApproxConfig,
    *,
    project: bool,
    keep_frames: bool,
    progress: bool,
) -> BatchResult:
    queries = np.asarray(queries, dtype=float)
    if queries.ndim == 1:
        queries = queries.reshape(-1, samples.ambient_dim) if queries.size else np.empty((0, samples.ambient_dim))
    if queries.shape[1] != samples.ambient_dim:
        raise ConfigurationError(
            f"queries have dimension {queries.shape[1]}, samples live in dimension {samples.ambient_dim}"
        )

    width = samples.ambient_dim if project else samples.value_dim
    result = BatchResult(
        values=np.full((queries.shape[0], width), np.nan),
        frames=[] if keep_frames else None,
    )
    if queries.shape[0] == 0:
        return result

    cfg = resolve_config(samples, cfg)
    base_seed = cfg.seed
    rows = tqdm(range(queries.shape[0]), desc="project" if project else "approximate", disable=not progress, leave=False)
    for i in rows:
        frame: Optional[AffineFrame] = None
        try:
            fit = local_fit(queries[i], samples, cfg.with_seed(base_seed + i), project=project)
            result.values[i] = fit.value
            frame = fit.frame
        except MMLSError as exc:
            logger.warning("query %d failed: %s", i, exc)
            result.failures[i] = exc
            frame = getattr(exc, "frame", None)
        if result.frames is not None:
            result.frames.append(frame)
    return result


def approximate_batch(
    queries: np.ndarray,
    samples: SampleSet,
    cfg: ApproxConfig,
    *,
    keep_frames: bool = False,
    progress: bool = False,
) -> BatchResult:
    """Evaluate every query row; query ``i`` uses frame seed ``cfg.seed + i``.

    Failures are recorded per query and never abort the batch.
    """

    return _run_batch(queries, samples, cfg, project=False, keep_frames=keep_frames, progress=progress)


def project_batch(
    queries: np.ndarray,
    samples: SampleSet,
    cfg: ApproxConfig,
    *,
    keep_frames: bool = False,
    progress: bool = False,
) -> BatchResult:
    """Row-wise :func:`project_point` with the same seeding as :func:`approximate_batch`."""

    return _run_batch(queries, samples, cfg, project=True, keep_frames=keep_frames, progress=progress)


__all__ = [
    "ApproxConfig",
    "BatchResult",
    "LocalFit",
    "SampleSet",
    "approximate",
    "approximate_batch",
    "local_fit",
    "project_batch",
    "project_point",
    "resolve_config",
]

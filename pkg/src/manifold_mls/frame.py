"""Local affine coordinate systems ``(q(r), H(r))``.

The frame of a query ``r`` minimizes the weighted squared distance of the
samples to a ``d``-dimensional affine space ``H = q + span(U)`` under the
constraint ``r - q`` orthogonal to ``H``. It is found by a fixed-point
iteration: project the samples onto the current frame, fit a weighted
vector-valued linear map from the chart back to the ambient space, take its
value at the chart origin as a temporary origin and its orthonormalized
gradient as the new basis, then project ``r`` onto the new affine space.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple

import numpy as np
import scipy.linalg

from .errors import ConfigurationError, NoSamplesInSupport, NotConverged, RankDeficient, SearchRadiusExceeded
from .kernel import WeightSpec, weight_eval
from .polybasis import DEFAULT_RCOND, WlsProblem, wls_fit
from .samples import SampleSet

logger = logging.getLogger(__name__)


class InitMode(str, enum.Enum):
    RANDOM = "random"
    PCA = "pca"

    @classmethod
    def parse(cls, value: Any) -> "InitMode":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError as exc:
            raise ConfigurationError(f"unknown init mode {value!r} (expected 'random' or 'pca')") from exc


@dataclass(frozen=True, slots=True)
class FrameSearchConfig:
    """Iteration controls. ``tol_q`` is a fraction of the bandwidth ``h``."""

    init_mode: InitMode = InitMode.RANDOM
    seed: int = 0
    tol_q: float = 1e-10
    max_iter: int = 100
    mu: float = math.inf
    rcond: float = DEFAULT_RCOND

    def __post_init__(self) -> None:
        object.__setattr__(self, "init_mode", InitMode.parse(self.init_mode))
        if not self.tol_q > 0:
            raise ConfigurationError(f"tol_q must be positive, got {self.tol_q!r}")
        if int(self.max_iter) < 1:
            raise ConfigurationError(f"max_iter must be >= 1, got {self.max_iter!r}")
        if not self.mu > 0:
            raise ConfigurationError(f"search radius mu must be positive, got {self.mu!r}")

    def model_dump(self) -> Dict[str, Any]:
        return {
            "init_mode": self.init_mode.value,
            "seed": self.seed,
            "tol_q": self.tol_q,
            "max_iter": self.max_iter,
            "mu": self.mu,
            "rcond": self.rcond,
        }


@dataclass(frozen=True, slots=True)
class AffineFrame:
    """Origin ``q`` and an ``n x d`` basis ``U`` with orthonormal columns.

    ``trace`` holds the per-iteration steps ``||q_j - q_{j-1}||`` of the
    search that produced the frame (empty for hand-built frames).
    """

    origin: np.ndarray
    basis: np.ndarray
    trace: Tuple[float, ...] = field(default=())
    support_count: int = 0
    converged: bool = True

    def __post_init__(self) -> None:
        origin = np.asarray(self.origin, dtype=float).ravel()
        basis = np.asarray(self.basis, dtype=float)
        if basis.ndim == 1:
            basis = basis[:, None]
        if basis.shape[0] != origin.shape[0]:
            raise ValueError(f"basis has {basis.shape[0]} rows, origin has {origin.shape[0]} entries")
        gram = basis.T @ basis
        if not np.allclose(gram, np.eye(basis.shape[1]), atol=1e-10):
            raise ValueError("frame basis columns are not orthonormal")
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "trace", tuple(float(s) for s in self.trace))

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def iterations(self) -> int:
        return len(self.trace)

    def residuals(self, points: np.ndarray) -> np.ndarray:
        """Euclidean distances of ``points`` to the affine space."""

        local = np.atleast_2d(points) - self.origin
        return np.linalg.norm(local - (local @ self.basis) @ self.basis.T, axis=1)

    def to_record(self) -> Dict[str, Any]:
        record: Dict[str, Any] = {
            "iterations": self.iterations,
            "support_count": self.support_count,
            "converged": self.converged,
            "final_step": self.trace[-1] if self.trace else float("nan"),
        }
        record.update({f"q{i + 1}": v for i, v in enumerate(self.origin)})
        for k in range(self.dim):
            record.update({f"u{k + 1}_{i + 1}": v for i, v in enumerate(self.basis[:, k])})
        record["trace"] = ";".join(f"{step:.17g}" for step in self.trace)
        return record


# ----------------------------------------------------------------------
def orthonormalize(vectors: np.ndarray, *, rcond: float = DEFAULT_RCOND) -> np.ndarray:
    """Modified Gram-Schmidt with one reorthogonalization pass.

    Each output column has its largest-magnitude entry made positive.
    Raises :class:`RankDeficient` when a column collapses.
    """

    Q = np.array(vectors, dtype=float, copy=True)
    if Q.ndim == 1:
        Q = Q[:, None]
    n_cols = Q.shape[1]
    scale = float(np.max(np.linalg.norm(Q, axis=0))) if Q.size else 0.0
    if scale == 0:
        raise RankDeficient(rank=0, required=n_cols, rcond_estimate=0.0)

    for j in range(n_cols):
        v = Q[:, j]
        for _ in range(2):
            for i in range(j):
                v -= (Q[:, i] @ v) * Q[:, i]
        norm = float(np.linalg.norm(v))
        if norm <= rcond * scale:
            raise RankDeficient(rank=j, required=n_cols, rcond_estimate=norm / scale)
        Q[:, j] = v / norm

    for j in range(n_cols):
        if Q[np.argmax(np.abs(Q[:, j])), j] < 0:
            Q[:, j] = -Q[:, j]
    return Q


def principal_angles(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Principal angles (radians, descending) between ``span(A)`` and ``span(B)``."""

    return scipy.linalg.subspace_angles(np.atleast_2d(A), np.atleast_2d(B))


def project_to_frame(points: np.ndarray, frame: AffineFrame) -> np.ndarray:
    """Chart coordinates ``U^T (r_i - q)``; the origin maps to 0."""

    pts = np.asarray(points, dtype=float)
    single = pts.ndim == 1
    coords = (np.atleast_2d(pts) - frame.origin) @ frame.basis
    return coords[0] if single else coords


def frame_cost(r: np.ndarray, frame: AffineFrame, samples: SampleSet, weight: WeightSpec) -> float:
    """``sum_i dist(r_i, H)**2 * theta(||r_i - q||)`` over the support of ``q``.

    ``r`` identifies the query the frame belongs to; the cost itself only
    depends on the frame.
    """

    if np.asarray(r).shape != frame.origin.shape:
        raise ValueError("query and frame origin have different dimensions")
    idx, dist = samples.neighbors(frame.origin, weight.support_radius)
    if idx.size == 0:
        return 0.0
    resid = frame.residuals(samples.points[idx])
    return float(np.sum(resid**2 * weight_eval(dist, weight)))


def _initial_basis(
    cfg: FrameSearchConfig, local: np.ndarray, weights: np.ndarray, d: int
) -> np.ndarray:
    n = local.shape[1]
    if cfg.init_mode is InitMode.PCA:
        w = weights / weights.sum()
        centered = local - w @ local
        _, _, vt = np.linalg.svd(np.sqrt(w)[:, None] * centered, full_matrices=False)
        vectors = vt[:d].T
        if vectors.shape[1] < d:
            raise RankDeficient(rank=vectors.shape[1], required=d, rcond_estimate=0.0)
        return orthonormalize(vectors, rcond=cfg.rcond)
    rng = np.random.default_rng(cfg.seed)
    return orthonormalize(rng.standard_normal((n, d)), rcond=cfg.rcond)


def find_local_frame(
    r: np.ndarray,
    samples: SampleSet,
    weight: WeightSpec,
    d: int,
    cfg: Optional[FrameSearchConfig] = None,
) -> AffineFrame:
    """Search the local frame ``(q(r), U(r))`` of query ``r``."""

    cfg = cfg or FrameSearchConfig()
    weight.require_resolved()
    r = np.asarray(r, dtype=float).ravel()
    n = samples.ambient_dim
    if r.shape[0] != n:
        raise ConfigurationError(f"query has dimension {r.shape[0]}, samples live in dimension {n}")
    if not 1 <= d < n:
        raise ConfigurationError(f"intrinsic dimension must satisfy 1 <= d < n={n}, got {d}")

    radius = weight.support_radius
    tolerance = cfg.tol_q * weight.h
    required = d + 1

    def support(center: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        idx, dist = samples.neighbors(center, radius)
        w = weight_eval(dist, weight) if idx.size else np.empty(0)
        keep = w > 0
        if int(keep.sum()) < required:
            raise NoSamplesInSupport(required=required, available=int(keep.sum()), radius=radius)
        return idx[keep], w[keep]

    q = r.copy()
    idx, w = support(q)
    basis = _initial_basis(cfg, samples.points[idx] - q, w, d)

    steps = []
    converged = False
    for iteration in range(1, int(cfg.max_iter) + 1):
        if iteration > 1:
            idx, w = support(q)
        local = samples.points[idx] - q
        linear = wls_fit(WlsProblem(local @ basis, local, w), 1, rcond=cfg.rcond)
        q_tilde = q + linear.coeffs[0]
        basis = orthonormalize(linear.coeffs[1:].T, rcond=cfg.rcond)
        q_next = q_tilde + basis @ (basis.T @ (r - q_tilde))
        step = float(np.linalg.norm(q_next - q))
        steps.append(step)
        q = q_next
        logger.debug("frame iteration %d: step=%.3e support=%d", iteration, step, idx.size)
        if step < tolerance:
            converged = True
            break

    frame = AffineFrame(origin=q, basis=basis, trace=tuple(steps), support_count=int(idx.size), converged=converged)
    if not converged:
        logger.warning("frame search stopped after %d iterations (last step %.3e)", len(steps), steps[-1])
        raise NotConverged(iterations=len(steps), last_step=steps[-1], frame=frame)
    distance = float(np.linalg.norm(r - q))
    if distance > cfg.mu:
        raise SearchRadiusExceeded(distance=distance, mu=cfg.mu, frame=frame)
    return frame


__all__ = [
    "AffineFrame",
    "FrameSearchConfig",
    "InitMode",
    "find_local_frame",
    "frame_cost",
    "orthonormalize",
    "principal_angles",
    "project_to_frame",
]

"""Immutable sample container with a neighbourhood index."""

from __future__ import annotations

from typing import Optional, Tuple

import numpy as np
from scipy.spatial import cKDTree
from sklearn.neighbors import NearestNeighbors

from .datasets.sampling import KDTREE_MAX_DIM, SamplingStats, estimate_fill_distance


class SampleSet:
    """Ambient points ``r_i`` (N x n) paired with target values ``psi_i`` (N x ñ).

    ``truth`` (clean target values) and ``params`` (intrinsic parameters) are
    optional reference data attached by the dataset generators.
    """

    __slots__ = ("_points", "_values", "_truth", "_params", "_tree", "_brute", "_stats")

    def __init__(
        self,
        points: np.ndarray,
        values: np.ndarray,
        *,
        truth: Optional[np.ndarray] = None,
        params: Optional[np.ndarray] = None,
    ) -> None:
        points = np.array(points, dtype=float, copy=True)
        values = np.array(values, dtype=float, copy=True)
        if points.ndim == 1:
            points = points[:, None]
        if values.ndim == 1:
            values = values[:, None]
        if points.ndim != 2 or values.ndim != 2:
            raise ValueError("points and values must be 2-D arrays")
        if points.shape[0] < 1:
            raise ValueError("a sample set needs at least one point")
        if points.shape[0] != values.shape[0]:
            raise ValueError(f"points ({points.shape[0]}) and values ({values.shape[0]}) are not row-aligned")
        if not (np.all(np.isfinite(points)) and np.all(np.isfinite(values))):
            raise ValueError("sample points and values must be finite")

        self._points = _frozen(points)
        self._values = _frozen(values)
        self._truth = None if truth is None else _frozen(np.array(truth, dtype=float).reshape(values.shape))
        self._params = None if params is None else _frozen(np.array(params, dtype=float).reshape(points.shape[0], -1))
        self._tree: Optional[cKDTree] = None
        self._brute: Optional[NearestNeighbors] = None
        if points.shape[1] <= KDTREE_MAX_DIM:
            self._tree = cKDTree(points)
        else:
            self._brute = NearestNeighbors(algorithm="brute").fit(points)
        self._stats: Optional[SamplingStats] = None

    # ------------------------------------------------------------------
    @property
    def points(self) -> np.ndarray:
        return self._points

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def truth(self) -> Optional[np.ndarray]:
        return self._truth

    @property
    def params(self) -> Optional[np.ndarray]:
        return self._params

    @property
    def n_samples(self) -> int:
        return self._points.shape[0]

    @property
    def ambient_dim(self) -> int:
        return self._points.shape[1]

    @property
    def value_dim(self) -> int:
        return self._values.shape[1]

    @property
    def has_index(self) -> bool:
        return self._tree is not None

    def __len__(self) -> int:
        return self.n_samples

    def __repr__(self) -> str:  # pragma: no cover - repr is trivial
        return f"SampleSet(N={self.n_samples}, n={self.ambient_dim}, value_dim={self.value_dim})"

    @property
    def stats(self) -> SamplingStats:
        """Fill-distance statistics, computed on first use."""

        if self._stats is None:
            self._stats = estimate_fill_distance(self._points)
        return self._stats

    # ------------------------------------------------------------------
    def neighbors(self, center: np.ndarray, radius: float) -> Tuple[np.ndarray, np.ndarray]:
        """Indices (ascending) and exact distances of samples with ``||r_i - center|| < radius``."""

        center = np.asarray(center, dtype=float)
        if self._tree is not None:
            idx = np.asarray(self._tree.query_ball_point(center, radius), dtype=int)
            idx.sort()
        else:
            # Brute-force distances lose accuracy to cancellation; query with a
            # margin and settle membership with exact distances below.
            slack = 1e-7 * (radius + float(np.linalg.norm(center)))
            idx = self._brute.radius_neighbors(center[None, :], radius=radius + slack, return_distance=False)[0]
            idx = np.sort(np.asarray(idx, dtype=int))
        if idx.size == 0:
            return idx, np.empty(0)
        dist = np.linalg.norm(self._points[idx] - center, axis=1)
        keep = dist < radius
        return idx[keep], dist[keep]

    def kth_neighbor_distance(self, center: np.ndarray, k: int) -> float:
        """Distance from ``center`` to its ``k``-th nearest sample (1-based)."""

        k = min(max(int(k), 1), self.n_samples)
        center = np.asarray(center, dtype=float)
        if self._tree is not None:
            dist, _ = self._tree.query(center, k=[k])
            return float(dist[0])
        order = self._brute.kneighbors(center[None, :], n_neighbors=k, return_distance=False)[0]
        exact = np.linalg.norm(self._points[order] - center, axis=1)
        return float(np.max(exact))

    def nearest(self, center: np.ndarray) -> Tuple[int, float]:
        """Index and distance of the nearest sample."""

        center = np.asarray(center, dtype=float)
        if self._tree is not None:
            dist, idx = self._tree.query(center, k=1)
            return int(idx), float(dist)
        candidates = self._brute.kneighbors(
            center[None, :], n_neighbors=min(8, self.n_samples), return_distance=False
        )[0]
        exact = np.linalg.norm(self._points[candidates] - center, axis=1)
        best = int(np.argmin(exact))
        return int(candidates[best]), float(exact[best])

    def without(self, index: int) -> "SampleSet":
        """Copy with sample ``index`` removed (leave-one-out folds)."""

        keep = np.ones(self.n_samples, dtype=bool)
        keep[index] = False
        return self.subset(keep)

    def subset(self, selector: np.ndarray) -> "SampleSet":
        return SampleSet(
            self._points[selector],
            self._values[selector],
            truth=None if self._truth is None else self._truth[selector],
            params=None if self._params is None else self._params[selector],
        )

    def with_values(self, values: np.ndarray) -> "SampleSet":
        """Same points, different targets; reuses nothing mutable."""

        return SampleSet(self._points, values, params=self._params)


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


__all__ = ["KDTREE_MAX_DIM", "SampleSet"]

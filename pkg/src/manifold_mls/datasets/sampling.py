"""Fill-distance estimation for point clouds."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree
from sklearn.neighbors import NearestNeighbors

# Above this ambient dimension a k-d tree no longer pays off; neighbourhoods
# come from a brute-force scan instead.
KDTREE_MAX_DIM = 16


@dataclass(frozen=True, slots=True)
class SamplingStats:
    """Sampling density summary.

    ``h_est`` is the largest nearest-other-sample distance. It is a
    sample-to-sample proxy for the fill distance, which would need the
    unknown manifold itself.
    """

    h_est: float
    knn_mean: float
    n_samples: int

    def model_dump(self) -> dict:
        return {"h_est": self.h_est, "knn_mean": self.knn_mean, "n_samples": self.n_samples}


def nearest_other_distances(points: np.ndarray) -> np.ndarray:
    """Distance from every sample to its nearest other sample."""

    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points[:, None]
    n_points = points.shape[0]
    if n_points < 2:
        raise ValueError("at least two samples are needed to estimate the fill distance")

    if points.shape[1] <= KDTREE_MAX_DIM:
        dist, _ = cKDTree(points).query(points, k=2)
        return dist[:, 1]

    # Without query points sklearn leaves each sample out of its own neighbours.
    _, idx = NearestNeighbors(n_neighbors=1, algorithm="brute").fit(points).kneighbors()
    return np.linalg.norm(points[idx[:, 0]] - points, axis=1)


def estimate_fill_distance(points: np.ndarray) -> SamplingStats:
    """Estimate the fill distance ``h`` of a sample set."""

    nearest = nearest_other_distances(points)
    return SamplingStats(
        h_est=float(np.max(nearest)),
        knn_mean=float(np.mean(nearest)),
        n_samples=int(nearest.shape[0]),
    )


__all__ = ["SamplingStats", "estimate_fill_distance", "nearest_other_distances"]

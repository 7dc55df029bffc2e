"""Unit sphere sampled on a spherical-coordinate grid.

Convention: ``theta`` is the polar angle measured from ``+z`` and lies in
``[0, pi]``; ``phi`` is the azimuth measured from ``+x`` towards ``+y`` and
lies in ``[0, 2*pi)``. The target maps a point to ``(phi, theta)``.
"""

from __future__ import annotations

import math
from typing import Optional, Sequence, Tuple

import numpy as np

from ..samples import SampleSet
from .noise import NoiseModel

TWO_PI = 2 * math.pi
# Held-out queries stay away from the azimuth branch cut and the poles.
PATCH_PHI = (0.5 * math.pi, 1.5 * math.pi)
PATCH_THETA = (0.25 * math.pi, 0.75 * math.pi)


def spherical_to_cartesian(phi: np.ndarray, theta: np.ndarray) -> np.ndarray:
    phi = np.asarray(phi, dtype=float).ravel()
    theta = np.asarray(theta, dtype=float).ravel()
    sin_theta = np.sin(theta)
    return np.column_stack([sin_theta * np.cos(phi), sin_theta * np.sin(phi), np.cos(theta)])


def cartesian_to_spherical(points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Return ``(phi, theta)`` of the directions of ``points``."""

    pts = np.atleast_2d(np.asarray(points, dtype=float))
    radius = np.linalg.norm(pts, axis=1)
    theta = np.arccos(np.clip(pts[:, 2] / radius, -1.0, 1.0))
    phi = np.mod(np.arctan2(pts[:, 1], pts[:, 0]), TWO_PI)
    return phi, theta


def angular_error(a: np.ndarray, b: np.ndarray, periodic: Optional[Sequence[bool]] = None) -> np.ndarray:
    """Row-wise Euclidean error with minimal angular difference in periodic columns.

    ``periodic`` flags the columns measured modulo ``2*pi`` (all of them by
    default).
    """

    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.ndim == 1:
        a = a[:, None]
    if b.ndim == 1:
        b = b[:, None]
    diff = a - b
    flags = np.ones(diff.shape[1], dtype=bool) if periodic is None else np.asarray(periodic, dtype=bool)
    if flags.shape[0] != diff.shape[1]:
        raise ValueError(f"periodic has {flags.shape[0]} flags for {diff.shape[1]} columns")
    diff[:, flags] = np.mod(diff[:, flags] + math.pi, TWO_PI) - math.pi
    return np.linalg.norm(diff, axis=1)


def sphere_target(points: np.ndarray) -> np.ndarray:
    phi, theta = cartesian_to_spherical(points)
    return np.column_stack([phi, theta])


def gen_sphere_grid(grid_size: int, noise: Optional[NoiseModel] = None) -> SampleSet:
    """``grid_size**2`` samples: ``phi_i = 2*pi*i/g`` and cell-centred ``theta_j = pi*(j + 1/2)/g``."""

    g = int(grid_size)
    if g < 2:
        raise ValueError(f"sphere grid needs grid_size >= 2, got {grid_size}")
    noise = noise or NoiseModel()
    phi_axis = TWO_PI * np.arange(g) / g
    theta_axis = math.pi * (np.arange(g) + 0.5) / g
    phi, theta = np.meshgrid(phi_axis, theta_axis, indexing="ij")
    angles = np.column_stack([phi.ravel(), theta.ravel()])
    clean = spherical_to_cartesian(angles[:, 0], angles[:, 1])
    points, values = noise.apply(clean, angles)
    return SampleSet(points, values, truth=angles, params=angles)


def sphere_patch_queries(
    n_queries: int,
    seed: int = 0,
    *,
    phi_range: Tuple[float, float] = PATCH_PHI,
    theta_range: Tuple[float, float] = PATCH_THETA,
) -> Tuple[np.ndarray, np.ndarray]:
    """Random on-sphere query points and their ``(phi, theta)`` truth."""

    rng = np.random.default_rng(seed)
    phi = rng.uniform(phi_range[0], phi_range[1], int(n_queries))
    theta = rng.uniform(theta_range[0], theta_range[1], int(n_queries))
    return spherical_to_cartesian(phi, theta), np.column_stack([phi, theta])


__all__ = [
    "angular_error",
    "cartesian_to_spherical",
    "gen_sphere_grid",
    "sphere_patch_queries",
    "sphere_target",
    "spherical_to_cartesian",
]

"""Height function over the helix ``(sin t, cos t, t)``."""

from __future__ import annotations

import math
from typing import Optional, Tuple

import numpy as np

from ..samples import SampleSet
from .noise import NoiseModel

DEFAULT_T_RANGE = (-2 * math.pi, 2 * math.pi)


def helix_points(t: np.ndarray) -> np.ndarray:
    t = np.asarray(t, dtype=float).ravel()
    return np.column_stack([np.sin(t), np.cos(t), t])


def helix_domain_sigma(points: np.ndarray, scale: float = 1.0) -> np.ndarray:
    """Height-dependent location noise ``scale * sqrt(8 + z**2)``."""

    z = np.atleast_2d(points)[:, 2]
    return scale * np.sqrt(8.0 + z**2)


def gen_helix(
    n_points: int,
    t_range: Tuple[float, float] = DEFAULT_T_RANGE,
    noise: Optional[NoiseModel] = None,
) -> SampleSet:
    """Equispaced helix samples with target ``psi(x, y, z) = z``.

    ``truth`` holds the clean heights and ``params`` the curve parameter ``t``.
    """

    if n_points < 2:
        raise ValueError(f"gen_helix needs at least two points, got {n_points}")
    noise = noise or NoiseModel()
    t = np.linspace(t_range[0], t_range[1], int(n_points))
    clean = helix_points(t)
    heights = clean[:, 2:3].copy()
    points, values = noise.apply(clean, heights)
    return SampleSet(points, values, truth=heights, params=t[:, None])


__all__ = ["DEFAULT_T_RANGE", "gen_helix", "helix_domain_sigma", "helix_points"]

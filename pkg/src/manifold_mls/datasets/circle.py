"""Points on a circle arc with the arc angle as target."""

from __future__ import annotations

import math
from typing import Optional

import numpy as np

from ..samples import SampleSet
from .noise import NoiseModel


def gen_circle(
    n_points: int,
    arc: float = 2 * math.pi,
    radius: float = 1.0,
    noise: Optional[NoiseModel] = None,
) -> SampleSet:
    """Equispaced angles on ``[0, arc]``; a full circle omits the duplicate endpoint."""

    if n_points < 2:
        raise ValueError(f"gen_circle needs at least two points, got {n_points}")
    if not 0 < arc <= 2 * math.pi:
        raise ValueError(f"arc must lie in (0, 2*pi], got {arc}")
    noise = noise or NoiseModel()
    full = math.isclose(arc, 2 * math.pi)
    angles = np.linspace(0.0, arc, int(n_points), endpoint=not full)
    clean = radius * np.column_stack([np.cos(angles), np.sin(angles)])
    points, values = noise.apply(clean, angles[:, None])
    return SampleSet(points, values, truth=angles[:, None], params=angles[:, None])


__all__ = ["gen_circle"]

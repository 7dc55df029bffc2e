"""Regression benchmark over a Klein bottle embedded in R^4."""

from __future__ import annotations

import math
from typing import Dict, Optional, Tuple

import numpy as np

from ..samples import SampleSet

TWO_PI = 2 * math.pi

# Published mean +- std test errors keyed by (n, snrdb, sigma_r, m).
REFERENCE_ERRORS: Dict[Tuple[int, float, float, int], Tuple[float, float]] = {
    (1500, 5.0, 0.0, 1): (1.51, 0.34),
    (1500, 2.0, 0.0, 1): (1.21, 0.30),
    (1000, 5.0, 0.0, 1): (1.53, 0.41),
    (1000, 2.0, 0.0, 1): (1.77, 0.43),
    (1500, 5.0, 0.0, 3): (1.41, 0.35),
    (1500, 2.0, 0.0, 3): (1.05, 0.28),
    (1000, 5.0, 0.0, 3): (1.23, 0.35),
    (1000, 2.0, 0.0, 3): (1.56, 0.42),
    (1500, 5.0, 0.0, 5): (1.51, 0.37),
    (1500, 2.0, 0.0, 5): (1.07, 0.27),
    (1000, 5.0, 0.0, 5): (1.27, 0.33),
    (1000, 2.0, 0.0, 5): (1.73, 0.42),
    (1500, 5.0, 0.2, 1): (3.11, 0.82),
    (1500, 2.0, 0.2, 1): (2.87, 0.75),
    (1000, 5.0, 0.2, 1): (3.02, 0.72),
    (1000, 2.0, 0.2, 1): (3.08, 0.78),
    (1500, 5.0, 0.2, 3): (2.97, 0.72),
    (1500, 2.0, 0.2, 3): (2.76, 0.78),
    (1000, 5.0, 0.2, 3): (2.88, 0.75),
    (1000, 2.0, 0.2, 3): (3.05, 0.88),
    (1500, 5.0, 0.2, 5): (2.87, 0.70),
    (1500, 2.0, 0.2, 5): (2.62, 0.61),
    (1000, 5.0, 0.2, 5): (2.95, 0.81),
    (1000, 2.0, 0.2, 5): (3.21, 0.79),
}


def klein_surface(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    u = np.asarray(u, dtype=float).ravel()
    v = np.asarray(v, dtype=float).ravel()
    ring = 2 * np.cos(v) + 1
    return np.column_stack(
        [ring * np.cos(u), ring * np.sin(u), 2 * np.sin(v) * np.cos(u / 2), 2 * np.sin(v) * np.sin(u / 2)]
    )


def klein_target(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    u = np.asarray(u, dtype=float).ravel()
    v = np.asarray(v, dtype=float).ravel()
    bump = 6 * np.exp(-32 * ((u - math.pi) ** 2 + (v - math.pi) ** 2))
    return 7 * np.sin(4 * u) + 5 * np.cos(2 * v) ** 2 + bump


def klein_noise_level(values: np.ndarray, snrdb: float) -> float:
    """``sigma_0`` such that ``10 log10(var(values) / sigma_0**2) == snrdb``.

    ``snrdb = inf`` means noiseless values.
    """

    if math.isinf(snrdb) and snrdb > 0:
        return 0.0
    variance = float(np.var(np.asarray(values, dtype=float), ddof=1))
    return math.sqrt(variance / 10 ** (snrdb / 10))


def gen_klein(n_points: int, sigma_r: float = 0.0, snrdb: float = math.inf, seed: int = 0) -> SampleSet:
    """Uniform ``(u, v)`` samples with location noise ``sigma_r`` and value noise at ``snrdb``.

    Random draws happen in a fixed order: parameters, location noise, value
    noise. Value noise has the position-dependent deviation
    ``sigma_0 * (1 + 0.1 cos u + 0.1 sin v)``.
    """

    if n_points < 1:
        raise ValueError(f"gen_klein needs at least one point, got {n_points}")
    if sigma_r < 0:
        raise ValueError(f"sigma_r must be >= 0, got {sigma_r}")
    rng = np.random.default_rng(seed)
    uv = rng.uniform(0.0, TWO_PI, size=(int(n_points), 2))
    eta = rng.standard_normal((int(n_points), 4))
    eps = rng.standard_normal(int(n_points))

    u, v = uv[:, 0], uv[:, 1]
    clean = klein_surface(u, v)
    truth = klein_target(u, v)
    sigma0 = klein_noise_level(truth, snrdb) if n_points > 1 else 0.0
    values = truth + sigma0 * (1 + 0.1 * np.cos(u) + 0.1 * np.sin(v)) * eps
    return SampleSet(clean + sigma_r * eta, values[:, None], truth=truth[:, None], params=uv)


def reference_error(n_points: int, snrdb: float, sigma_r: float, m: int) -> Optional[Tuple[float, float]]:
    return REFERENCE_ERRORS.get((int(n_points), float(snrdb), float(sigma_r), int(m)))


__all__ = [
    "REFERENCE_ERRORS",
    "gen_klein",
    "klein_noise_level",
    "klein_surface",
    "klein_target",
    "reference_error",
]

"""Noise models shared by the dataset generators."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, Tuple, Union

import numpy as np

from ..errors import ConfigurationError

DomainScale = Union[float, Callable[[np.ndarray], np.ndarray]]


@dataclass(frozen=True, slots=True)
class NoiseModel:
    """Gaussian perturbations of sample locations and target values.

    ``sigma_domain`` is either a constant or a callable mapping the clean
    ``N x n`` points to per-point standard deviations; every ambient
    coordinate of a point gets independent noise with that deviation.
    ``sigma_target`` is the standard deviation of the value noise.
    """

    sigma_domain: DomainScale = 0.0
    sigma_target: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if not callable(self.sigma_domain):
            if not (math.isfinite(self.sigma_domain) and self.sigma_domain >= 0):
                raise ConfigurationError(f"sigma_domain must be finite and >= 0, got {self.sigma_domain!r}")
        if not (math.isfinite(self.sigma_target) and self.sigma_target >= 0):
            raise ConfigurationError(f"sigma_target must be finite and >= 0, got {self.sigma_target!r}")

    @property
    def is_clean(self) -> bool:
        return not callable(self.sigma_domain) and self.sigma_domain == 0 and self.sigma_target == 0

    def domain_scale(self, points: np.ndarray) -> np.ndarray:
        """Per-point standard deviation of the location noise."""

        points = np.atleast_2d(points)
        if callable(self.sigma_domain):
            scale = np.asarray(self.sigma_domain(points), dtype=float).reshape(points.shape[0])
            if np.any(scale < 0) or not np.all(np.isfinite(scale)):
                raise ConfigurationError("sigma_domain callback returned negative or non-finite scales")
            return scale
        return np.full(points.shape[0], float(self.sigma_domain))

    def apply(self, points: np.ndarray, values: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Return perturbed copies; location noise is drawn before value noise."""

        rng = np.random.default_rng(self.seed)
        points = np.atleast_2d(np.asarray(points, dtype=float))
        values = np.asarray(values, dtype=float)
        noisy_points = points + self.domain_scale(points)[:, None] * rng.standard_normal(points.shape)
        noisy_values = values + self.sigma_target * rng.standard_normal(values.shape)
        return noisy_points, noisy_values

    def model_dump(self) -> Dict[str, object]:
        domain = "callable" if callable(self.sigma_domain) else self.sigma_domain
        return {"sigma_domain": domain, "sigma_target": self.sigma_target, "seed": self.seed}


__all__ = ["NoiseModel"]

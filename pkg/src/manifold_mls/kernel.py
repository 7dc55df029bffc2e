"""Radial weight functions applied to ambient distances."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import Optional, Union

import numpy as np

from .errors import ConfigurationError

ArrayLike = Union[float, np.ndarray]


class WeightFamily(str, enum.Enum):
    """Supported kernel families."""

    TRUNCATED_EXP = "truncated_exp"
    GAUSSIAN = "gaussian"
    INTERPOLATORY = "interpolatory"

    @classmethod
    def parse(cls, value: Union[str, "WeightFamily"]) -> "WeightFamily":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError as exc:
            choices = ", ".join(member.value for member in cls)
            raise ConfigurationError(f"unknown weight family {value!r} (expected one of {choices})") from exc


@dataclass(frozen=True, slots=True)
class WeightSpec:
    """Kernel family with support multiplier ``k`` and bandwidth ``h``.

    ``k`` and ``h`` may be left as ``None`` ("auto"); the approximator resolves
    them from the sample set before any weight is evaluated.
    """

    family: WeightFamily = WeightFamily.TRUNCATED_EXP
    k: Optional[float] = None
    h: Optional[float] = None
    eps_reg: Optional[float] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "family", WeightFamily.parse(self.family))
        for name in ("k", "h", "eps_reg"):
            value = getattr(self, name)
            if value is None:
                continue
            if not math.isfinite(value) or value <= 0:
                raise ConfigurationError(f"weight parameter {name} must be positive and finite, got {value!r}")

    @property
    def is_resolved(self) -> bool:
        return self.k is not None and self.h is not None

    def resolved(self, *, k: Optional[float] = None, h: Optional[float] = None) -> "WeightSpec":
        """Return a copy with the given ``k``/``h`` filled in (existing values win)."""

        return replace(
            self,
            k=self.k if self.k is not None else k,
            h=self.h if self.h is not None else h,
        )

    def scaled_support(self, factor: float) -> "WeightSpec":
        """Enlarge the support radius ``k * h`` by ``factor`` keeping ``h``."""

        self.require_resolved()
        return replace(self, k=self.k * factor)

    def require_resolved(self) -> None:
        if not self.is_resolved:
            raise ConfigurationError("weight spec has unresolved k/h ('auto'); resolve it against a sample set first")

    @property
    def support_radius(self) -> float:
        self.require_resolved()
        return float(self.k * self.h)

    @property
    def regularizer(self) -> float:
        """``eps_reg`` or its default ``(1e-8 * h)**2``."""

        if self.eps_reg is not None:
            return float(self.eps_reg)
        self.require_resolved()
        return float((1e-8 * self.h) ** 2)

    def model_dump(self) -> dict:
        return {
            "family": self.family.value,
            "k": self.k,
            "h": self.h,
            "eps_reg": self.eps_reg,
        }


def weight_eval(t: ArrayLike, spec: WeightSpec) -> ArrayLike:
    """Evaluate the weight at nonnegative distance(s) ``t``.

    Accepts a scalar or an array and returns the same shape.
    """

    spec.require_resolved()
    scalar = np.ndim(t) == 0
    dist = np.asarray(t, dtype=float)
    if np.any(dist < 0) or not np.all(np.isfinite(dist)):
        raise ValueError("distances must be finite and nonnegative")

    radius = spec.support_radius
    out = np.zeros_like(dist)
    if spec.family is WeightFamily.GAUSSIAN:
        out = np.exp(-(dist**2) / spec.h**2)
    else:
        inside = dist < radius
        near = dist[inside]
        if spec.family is WeightFamily.TRUNCATED_EXP:
            out[inside] = np.exp(-(near**2) / (near - radius) ** 2)
        else:
            out[inside] = 1.0 / (near**2 + spec.regularizer)
    return float(out) if scalar else out


def inverse_weight_eval(t: ArrayLike, spec: WeightSpec) -> ArrayLike:
    """``1 / weight_eval`` for the interpolatory family, ``inf`` outside the support.

    This is the finite quantity ``t**2 + eps_reg`` that enters the dual
    (saddle-point) form of the local fit.
    """

    spec.require_resolved()
    scalar = np.ndim(t) == 0
    dist = np.asarray(t, dtype=float)
    out = np.full_like(dist, np.inf)
    inside = dist < spec.support_radius
    out[inside] = dist[inside] ** 2 + spec.regularizer
    return float(out) if scalar else out


__all__ = ["WeightFamily", "WeightSpec", "inverse_weight_eval", "weight_eval"]

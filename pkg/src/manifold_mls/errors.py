"""Exception hierarchy shared by the library, the harness and the CLI."""

from __future__ import annotations

from pathlib import Path
from typing import Any, Dict, Optional


class MMLSError(Exception):
    """Base class for every error raised by :mod:`manifold_mls`."""


class ConfigurationError(MMLSError, ValueError):
    """Invalid weight, approximation or run configuration."""


class SampleFileError(MMLSError, ValueError):
    """A sample/query file could not be parsed or has an inconsistent shape."""

    def __init__(self, message: str, *, path: Optional[Path] = None, line: Optional[int] = None) -> None:
        self.path = path
        self.line = line
        location = ""
        if path is not None:
            location = f"{path}"
            if line is not None:
                location += f":{line}"
            location += ": "
        super().__init__(f"{location}{message}")


class NumericalError(MMLSError, ArithmeticError):
    """A local solve failed. ``context`` carries counts and condition estimates."""

    def __init__(self, message: str, **context: Any) -> None:
        super().__init__(message)
        self.context: Dict[str, Any] = context


class InsufficientSamples(NumericalError):
    def __init__(self, required: int, available: int) -> None:
        super().__init__(
            f"{available} positive-weight samples available, {required} required",
            required=required,
            available=available,
        )
        self.required = required
        self.available = available


class RankDeficient(NumericalError):
    def __init__(self, rank: int, required: int, rcond_estimate: float) -> None:
        super().__init__(
            f"design matrix has numerical rank {rank} < {required} (rcond estimate {rcond_estimate:.3e})",
            rank=rank,
            required=required,
            rcond_estimate=rcond_estimate,
        )
        self.rank = rank
        self.required = required
        self.rcond_estimate = rcond_estimate


class ZeroWeight(NumericalError):
    def __init__(self, count: int) -> None:
        super().__init__(
            f"{count} samples carry zero weight; the dual solve needs strictly positive weights",
            count=count,
        )
        self.count = count


class NoSamplesInSupport(NumericalError):
    def __init__(self, required: int, available: int, radius: float) -> None:
        super().__init__(
            f"{available} samples within support radius {radius:.6g}, {required} required",
            required=required,
            available=available,
            radius=radius,
        )
        self.required = required
        self.available = available
        self.radius = radius


class NotConverged(NumericalError):
    def __init__(self, iterations: int, last_step: float, frame: Any) -> None:
        super().__init__(
            f"frame search did not converge after {iterations} iterations (last step {last_step:.3e})",
            iterations=iterations,
            last_step=last_step,
        )
        self.iterations = iterations
        self.last_step = last_step
        self.frame = frame


class SearchRadiusExceeded(NumericalError):
    def __init__(self, distance: float, mu: float, frame: Any) -> None:
        super().__init__(
            f"frame origin at distance {distance:.6g} from the query exceeds search radius {mu:.6g}",
            distance=distance,
            mu=mu,
        )
        self.distance = distance
        self.mu = mu
        self.frame = frame


# Failures that a larger support radius may fix.
ENLARGEABLE = (InsufficientSamples, NoSamplesInSupport, RankDeficient)


__all__ = [
    "ConfigurationError",
    "ENLARGEABLE",
    "InsufficientSamples",
    "MMLSError",
    "NoSamplesInSupport",
    "NotConverged",
    "NumericalError",
    "RankDeficient",
    "SampleFileError",
    "SearchRadiusExceeded",
    "ZeroWeight",
]

"""Manifold moving least-squares approximation."""

from .approximator import (
    ApproxConfig,
    BatchResult,
    approximate,
    approximate_batch,
    local_fit,
    project_batch,
    project_point,
    resolve_config,
)
from .frame import AffineFrame, FrameSearchConfig, find_local_frame
from .kernel import WeightFamily, WeightSpec
from .samples import SampleSet

__all__ = [
    "AffineFrame",
    "ApproxConfig",
    "BatchResult",
    "FrameSearchConfig",
    "SampleSet",
    "WeightFamily",
    "WeightSpec",
    "approximate",
    "approximate_batch",
    "find_local_frame",
    "local_fit",
    "project_batch",
    "project_point",
    "resolve_config",
]

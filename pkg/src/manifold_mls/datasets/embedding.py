"""Rigid embeddings into high-dimensional ambient spaces."""

from __future__ import annotations

import numpy as np

from ..errors import ConfigurationError
from ..samples import SampleSet


def random_isometry(n_source: int, n_target: int, seed: int = 0) -> np.ndarray:
    """``n_target x n_source`` matrix with orthonormal columns (Haar distributed)."""

    if n_target < n_source:
        raise ConfigurationError(f"cannot embed dimension {n_source} into {n_target}")
    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(rng.standard_normal((int(n_target), int(n_source))))
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return q * signs


def embed_high_dim(samples: SampleSet, n_target: int, seed: int = 0) -> SampleSet:
    """Map every sample point through :func:`random_isometry`; values are untouched."""

    basis = random_isometry(samples.ambient_dim, n_target, seed)
    return SampleSet(
        samples.points @ basis.T,
        samples.values,
        truth=samples.truth,
        params=samples.params,
    )


__all__ = ["embed_high_dim", "random_isometry"]

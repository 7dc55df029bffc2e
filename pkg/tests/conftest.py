import sys
from pathlib import Path

import numpy as np
import pytest

ROOT = Path(__file__).resolve().parents[1]
SRC = ROOT / "src"
if str(SRC) not in sys.path:
    sys.path.insert(0, str(SRC))

from manifold_mls.datasets.sphere import gen_sphere_grid  # noqa: E402
from manifold_mls.kernel import WeightSpec  # noqa: E402
from manifold_mls.samples import SampleSet  # noqa: E402


def plane_points(count: int = 21) -> np.ndarray:
    axis = np.linspace(-1.0, 1.0, count)
    x, y = np.meshgrid(axis, axis, indexing="ij")
    return np.column_stack([x.ravel(), y.ravel(), np.zeros(x.size)])


def linear_values(points: np.ndarray) -> np.ndarray:
    return 2.0 * points[:, 0] - 3.0 * points[:, 1] + 1.0


@pytest.fixture
def plane_samples() -> SampleSet:
    """21 x 21 grid with spacing 0.1 on the plane z = 0 and a linear target."""

    points = plane_points()
    return SampleSet(points, linear_values(points))


@pytest.fixture
def plane_weight() -> WeightSpec:
    return WeightSpec(k=4.0, h=0.1)


def random_rotation(n: int, rng: np.random.Generator) -> np.ndarray:
    """Random proper rotation of R^n."""

    Q, R = np.linalg.qr(rng.standard_normal((n, n)))
    Q = Q * np.sign(np.diag(R))
    if np.linalg.det(Q) < 0:
        Q[:, 0] = -Q[:, 0]
    return Q


def affine_subspace(d: int, n: int, n_points: int, rng: np.random.Generator):
    """Uniform samples of ``[-1, 1]^d`` placed on a random affine d-plane in R^n.

    Returns ``(origin, basis, coords, points)`` with ``points = origin + coords @ basis.T``.
    """

    basis = np.linalg.qr(rng.standard_normal((n, d)))[0]
    origin = rng.uniform(-1.0, 1.0, n)
    coords = rng.uniform(-1.0, 1.0, (n_points, d))
    return origin, basis, coords, origin + coords @ basis.T


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def sphere_samples() -> SampleSet:
    """24 x 24 (phi, theta) grid on the unit sphere with the angles as values."""

    return gen_sphere_grid(24)


@pytest.fixture(scope="session")
def sphere_weight() -> WeightSpec:
    return WeightSpec(k=4.0, h=np.pi / 24)

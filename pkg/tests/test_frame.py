import math

import numpy as np
import pytest

from conftest import random_rotation
from manifold_mls.datasets.circle import gen_circle
from manifold_mls.datasets.sphere import gen_sphere_grid, spherical_to_cartesian
from manifold_mls.errors import ConfigurationError, NoSamplesInSupport, NotConverged, RankDeficient, SearchRadiusExceeded
from manifold_mls.frame import (
    AffineFrame,
    FrameSearchConfig,
    find_local_frame,
    frame_cost,
    orthonormalize,
    principal_angles,
    project_to_frame,
)
from manifold_mls.kernel import WeightSpec
from manifold_mls.samples import SampleSet

PLANE = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]])
QUERY = np.array([0.1, 0.2, 0.3])


def test_orthonormalize_gives_orthonormal_sign_fixed_columns() -> None:
    rng = np.random.default_rng(0)
    Q = orthonormalize(rng.standard_normal((6, 3)))
    np.testing.assert_allclose(Q.T @ Q, np.eye(3), atol=1e-12)
    for column in Q.T:
        assert column[np.argmax(np.abs(column))] > 0


def test_orthonormalize_rejects_dependent_columns() -> None:
    vectors = np.array([[1.0, 2.0], [1.0, 2.0], [0.0, 0.0]])
    with pytest.raises(RankDeficient):
        orthonormalize(vectors)


def test_affine_frame_validates_basis() -> None:
    with pytest.raises(ValueError):
        AffineFrame(origin=np.zeros(3), basis=np.array([[1.0, 1.0], [0.0, 1.0], [0.0, 0.0]]))
    frame = AffineFrame(origin=np.zeros(3), basis=PLANE)
    np.testing.assert_allclose(frame.residuals(np.array([[1.0, 2.0, 3.0]])), [3.0])
    np.testing.assert_allclose(project_to_frame(np.array([1.0, 2.0, 3.0]), frame), [1.0, 2.0])


def test_frame_of_plane_is_the_plane(plane_samples, plane_weight) -> None:
    frame = find_local_frame(QUERY, plane_samples, plane_weight, 2)
    assert frame.converged
    assert frame.trace[-1] < 1e-10 * plane_weight.h
    np.testing.assert_allclose(frame.origin, [0.1, 0.2, 0.0], atol=1e-10)
    assert np.max(principal_angles(frame.basis, PLANE)) < 1e-8
    np.testing.assert_allclose(frame.basis.T @ frame.basis, np.eye(2), atol=1e-12)
    np.testing.assert_allclose(frame.basis.T @ (QUERY - frame.origin), 0.0, atol=1e-12)
    np.testing.assert_allclose(project_to_frame(frame.origin, frame), 0.0, atol=1e-12)
    assert frame_cost(QUERY, frame, plane_samples, plane_weight) < 1e-20


def test_frame_does_not_depend_on_sample_order_or_init(plane_samples, plane_weight) -> None:
    reference = find_local_frame(QUERY, plane_samples, plane_weight, 2)
    perm = np.random.default_rng(1).permutation(plane_samples.n_samples)
    shuffled = SampleSet(plane_samples.points[perm], plane_samples.values[perm])
    other = find_local_frame(QUERY, shuffled, plane_weight, 2, FrameSearchConfig(seed=7))
    pca = find_local_frame(QUERY, plane_samples, plane_weight, 2, FrameSearchConfig(init_mode="pca"))
    for frame in (other, pca):
        np.testing.assert_allclose(frame.origin, reference.origin, atol=1e-10)
        assert np.max(principal_angles(frame.basis, reference.basis)) < 1e-8


def test_frame_on_sphere_is_tangent() -> None:
    samples = gen_sphere_grid(40)
    weight = WeightSpec(k=4.0, h=math.pi / 40)
    direction = spherical_to_cartesian(np.array([1.0]), np.array([1.2]))[0]
    r = 1.1 * direction
    frame = find_local_frame(r, samples, weight, 2)
    assert frame.converged
    assert abs(np.linalg.norm(frame.origin) - 1.0) < 0.05
    assert np.max(np.abs(frame.basis.T @ direction)) < 0.05
    np.testing.assert_allclose(frame.basis.T @ (r - frame.origin), 0.0, atol=1e-10)


def test_frame_search_failures(plane_samples, plane_weight) -> None:
    with pytest.raises(NoSamplesInSupport):
        find_local_frame(np.array([5.0, 5.0, 5.0]), plane_samples, plane_weight, 2)

    with pytest.raises(SearchRadiusExceeded) as exceeded:
        find_local_frame(QUERY, plane_samples, plane_weight, 2, FrameSearchConfig(mu=0.1))
    np.testing.assert_allclose(exceeded.value.frame.origin, [0.1, 0.2, 0.0], atol=1e-10)

    with pytest.raises(NotConverged) as stalled:
        find_local_frame(QUERY, plane_samples, plane_weight, 2, FrameSearchConfig(max_iter=1))
    assert stalled.value.iterations == 1
    assert not stalled.value.frame.converged


def test_frame_search_checks_dimensions(plane_samples, plane_weight) -> None:
    with pytest.raises(ConfigurationError):
        find_local_frame(QUERY, plane_samples, plane_weight, 3)
    with pytest.raises(ConfigurationError):
        find_local_frame(np.zeros(2), plane_samples, plane_weight, 2)
    with pytest.raises(ConfigurationError):
        FrameSearchConfig(init_mode="svd")


def test_frame_is_idempotent_along_the_normal_ray(sphere_samples, sphere_weight) -> None:
    direction = spherical_to_cartesian(np.array([2.0]), np.array([1.1]))[0]
    r = 1.08 * direction
    frame = find_local_frame(r, sphere_samples, sphere_weight, 2)
    for t in (0.25, 0.5, 0.9):
        inner = frame.origin + t * (r - frame.origin)
        again = find_local_frame(inner, sphere_samples, sphere_weight, 2, FrameSearchConfig(seed=5))
        np.testing.assert_allclose(again.origin, frame.origin, atol=1e-8)
        assert np.max(principal_angles(again.basis, frame.basis)) < 1e-8


@pytest.mark.parametrize("seed", range(10))
def test_frame_follows_rigid_motions(sphere_samples, sphere_weight, seed) -> None:
    rng = np.random.default_rng(seed)
    rotation = random_rotation(3, rng)
    shift = rng.uniform(-2.0, 2.0, 3)
    moved = SampleSet(sphere_samples.points @ rotation.T + shift, sphere_samples.values)
    direction = spherical_to_cartesian(rng.uniform(0.5, 5.5, 1), rng.uniform(0.6, 2.5, 1))[0]
    r = rng.uniform(0.95, 1.05) * direction
    cfg = FrameSearchConfig(init_mode="pca")

    frame = find_local_frame(r, sphere_samples, sphere_weight, 2, cfg)
    image = find_local_frame(rotation @ r + shift, moved, sphere_weight, 2, cfg)
    np.testing.assert_allclose(image.origin, rotation @ frame.origin + shift, atol=1e-8)
    assert np.max(principal_angles(image.basis, rotation @ frame.basis)) < 1e-8
    np.testing.assert_allclose(image.basis.T @ (rotation @ r + shift - image.origin), 0.0, atol=1e-8)


def test_circle_frame_origin_error_is_second_order() -> None:
    r = np.array([1.02, 0.0])
    errors = []
    for n_points in (100, 200, 400):
        samples = gen_circle(n_points)
        h = 2 * math.pi / n_points
        frame = find_local_frame(r, samples, WeightSpec(k=4.0, h=h), 1)
        errors.append(float(np.linalg.norm(frame.origin - [1.0, 0.0])))
        assert errors[-1] < 10 * h**2
        assert np.max(principal_angles(frame.basis, np.array([[0.0], [1.0]]))) < 10 * h
    assert errors[0] / errors[1] > 3.0
    assert errors[1] / errors[2] > 3.0

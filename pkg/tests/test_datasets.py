import math

import numpy as np
import pytest

from manifold_mls.datasets.circle import gen_circle
from manifold_mls.datasets.embedding import embed_high_dim, random_isometry
from manifold_mls.datasets.helix import gen_helix, helix_domain_sigma, helix_points
from manifold_mls.datasets.klein import gen_klein, klein_noise_level, klein_target, reference_error
from manifold_mls.datasets.noise import NoiseModel
from manifold_mls.datasets.sampling import estimate_fill_distance, nearest_other_distances
from manifold_mls.datasets.sphere import (
    angular_error,
    cartesian_to_spherical,
    gen_sphere_grid,
    sphere_patch_queries,
    spherical_to_cartesian,
)
from manifold_mls.errors import ConfigurationError
from manifold_mls.samples import SampleSet


def test_sphere_grid_layout() -> None:
    samples = gen_sphere_grid(4)
    assert samples.n_samples == 16
    np.testing.assert_allclose(np.linalg.norm(samples.points, axis=1), 1.0)
    np.testing.assert_array_equal(samples.values, samples.params)
    assert samples.values[:, 0].min() == 0.0
    assert samples.values[:, 0].max() < 2 * math.pi
    np.testing.assert_allclose(np.unique(samples.values[:, 1]), math.pi * (np.arange(4) + 0.5) / 4)


def test_spherical_coordinates_round_trip() -> None:
    phi = np.array([0.1, 3.0, 6.0])
    theta = np.array([0.2, 1.5, 3.0])
    back_phi, back_theta = cartesian_to_spherical(spherical_to_cartesian(phi, theta))
    np.testing.assert_allclose(back_phi, phi, atol=1e-12)
    np.testing.assert_allclose(back_theta, theta, atol=1e-12)


def test_angular_error_wraps_periodic_columns_only() -> None:
    a = np.array([[0.1, 0.1]])
    b = np.array([[2 * math.pi - 0.1, 2 * math.pi - 0.1]])
    assert angular_error(a, b)[0] == pytest.approx(math.sqrt(2) * 0.2)
    mixed = angular_error(a, b, periodic=(True, False))[0]
    assert mixed == pytest.approx(math.hypot(0.2, 2 * math.pi - 0.2))


def test_patch_queries_stay_in_patch() -> None:
    points, angles = sphere_patch_queries(50, seed=3)
    assert points.shape == (50, 3)
    assert np.all((angles[:, 0] >= 0.5 * math.pi) & (angles[:, 0] <= 1.5 * math.pi))
    assert np.all((angles[:, 1] >= 0.25 * math.pi) & (angles[:, 1] <= 0.75 * math.pi))
    np.testing.assert_array_equal(sphere_patch_queries(50, seed=3)[0], points)


def test_helix_targets_height() -> None:
    samples = gen_helix(100)
    np.testing.assert_array_equal(samples.values[:, 0], samples.points[:, 2])
    np.testing.assert_allclose(samples.points, helix_points(samples.params[:, 0]))
    assert samples.params[0, 0] == pytest.approx(-2 * math.pi)
    np.testing.assert_allclose(helix_domain_sigma(np.array([[0.0, 1.0, 1.0]]), 0.5), [1.5])


def test_noise_model_is_seeded() -> None:
    noise = NoiseModel(sigma_domain=0.1, sigma_target=2.0, seed=5)
    first = gen_helix(50, noise=noise)
    second = gen_helix(50, noise=noise)
    np.testing.assert_array_equal(first.points, second.points)
    np.testing.assert_array_equal(first.values, second.values)
    assert not np.allclose(first.values, first.truth)
    assert not noise.is_clean
    assert NoiseModel().is_clean
    with pytest.raises(ConfigurationError):
        NoiseModel(sigma_target=-1.0)


def test_callable_domain_noise_scales_per_point() -> None:
    noise = NoiseModel(sigma_domain=lambda pts: np.where(pts[:, 0] > 0, 0.0, 1.0), seed=1)
    points = np.array([[1.0, 0.0], [-1.0, 0.0]])
    noisy, _ = noise.apply(points, np.zeros((2, 1)))
    np.testing.assert_array_equal(noisy[0], points[0])
    assert not np.allclose(noisy[1], points[1])


def test_klein_generator_is_reproducible_and_clean_at_infinite_snr() -> None:
    clean = gen_klein(200, seed=4)
    np.testing.assert_array_equal(clean.values, clean.truth)
    np.testing.assert_allclose(clean.truth[:, 0], klein_target(clean.params[:, 0], clean.params[:, 1]))
    noisy = gen_klein(200, sigma_r=0.2, snrdb=5.0, seed=4)
    again = gen_klein(200, sigma_r=0.2, snrdb=5.0, seed=4)
    np.testing.assert_array_equal(noisy.points, again.points)
    np.testing.assert_array_equal(noisy.params, clean.params)
    assert noisy.ambient_dim == 4


def test_klein_noise_level_matches_snr() -> None:
    values = np.random.default_rng(0).standard_normal(1000) * 3.0
    sigma = klein_noise_level(values, 5.0)
    assert 10 * math.log10(np.var(values, ddof=1) / sigma**2) == pytest.approx(5.0)
    assert klein_noise_level(values, math.inf) == 0.0
    assert reference_error(1500, 5.0, 0.0, 1) == (1.51, 0.34)
    assert reference_error(1000, 2.0, 0.2, 5) == (3.21, 0.79)
    assert reference_error(300, 5.0, 0.0, 1) is None


def test_full_circle_skips_duplicate_endpoint() -> None:
    full = gen_circle(8)
    assert full.values[-1, 0] == pytest.approx(2 * math.pi * 7 / 8)
    arc = gen_circle(5, arc=math.pi)
    assert arc.values[-1, 0] == pytest.approx(math.pi)
    np.testing.assert_allclose(np.linalg.norm(arc.points, axis=1), 1.0)


def test_isometry_preserves_distances() -> None:
    basis = random_isometry(3, 12, seed=2)
    np.testing.assert_allclose(basis.T @ basis, np.eye(3), atol=1e-12)
    samples = gen_helix(30)
    lifted = embed_high_dim(samples, 12, seed=2)
    original = np.linalg.norm(samples.points[:, None] - samples.points[None], axis=2)
    embedded = np.linalg.norm(lifted.points[:, None] - lifted.points[None], axis=2)
    np.testing.assert_allclose(embedded, original, atol=1e-12)
    np.testing.assert_array_equal(lifted.values, samples.values)
    with pytest.raises(ConfigurationError):
        random_isometry(4, 3)


def test_fill_distance_on_grid_and_in_high_dimension() -> None:
    samples = gen_sphere_grid(10)
    stats = estimate_fill_distance(samples.points)
    assert stats.n_samples == 100
    assert 0 < stats.knn_mean <= stats.h_est
    lifted = embed_high_dim(samples, 30, seed=1)
    np.testing.assert_allclose(
        nearest_other_distances(lifted.points), nearest_other_distances(samples.points), atol=1e-10
    )


def test_sample_set_neighbors_agree_between_index_and_brute_force() -> None:
    samples = gen_sphere_grid(12)
    lifted = embed_high_dim(samples, 24, seed=3)
    assert samples.has_index
    assert not lifted.has_index
    center = samples.points[17] * 1.05
    idx_low, dist_low = samples.neighbors(center, 0.5)
    lifted_center = random_isometry(3, 24, seed=3) @ center
    idx_high, dist_high = lifted.neighbors(lifted_center, 0.5)
    np.testing.assert_array_equal(idx_low, idx_high)
    np.testing.assert_allclose(dist_low, dist_high, atol=1e-10)
    assert samples.nearest(samples.points[5]) == (5, 0.0)
    assert samples.kth_neighbor_distance(samples.points[5], 1) == 0.0


def test_sample_set_is_immutable_and_validated() -> None:
    samples = SampleSet(np.zeros((3, 2)) + np.arange(3)[:, None], np.arange(3.0))
    with pytest.raises(ValueError):
        samples.points[0, 0] = 1.0
    assert samples.without(1).n_samples == 2
    with pytest.raises(ValueError):
        SampleSet(np.zeros((3, 2)), np.zeros(2))
    with pytest.raises(ValueError):
        SampleSet(np.array([[0.0, np.nan]]), np.zeros(1))


@pytest.mark.parametrize("offset", [0.0, 1e3])
def test_kth_and_nearest_agree_between_index_and_brute_force(offset: float) -> None:
    samples = gen_helix(300)
    samples = SampleSet(samples.points + offset, samples.values)
    lifted = embed_high_dim(samples, 40, seed=5)
    basis = random_isometry(3, 40, seed=5)
    assert not lifted.has_index
    rng = np.random.default_rng(5)
    for center in samples.points[rng.choice(samples.n_samples, 10, replace=False)] + 0.05:
        lifted_center = basis @ center
        for k in (1, 7, 40):
            assert lifted.kth_neighbor_distance(lifted_center, k) == pytest.approx(
                samples.kth_neighbor_distance(center, k), rel=1e-9, abs=1e-9
            )
        index, distance = lifted.nearest(lifted_center)
        assert index == samples.nearest(center)[0]
        assert distance == pytest.approx(samples.nearest(center)[1], rel=1e-9, abs=1e-9)
    assert lifted.nearest(lifted.points[11]) == (11, 0.0)

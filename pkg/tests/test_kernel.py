import math

import numpy as np
import pytest

from manifold_mls.errors import ConfigurationError
from manifold_mls.kernel import WeightFamily, WeightSpec, inverse_weight_eval, weight_eval


def test_truncated_exp_is_one_at_zero_and_vanishes_at_support() -> None:
    spec = WeightSpec(k=2.0, h=0.5)
    assert weight_eval(0.0, spec) == 1.0
    assert weight_eval(1.0, spec) == 0.0
    assert weight_eval(3.0, spec) == 0.0
    dist = np.linspace(0.0, 0.9, 50)
    values = weight_eval(dist, spec)
    assert values.shape == dist.shape
    assert np.all(values > 0)
    assert np.all(np.diff(values) < 0)


def test_gaussian_has_unbounded_support() -> None:
    spec = WeightSpec(family="gaussian", k=1.0, h=2.0)
    assert spec.family is WeightFamily.GAUSSIAN
    assert weight_eval(2.0, spec) == pytest.approx(math.exp(-1.0))
    assert weight_eval(5.0, spec) > 0


def test_interpolatory_weight_and_its_inverse() -> None:
    spec = WeightSpec(family=WeightFamily.INTERPOLATORY, k=3.0, h=0.1, eps_reg=1e-6)
    dist = np.array([0.0, 0.1, 0.2, 0.5])
    inverse = inverse_weight_eval(dist, spec)
    assert inverse[:3] == pytest.approx(dist[:3] ** 2 + 1e-6)
    assert math.isinf(inverse[3])
    assert weight_eval(0.1, spec) == pytest.approx(1.0 / (0.01 + 1e-6))
    assert weight_eval(0.5, spec) == 0.0


def test_default_regularizer_scales_with_bandwidth() -> None:
    assert WeightSpec(k=2.0, h=0.5).regularizer == pytest.approx((0.5e-8) ** 2)


def test_unresolved_spec_cannot_be_evaluated() -> None:
    spec = WeightSpec()
    assert not spec.is_resolved
    with pytest.raises(ConfigurationError):
        weight_eval(0.1, spec)
    resolved = spec.resolved(k=2.0, h=0.3)
    assert resolved.support_radius == pytest.approx(0.6)
    assert WeightSpec(k=5.0).resolved(k=2.0, h=0.3).k == 5.0


def test_scaled_support_keeps_bandwidth() -> None:
    spec = WeightSpec(k=2.0, h=0.3).scaled_support(1.5)
    assert spec.k == pytest.approx(3.0)
    assert spec.h == 0.3


@pytest.mark.parametrize("kwargs", [{"k": 0.0}, {"h": -1.0}, {"eps_reg": math.inf}, {"family": "cubic"}])
def test_invalid_parameters_are_rejected(kwargs) -> None:
    with pytest.raises(ConfigurationError):
        WeightSpec(**kwargs)


def test_negative_distances_are_rejected() -> None:
    with pytest.raises(ValueError):
        weight_eval(np.array([0.1, -0.1]), WeightSpec(k=1.0, h=1.0))


@pytest.mark.parametrize("family", [WeightFamily.TRUNCATED_EXP, WeightFamily.GAUSSIAN])
@pytest.mark.parametrize("factor", [0.01, 0.37, 3.0, 250.0])
def test_weight_is_consistent_under_rescaling(family, factor) -> None:
    spec = WeightSpec(family=family, k=3.0, h=0.2)
    scaled = WeightSpec(family=family, k=3.0, h=0.2 * factor)
    dist = np.linspace(0.0, 0.7, 36)
    np.testing.assert_allclose(weight_eval(factor * dist, scaled), weight_eval(dist, spec), rtol=1e-9, atol=1e-300)


def test_truncated_exp_vanishes_smoothly_at_support_boundary() -> None:
    spec = WeightSpec(k=2.5, h=0.4)
    radius = spec.support_radius
    first, second = [], []
    for fraction in (0.3, 0.1, 1e-2, 1e-3, 1e-4):
        eps = fraction * radius
        step = eps / 4
        t = radius - eps
        w0, w1, w2 = weight_eval(np.array([t, t - step, t - 2 * step]), spec)
        first.append(abs(w0 - w1) / step)
        second.append(abs(w0 - 2 * w1 + w2) / step**2)
    assert first[0] > 0 and second[0] > 0
    assert all(a >= b for a, b in zip(first, first[1:]))
    assert all(a >= b for a, b in zip(second, second[1:]))
    assert first[-1] < 1e-12
    assert second[-1] < 1e-12

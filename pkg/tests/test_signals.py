import math

import numpy as np
import pytest

from linfspec.errors import NonFiniteError, WindowError
from linfspec.signals import ExpSum, Modulated, QuadDensity, Samples, modulate, wrap_angle


def test_wrap_angle_range():
    w = wrap_angle(np.array([-math.pi, math.pi, 3 * math.pi, 0.5, -7.0]))
    assert np.all(w > -math.pi) and np.all(w <= math.pi)
    assert w[0] == pytest.approx(math.pi) and w[3] == 0.5


def test_samples_window_and_errors():
    x = Samples(-2, [1, 2, 3])
    assert x.window == (-2, 0)
    assert np.array_equal(x.sample([-2, 0]), [1, 3])
    with pytest.raises(WindowError) as err:
        x.sample([0, 1])
    assert err.value.index == 1
    with pytest.raises(NonFiniteError) as err:
        Samples(5, [1.0, float("inf")])
    assert err.value.index == 6
    with pytest.raises(ValueError):
        Samples(0, [])


def test_samples_deterministic_and_read_only():
    x = Samples(0, [1j, 2])
    assert np.array_equal(x.sample([0, 1]), x.sample([0, 1]))
    with pytest.raises(ValueError):
        x.values[0] = 3


def test_exp_sum_validation_and_sup():
    x = ExpSum([1, 0.5], [0.2, -0.4])
    assert x.sup_bound == 1.5
    assert np.abs(x.sample(np.arange(-50, 50))).max() <= 1.5 + 1e-15
    with pytest.raises(ValueError):
        ExpSum([1], [-math.pi])
    with pytest.raises(NonFiniteError):
        ExpSum([float("nan")], [0.0])
    ExpSum([1], [math.pi])


def test_exp_sum_sample_error_bounds_actual_error():
    x = ExpSum([1, 0.5j], [0.2, -0.4])
    t = np.arange(-1000, 1001, 37)
    exact = np.exp(0.2j * t) + 0.5j * np.exp(-0.4j * t)
    assert np.all(np.abs(x.sample(t) - exact) <= x.sample_error(t) + 1e-300)


def test_quad_density_is_exp_sum_of_nodes():
    x = QuadDensity(lambda w: np.cos(w) + 0.3j * np.sin(2 * w), 64)
    e = x.as_exp_sum()
    t = np.arange(-100, 100)
    assert np.allclose(x.sample(t), e.sample(t), atol=1e-13)
    # trigonometric density: samples are its coefficients
    assert x.sample([1])[0] == pytest.approx(0.5, abs=1e-15)
    assert x.sample([2])[0] == pytest.approx(-0.15, abs=1e-15)
    assert x.sample([-2])[0] == pytest.approx(0.15, abs=1e-15)


def test_modulate():
    x = ExpSum([2.0], [3.0])
    y = modulate(x, 0.5)
    assert isinstance(y, ExpSum)
    t = np.arange(-5, 6)
    assert np.allclose(y.sample(t), np.exp(0.5j * t) * x.sample(t))
    s = Samples(0, np.ones(4))
    m = modulate(s, 1.0)
    assert isinstance(m, Modulated)
    assert np.allclose(m.sample([1, 2]), np.exp(1j * np.array([1, 2])))
    assert modulate(s, 0.0) is s

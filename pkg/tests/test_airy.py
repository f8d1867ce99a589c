import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import airy

from combwalk import RangeError, airy_ai


def test_value_at_zero_by_independent_quadrature():
    # Ai(0) = (1/pi) int_0^inf cos(s^3/3) ds, via s = r^(1/3) and a Fourier-weighted quad
    val, _ = quad(lambda r: r ** (-2 / 3) / 3, 0, np.inf, weight="cos", wvar=1 / 3)
    assert abs(airy_ai(0.0) - val / np.pi) < 1e-9
    assert abs(airy_ai(0.0) - 0.3550280539) < 1e-10


def test_matches_reference_on_support():
    x = np.linspace(-20, 20, 8001)
    assert np.max(np.abs(airy_ai(x) - airy(x)[0])) < 1e-10


def test_ode_residual():
    h = 5e-3
    x = np.linspace(-10, 10, 2001)
    f = airy_ai
    d2 = (-f(x + 2 * h) + 16 * f(x + h) - 30 * f(x) + 16 * f(x - h) - f(x - 2 * h)) / (12 * h * h)
    assert np.max(np.abs(d2 - x * f(x))) < 1e-8


def test_monotone_decay_on_positive_axis():
    v = airy_ai(np.linspace(0, 20, 400))
    assert np.all(np.diff(v) < 0) and v[-1] < 1e-25


def test_scalar_and_shape():
    assert isinstance(airy_ai(1.0), float)
    assert airy_ai(np.zeros((2, 3))).shape == (2, 3)


def test_range_error():
    with pytest.raises(RangeError):
        airy_ai(21.0)
    with pytest.raises(RangeError):
        airy_ai(np.array([0.0, -25.0]))

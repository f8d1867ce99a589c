import math

import numpy as np
import pytest

from combwalk import (ContourSpec, CutPoint, DomainError, OnCutError, QuadratureDivergence, amplitude_contour,
                      amplitude_exact, potential, sqrt_cut, w_minus, w_plus, z_of_w)


def off_cut(rng, size):
    z = rng.uniform(-6, 4, size) + 1j * rng.uniform(-3, 3, size)
    return z[np.abs(z.imag) > 1e-6]


def test_sqrt_cut_examples():
    assert abs(sqrt_cut(2.0) - math.sqrt(5)) < 1e-15
    assert abs(sqrt_cut(1e-12j) - 1j * math.sqrt(3)) < 1e-9
    with pytest.raises(OnCutError):
        sqrt_cut(-1.0)


def test_schwarz_reflection(rng):
    z = off_cut(rng, 60)[:50]
    assert np.max(np.abs(sqrt_cut(np.conj(z)) - np.conj(sqrt_cut(z)))) < 1e-14


def test_sqrt_continuous_across_left_ray():
    for x in (-3.5, -10.0):
        assert abs(sqrt_cut(complex(x, 1e-12)) - sqrt_cut(complex(x, -1e-12))) < 1e-9


def test_w_map_examples():
    assert abs(w_plus(1.0) - 1) < 1e-15 and abs(w_minus(1.0) - 1) < 1e-15
    assert w_plus(-3.0) == -1 and w_minus(-3.0) == -1
    assert abs(w_plus(-3 + 1e-12j) + 1) < 1e-5
    assert abs(w_plus(-1 + 1e-12j) - 1j) < 1e-9


def test_w_map_algebra(rng):
    z = off_cut(rng, 200)
    wp, wm = w_plus(z), w_minus(z)
    assert np.max(np.abs(wp * wm - 1)) < 1e-12
    assert np.max(np.abs(wp + wm - 1 - z)) < 1e-12
    assert np.all(np.abs(wp) > 1)
    assert np.max(np.abs(z_of_w(wp) - z)) < 1e-12


def test_z_of_w_examples():
    assert abs(z_of_w(1j) + 1) < 1e-15
    assert abs(z_of_w(np.exp(1j * np.pi / 3))) < 1e-15
    assert z_of_w(1.0) == 1
    with pytest.raises(DomainError):
        z_of_w(0.0)


def test_cut_point_sheets():
    p1, p2 = CutPoint(2.0), CutPoint(2.0, "second")
    assert abs(p1.w) > 1 > abs(p2.w)
    assert abs(p1.w * p2.w - 1) < 1e-15
    with pytest.raises(DomainError):
        CutPoint(2.0, "third")


def test_potential_values():
    assert potential(1.0) == 0
    assert abs(potential(-1.0) + 4j) < 1e-15
    assert abs(potential(-3.0) + 16j / 3) < 1e-15


def test_t_zero_is_delta():
    for n, j, j0 in [(0, 0, 0), (1, 0, 0), (0, 2, 0), (0, 3, 3), (0, 2, 3), (2, 1, 4)]:
        expect = 1.0 if (n, j) == (0, j0) else 0.0
        assert abs(amplitude_contour(n, j, 0.0, j0) - expect) < 1e-12


@pytest.mark.parametrize("n,j,j0,t", [(0, 0, 0, 5.0), (3, 4, 0, 10.0), (-2, 0, 3, 8.0), (0, 5, 5, 15.0),
                                      (4, 6, 2, 20.0)])
def test_oracle_agreement(n, j, j0, t):
    ref = amplitude_exact((0, j0), (n, j), t)
    assert abs(amplitude_contour(n, j, t, j0) - ref) < 1e-9


@pytest.mark.parametrize("n,j,j0,t", [(0, 0, 0, 6.0), (2, 3, 1, 10.0), (-1, 5, 4, 12.0)])
def test_offset_independence(n, j, j0, t):
    a = amplitude_contour(n, j, t, j0, ContourSpec(rho=0.3, dps="auto"))
    b = amplitude_contour(n, j, t, j0, ContourSpec(rho=0.6, dps="auto"))
    assert abs(a - b) < 1e-9


def test_polyline_contour():
    box = ((2.0, -1.5), (2.0, 1.5), (-4.5, 1.5), (-4.5, -1.5))
    verts = tuple(complex(*p) for p in box)
    spec = ContourSpec(kind="polyline", vertices=verts, nodes=256)
    assert abs(amplitude_contour(1, 2, 6.0, 0, spec) - amplitude_exact((0, 0), (1, 2), 6.0)) < 1e-9
    with pytest.raises(DomainError):
        ContourSpec(kind="polyline", vertices=(2 + 1j, -4 + 1j, -4 + 0.5j))
    with pytest.raises(DomainError):
        ContourSpec(kind="polyline", vertices=tuple(reversed(verts)))


def test_divergence_and_extended_precision():
    with pytest.raises(QuadratureDivergence):
        amplitude_contour(0, 0, 120.0, 0, ContourSpec(rho=0.3))
    a = amplitude_contour(3, 40, 30.0, 0, ContourSpec(dps="auto"))
    assert abs(a - amplitude_exact((0, 0), (3, 40), 30.0)) < 1e-9


def test_domain_errors():
    with pytest.raises(DomainError):
        amplitude_contour(0, -1, 1.0)
    with pytest.raises(DomainError):
        ContourSpec(rho=-0.1)

import math
import warnings

import numpy as np
import pytest

from combwalk import (DomainError, ExtendedState, LocalizedState, QuadratureSpec, Truncation, completeness_defect,
                      completeness_matrix, extended_eigenfunction, extended_norm, hamiltonian_matvec,
                      localized_eigenfunction, localized_state)


def window_values(fn, tr):
    amp = np.empty(tr.shape, dtype=complex)
    for i, n in enumerate(range(-tr.L, tr.L + 1)):
        for j in range(tr.M + 1):
            amp[i, j] = fn((n, j))
    return amp


def test_extended_at_origin_with_y_zero():
    for th in (0.3, 1.2, 2.9):
        st = ExtendedState(math.pi / 3, th)
        assert abs(extended_eigenfunction(st, (0, 0)) - 2j * math.sin(th)) < 1e-15


def test_extended_eigen_residual(rng):
    tr = Truncation(6, 8)
    for alpha, theta in zip(rng.uniform(0, 2 * math.pi, 10), rng.uniform(0.01, math.pi - 0.01, 10)):
        st = ExtendedState(alpha, theta)
        psi = window_values(lambda v: extended_eigenfunction(st, v), tr)
        res = hamiltonian_matvec(psi) - st.energy * psi
        assert np.max(np.abs(res[1:-1, :-1])) < 1e-10
    st = ExtendedState(0.7, 1.1)
    psi = window_values(lambda v: extended_eigenfunction(st, v), tr)
    assert abs((hamiltonian_matvec(psi) - st.energy * psi)[2 + tr.L, 3]) < 1e-12


def test_localized_eigen_residual(rng):
    tr = Truncation(6, 8)
    for alpha in rng.uniform(math.pi / 2 + 0.01, 3 * math.pi / 2 - 0.01, 10):
        st = localized_state(alpha)
        psi = window_values(lambda v: localized_eigenfunction(st, v), tr)
        res = hamiltonian_matvec(psi) - st.energy * psi
        assert np.max(np.abs(res[1:-1, :-1])) < 1e-10


def test_extended_norm_examples(rng):
    for th in (0.2, 1.0, 3.0):
        assert abs(extended_norm(math.pi / 3, th) - 4 * math.pi**2) < 1e-12
    assert abs(extended_norm(math.pi, math.pi / 2) - 40 * math.pi**2) < 1e-11
    for alpha, theta in zip(rng.uniform(0, 2 * math.pi, 50), rng.uniform(0, math.pi, 50)):
        y = 1 - 2 * math.cos(alpha)
        assert abs(extended_norm(alpha, theta) - 4 * math.pi**2 * abs(y + np.exp(1j * theta)) ** 2) < 1e-10


def test_extended_norm_warns_near_zero():
    with pytest.warns(RuntimeWarning):
        extended_norm(0.0, 1e-6)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        extended_norm(1.0, 1.0)


def test_localized_examples():
    st = localized_state(math.pi)
    assert abs(st.gamma - math.log(3)) < 1e-15 and abs(st.energy - 16 / 3) < 1e-14
    st = localized_state(2 * math.pi / 3)
    assert abs(st.gamma - math.log(2)) < 1e-15 and abs(st.energy - 4.5) < 1e-14
    for eps in (1e-3, 1e-4):
        st = localized_state(math.pi / 2 + eps)
        assert abs(st.gamma / eps - 2) < 3 * eps and abs((st.energy - 4) / st.gamma**2 - 1) < 1e-3


def test_localized_normalization():
    st = localized_state(2.5)
    total = sum(abs(localized_eigenfunction(st, (0, j))) ** 2 for j in range(400)) * 2 * math.pi
    assert abs(total - 1) < 1e-12


def test_domain_errors():
    with pytest.raises(DomainError):
        LocalizedState(1.0)
    with pytest.raises(DomainError):
        ExtendedState(0.0, 0.0)
    with pytest.raises(DomainError):
        completeness_matrix([(0, -1)])


@pytest.mark.parametrize("v1,v2", [((0, 0), (0, 0)), ((0, 0), (1, 0)), ((0, 2), (0, 2))])
def test_completeness_examples(v1, v2):
    assert abs(completeness_defect(v1, v2)) < 1e-6


def test_completeness_refines():
    coarse = QuadratureSpec(n_theta=40, alpha_density=5.0)
    verts = [(0, 0), (1, 2), (3, 3)]
    rough = np.max(np.abs(completeness_matrix(verts, coarse)))
    fine = np.max(np.abs(completeness_matrix(verts)))
    assert fine < rough and fine < 1e-6

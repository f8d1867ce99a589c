import numpy as np
import pytest
from scipy.linalg import expm

from combwalk import DomainError, ToleranceNotReached, Truncation, WaveState, amplitude_exact, evolve, hamiltonian_matvec
from combwalk.evolution import chebyshev_coefficients, evolve_times, light_cone_truncation, truncation_for


def dense_h(tr):
    size = int(np.prod(tr.shape))
    H = np.zeros((size, size))
    for k in range(size):
        e = np.zeros(size)
        e[k] = 1
        H[:, k] = hamiltonian_matvec(e.reshape(tr.shape)).ravel()
    return H


def test_truncation_examples():
    assert truncation_for(0, 40) == Truncation(40, 40)
    assert truncation_for(50, 40) == Truncation(190, 190)
    with pytest.raises(DomainError):
        truncation_for(-1)


def test_boundary_shell_mass():
    st = evolve(WaveState.point(truncation_for(50), (0, 0)), 50)
    p = np.abs(st.amp) ** 2
    shell = p[:2, :].sum() + p[-2:, :].sum() + p[2:-2, -2:].sum()
    assert shell < 1e-10


def test_identity_at_zero():
    psi = WaveState.point(Truncation(5, 5), (1, 2))
    assert np.array_equal(evolve(psi, 0).amp, psi.amp)
    assert amplitude_exact((0, 0), (0, 0), 0) == 1
    assert amplitude_exact((0, 0), (1, 0), 0) == 0


def test_against_dense_expm(rng):
    tr = Truncation(4, 6)
    psi = rng.normal(size=tr.shape) + 1j * rng.normal(size=tr.shape)
    psi /= np.linalg.norm(psi)
    for t in (0.3, 2.5, 9.0):
        ref = expm(-1j * t * dense_h(tr)) @ psi.ravel()
        got = evolve(WaveState(tr, psi), t, tol=1e-12).amp.ravel()
        assert np.linalg.norm(got - ref) < 1e-11


@pytest.mark.parametrize("t", [1.0, 20.0, 100.0])
def test_unitarity(t):
    st = evolve(WaveState.point(light_cone_truncation(t), (0, 0)), t)
    assert abs(st.norm - 1) < 1e-9


def test_group_property():
    tr = truncation_for(14)
    psi = WaveState.point(tr, (0, 0))
    once = evolve(psi, 14.0)
    twice = evolve(evolve(psi, 7.0), 7.0)
    assert np.linalg.norm(once.amp - twice.amp) < 2e-10


def test_evolve_times_matches_direct():
    tr = truncation_for(10)
    psi = WaveState.point(tr, (0, 0))
    states = dict(evolve_times(psi, [2.0, 5.0, 10.0]))
    assert np.linalg.norm(states[10.0].amp - evolve(psi, 10.0).amp) < 3e-10
    with pytest.raises(DomainError):
        list(evolve_times(psi, [3.0, 1.0]))


def test_symmetries():
    t = 12.0
    for n, j in [(3, 2), (1, 0), (5, 7)]:
        a = amplitude_exact((0, 0), (n, j), t)
        assert abs(a - amplitude_exact((0, 0), (-n, j), t)) < 1e-13
        assert abs(a - np.conj(amplitude_exact((0, 0), (n, j), -t))) < 1e-10
        assert abs(a - amplitude_exact((n, j), (0, 0), t)) < 1e-10


def test_degree_cap_raises():
    with pytest.raises(ToleranceNotReached):
        chebyshev_coefficients(50.0, max_degree=20)

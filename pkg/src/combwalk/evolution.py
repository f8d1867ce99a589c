"""Brute-force propagation e^{-itH}|psi0> on a truncated comb.

The propagator is a Chebyshev expansion of x -> exp(-i t x) on the fixed
spectral interval [0, 6] (see :func:`combwalk.comb.spectral_bound`).  With
x = 3 + 3y,

    exp(-i t x) = exp(-3it) * sum_k (2 - delta_k0) (-i)^k J_k(3t) T_k(y),

so the coefficients are Bessel values and their tail gives a rigorous bound
on the truncation error because |T_k(y)| <= 1 on the spectrum.
"""
from __future__ import annotations

import math
from typing import Iterable, Iterator

import numpy as np
from scipy.special import jv

from .comb import Truncation, Vertex, WaveState, hamiltonian_matvec, spectral_bound
from .errors import DomainError, ToleranceNotReached

DEFAULT_TOL = 1e-10
DEFAULT_MARGIN = 40


def truncation_for(t: float, margin: int = DEFAULT_MARGIN) -> Truncation:
    """Window wide enough that a point source at the origin does not feel the edge by time ``t``."""
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t}")
    size = math.ceil(3 * t) + margin
    return Truncation(size, size)


def light_cone_truncation(t: float, margin: int = DEFAULT_MARGIN) -> Truncation:
    """Smaller window for observing sites near the origin only.

    Waves reflected at the edge must travel back to the origin before they
    matter.  Front speeds are 2 along teeth and 3*sqrt(3)/4 < 1.5 along the
    spine, so a round trip longer than ``t`` needs M > t and L > 0.75 t.
    """
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t}")
    return Truncation(math.ceil(0.75 * t) + margin, math.ceil(t) + margin)


def chebyshev_coefficients(t: float, tol: float = DEFAULT_TOL, max_degree: int | None = None) -> np.ndarray:
    """Expansion coefficients of exp(-i t x) in T_k((x - 3)/3), truncated adaptively.

    The degree is the smallest K for which every later coefficient is below
    ``tol/10`` and their summed magnitude is below ``tol/2``.
    """
    half = spectral_bound() / 2
    if max_degree is None:
        max_degree = int(16 * (abs(t) + 1))
    k = np.arange(max_degree + 64)
    bessel = jv(k, half * t)
    mags = 2.0 * np.abs(bessel)
    mags[0] /= 2.0
    tail = np.cumsum(mags[::-1])[::-1]  # tail[k] = sum_{m >= k} mags[m]
    ok = (tail <= tol / 2) & (np.maximum.accumulate(mags[::-1])[::-1] <= tol / 10)
    if not ok[max_degree + 1]:
        raise ToleranceNotReached(
            f"Chebyshev degree cap {max_degree} too small for t={t}, tol={tol:g}"
        )
    degree = max(int(np.argmax(ok)) - 1, 0)
    coeffs = (2.0 - (k[: degree + 1] == 0)) * (-1j) ** (k[: degree + 1] % 4) * bessel[: degree + 1]
    return coeffs * np.exp(-1j * half * t)


def _propagate(a: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
    half = spectral_bound() / 2
    result = coeffs[0] * a
    if len(coeffs) == 1:
        return result
    prev = a.copy()
    cur = hamiltonian_matvec(a)
    cur -= half * prev
    cur /= half
    result += coeffs[1] * cur
    scratch = np.empty_like(a)
    for c in coeffs[2:]:
        # next = 2 (H - 3)/3 cur - prev, written into prev's buffer
        hamiltonian_matvec(cur, out=scratch)
        scratch -= half * cur
        scratch *= 2.0 / half
        scratch -= prev
        prev, cur, scratch = cur, scratch, prev
        result += c * cur
    return result


def evolve(psi0: WaveState, t: float, tol: float = DEFAULT_TOL, max_degree: int | None = None) -> WaveState:
    """Return e^{-itH} psi0 on the window of ``psi0``, accurate to ``tol`` in 2-norm."""
    if t == 0:
        return WaveState(psi0.trunc, psi0.amp.copy())
    coeffs = chebyshev_coefficients(t, tol / max(psi0.norm, 1e-300), max_degree)
    return WaveState(psi0.trunc, _propagate(psi0.amp, coeffs))


def evolve_times(psi0: WaveState, times: Iterable[float], tol: float = DEFAULT_TOL) -> Iterator[tuple[float, WaveState]]:
    """Yield ``(t, state)`` for increasing ``times``, stepping from one to the next.

    ``tol`` is the error budget per step; errors accumulate at most linearly.
    """
    state, now = psi0, 0.0
    for t in times:
        if t < now:
            raise DomainError("times must be non-decreasing")
        state = evolve(state, t - now, tol)
        now = t
        yield t, state


def amplitude_exact(origin, target, t: float, tol: float = DEFAULT_TOL, margin: int = DEFAULT_MARGIN) -> complex:
    """Matrix element <target| e^{-itH} |origin> of the infinite comb.

    Uses translation invariance along the spine to place ``origin`` at n = 0
    and a window from :func:`truncation_for` enlarged to contain both sites.
    """
    origin, target = Vertex(*origin), Vertex(*target)
    if origin.j < 0 or target.j < 0:
        raise DomainError("tooth coordinates must be >= 0")
    base = truncation_for(abs(t), margin)
    dn = target.n - origin.n
    trunc = Truncation(base.L + abs(dn), base.M + max(origin.j, target.j))
    psi = WaveState.point(trunc, (0, origin.j))
    return evolve(psi, t, tol)[(dn, target.j)]

"""Asymptotic escape probabilities into the teeth and along the spine.

Spine probabilities count both directions n -> +inf and n -> -inf.
"""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from .asymptotics import U_C, _V2, tooth_saddles
from .contour import sqrt_cut, w_minus
from .errors import DomainError, QuadratureFailure

QUAD_TOL = 1e-13
SUM_CUTOFF = 1e-12


def _quad(f, a: float, b: float, what: str) -> float:
    val, err = quad(f, a, b, epsabs=QUAD_TOL, epsrel=QUAD_TOL, limit=400)
    if not np.isfinite(val) or err > 1e-9:
        raise QuadratureFailure(f"{what}: quadrature error estimate {err:.1e}")
    return float(val)


def _wminus_sq_lower(phi: float) -> float:
    """|w_-(e^{-i phi})|^2 on the lower unit circle (first sheet)."""
    return abs(w_minus(complex(math.cos(phi), -math.sin(phi)))) ** 2


def _tooth_weight(phi: float) -> float:
    # sin^2 phi / sqrt((5 + 3 cos phi)(1 - cos phi)) / pi, with 1 - cos = 2 sin^2(phi/2)
    return math.sin(phi) ** 2 / math.sqrt((5 + 3 * math.cos(phi)) * 2.0) / abs(math.sin(phi / 2)) / math.pi


@lru_cache(maxsize=None)
def prob_tooth(n: int) -> float:
    """P_T(n): probability of ending up in tooth n, starting at the origin."""
    m = abs(int(n))

    # phi = s^2 removes the sqrt(phi) behaviour of |w_-|^2 at phi = 0
    def f(s):
        phi = s * s
        if phi == 0:
            return 0.0
        return 2 * s * _tooth_weight(phi) * _wminus_sq_lower(phi) ** m

    # for large n the mass sits in boundary layers of width ~1/n^2 (phi = 0)
    # and ~1/n (phi = pi); split there so quad resolves both
    top = math.sqrt(math.pi)
    cuts = {0.0, top}
    if m > 1:
        for k in (1.0, 10.0, 100.0):
            if k / m < 1:
                cuts.add(k / m)
            if k / m < math.pi / 2:
                cuts.add(math.sqrt(math.pi - k / m))
    cuts = sorted(cuts)
    return sum(_quad(f, a, b, f"P_T({n})") for a, b in zip(cuts[:-1], cuts[1:]))


def prob_tooth_pole(n: int) -> float:
    """P_T(n) from the pole term 2 pi i int I(z) I(1/z) w_-(z)^|n| w_-(1/z)^|n| dz/z.

    The path is the upper unit circle from z = 1 to z = -1.  Complex
    arithmetic on both sheets of the square root is used throughout, so this
    is an independent evaluation of the same limit as :func:`prob_tooth`.
    """
    m = abs(int(n))

    def I(z):
        return (1 - z**-2) / sqrt_cut(z) / (2j * np.pi)

    def integrand(s, part):
        phi = s * s
        if phi == 0 or phi >= math.pi:
            return 0.0
        z = complex(math.cos(phi), math.sin(phi))
        val = 2j * np.pi * I(z) * I(1 / z) * (w_minus(z) * w_minus(1 / z)) ** m * 1j * 2 * s
        return val.real if part == 0 else val.imag

    re = _quad(lambda s: integrand(s, 0), 0.0, math.sqrt(math.pi), "pole route")
    im = _quad(lambda s: integrand(s, 1), 0.0, math.sqrt(math.pi), "pole route")
    if abs(im) > 1e-9:
        raise QuadratureFailure(f"pole-route value not real (imag {im:.2e})")
    return re


@lru_cache(maxsize=None)
def prob_teeth_total() -> float:
    """P_Teeth = sum_n P_T(n), resummed as a geometric series in |w_-|^2."""
    def f(s):
        phi = s * s
        if phi == 0:
            return 0.0
        q = _wminus_sq_lower(phi)
        return 2 * s * _tooth_weight(phi) * (1 + q) / (1 - q)

    return _quad(f, 0.0, math.sqrt(math.pi), "P_Teeth")


def prob_teeth_total_by_sum() -> float:
    """P_Teeth summed term by term over n until terms fall below the cutoff."""
    total = prob_tooth(0)
    n = 1
    while True:
        term = 2 * prob_tooth(n)
        total += term
        if term < SUM_CUTOFF:
            return total
        n += 1


def _spine_integral(weight) -> float:
    # z = -3 + s^2 absorbs sqrt(z + 3); the factor sqrt(1 - z) is smooth on [-3, -1]
    def f(s):
        z = -3.0 + s * s
        return 2.0 * weight(z) / math.sqrt(1 - z) / math.pi

    return _quad(f, 0.0, math.sqrt(2.0), "spine integral")


@lru_cache(maxsize=None)
def prob_spine_dist(j: int) -> float:
    """P_S(j): probability of ending at distance j from the spine (both spine directions)."""
    if j < 0:
        raise DomainError("j must be >= 0")
    return _spine_integral(lambda z: (1 - z**-2) ** 2 * z ** (-2 * j))


def prob_spine_total_by_sum(terms: int = 200) -> float:
    """Sum of P_S(j) for j < terms plus the exact geometric tail sum_{j >= terms}."""
    return sum(prob_spine_dist(j) for j in range(terms)) + prob_spine_total_j0(terms)


@lru_cache(maxsize=None)
def prob_spine_total() -> float:
    """P_Spine = sum_j P_S(j)."""
    return _spine_integral(lambda z: 1 - z**-2)


# ---------------------------------------------------------------- arbitrary start (0, j0)

def _j0_prefactor(z: complex, j0: int) -> complex:
    """Saddle prefactor on the initial tooth: direct plus spine-bounced wave."""
    bounce = (z - 1 / z) * z ** (-j0) / sqrt_cut(z)
    return ((z**j0 - z ** (-j0)) + bounce) / z / (2j * np.pi)


def profile_initial_tooth(u: float, j0: int) -> float:
    """c(u; 0, j0): coarse-grained t |A|^2 at j = u t on the initial tooth."""
    if not 0 < u < U_C:
        raise DomainError("profile needs 0 < u < 2")
    if j0 < 0:
        raise DomainError("j0 must be >= 0")
    return _profile_phi(tooth_saddles(u).phi, j0)


def _profile_phi(phi: float, j0: int) -> float:
    # parameterized by the saddle angle, u = 2 sin(phi), to stay accurate near u = 2
    u = 2 * math.sin(phi)
    zs = (complex(math.cos(phi), -math.sin(phi)), complex(-math.cos(phi), -math.sin(phi)))
    return 2 * math.pi * sum(abs(_j0_prefactor(z, j0)) ** 2 / abs(_V2(z, u)) for z in zs)


@lru_cache(maxsize=None)
def prob_tooth_j0(n: int, j0: int) -> float:
    """P_T(n, j0) = int_0^2 c(u; n, j0) du."""
    if j0 < 0:
        raise DomainError("j0 must be >= 0")
    if n != 0 or j0 == 0:
        return prob_tooth(n)
    # u = 2 sin(phi) removes the (2 - u)^-1/2 edge and phi = (pi/2) s^2 the
    # phi^(3/2) cross term at the branch point; Gauss-Legendre then resolves
    # the j0-frequency oscillations once the node count scales with j0
    prev = None
    nodes = 64 + 8 * j0
    while nodes < 20000:
        x, wts = np.polynomial.legendre.leggauss(nodes)
        s = (x + 1) / 2
        phi = math.pi / 2 * s * s
        vals = [_profile_phi(p, j0) * 2 * math.cos(p) * math.pi * si
                for p, si in zip(phi, s)]
        val = float(np.dot(wts, vals) / 2)
        if prev is not None and abs(val - prev) < 1e-12:
            return val
        prev = val
        nodes *= 2
    raise QuadratureFailure(f"P_T(0, j0={j0}) did not converge")


def prob_teeth_total_j0(j0: int) -> float:
    """Total teeth probability from (0, j0): only the initial tooth depends on j0."""
    return prob_teeth_total() - prob_tooth(0) + prob_tooth_j0(0, j0)


@lru_cache(maxsize=None)
def prob_spine_total_j0(j0: int) -> float:
    """Spine probability from (0, j0), from the shifted spine saddle prefactor z^-(j + j0)."""
    if j0 < 0:
        raise DomainError("j0 must be >= 0")
    return _spine_integral(lambda z: (1 - z**-2) * z ** (-2 * j0))

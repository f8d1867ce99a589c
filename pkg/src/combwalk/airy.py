"""Airy function Ai on [-20, 20] from its power series and large-|x| expansions."""
from __future__ import annotations

import math

import mpmath
import numpy as np

from .errors import RangeError

AI0_STR = "0.355028053887817239260063186004"  # Ai(0)
AIP0_STR = "-0.258819403792806798405183560189"  # Ai'(0)
AI0 = float(AI0_STR)
AIP0 = float(AIP0_STR)
SUPPORTED = 20.0
# Crossover between the two representations.  The power series cancels
# like e^{(2/3)|x|^{3/2}}, so it is summed with SERIES_DPS digits; the
# optimally truncated asymptotic series is near 1e-15 beyond these limits.
SERIES_LIMIT_NEG = 8.0
SERIES_LIMIT_POS = 6.0
SERIES_DPS = 30


def _series(x: float) -> float:
    with mpmath.workdps(SERIES_DPS):
        xm = mpmath.mpf(x)
        x3 = xm**3
        f = g = mpmath.mpf(0)
        tf, tg = mpmath.mpf(1), xm
        k = 0
        tiny = mpmath.mpf(10) ** (-SERIES_DPS)
        while True:
            f += tf
            g += tg
            k += 1
            tf *= x3 / ((3 * k - 1) * (3 * k))
            tg *= x3 / ((3 * k) * (3 * k + 1))
            if abs(tf) + abs(tg) < tiny:
                return float(mpmath.mpf(AI0_STR) * f + mpmath.mpf(AIP0_STR) * g)


def _u_coeffs(count: int) -> list[float]:
    u = [1.0]
    for k in range(1, count):
        u.append(u[-1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216 * k))
    return u


_U = _u_coeffs(40)


def _asymptotic(x: float) -> float:
    zeta = 2.0 / 3.0 * abs(x) ** 1.5
    if x > 0:
        total, term_prev = 0.0, math.inf
        for k, uk in enumerate(_U):
            term = (-1) ** k * uk / zeta**k
            if abs(term) > term_prev:
                break
            total += term
            term_prev = abs(term)
        return math.exp(-zeta) / (2 * math.sqrt(math.pi) * x**0.25) * total
    even = odd = 0.0
    prev = math.inf
    for k in range(len(_U) // 2):
        te = (-1) ** k * _U[2 * k] / zeta ** (2 * k)
        to = (-1) ** k * _U[2 * k + 1] / zeta ** (2 * k + 1)
        if abs(te) > prev:
            break
        even += te
        odd += to
        prev = abs(to)
    y = abs(x)
    phase = zeta + math.pi / 4
    return (math.sin(phase) * even - math.cos(phase) * odd) / (math.sqrt(math.pi) * y**0.25)


def _scalar(x: float) -> float:
    if not -SUPPORTED <= x <= SUPPORTED:
        raise RangeError(f"Ai supported on [-{SUPPORTED:g}, {SUPPORTED:g}], got {x}")
    return _series(x) if -SERIES_LIMIT_NEG <= x <= SERIES_LIMIT_POS else _asymptotic(x)


def airy_ai(x):
    """Airy function of the first kind, absolute error below 1e-10 on [-20, 20]."""
    if np.ndim(x) == 0:
        return _scalar(float(x))
    arr = np.asarray(x, dtype=float)
    return np.array([_scalar(v) for v in arr.ravel()]).reshape(arr.shape)

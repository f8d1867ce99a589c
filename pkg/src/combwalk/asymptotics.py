"""Large-t steepest-descent asymptotics of comb amplitudes and profiles.

Saddle contributions are evaluated in the w-plane, where the integrand of
the amplitude is

    G(w) e^{t W(w; u, v)} dw,   G = (1 - z^-2) / (2 pi i w),
    W(w; u, v) = i(z + 1/z - 2) - u log z - v log w,   z = w + 1/w - 1,

with u = j/t and v = |n|/t.  Because u t and v t are integers the principal
logarithms reproduce z^-j w^-|n| exactly.  A simple saddle w_s contributes

    G(w_s) e^{t W(w_s)} d sqrt(2 pi / (t |W''(w_s)|)),

where d is the unit steepest-descent direction oriented along the
counter-clockwise tangent i w_s of the circle through the saddle.  This
orientation rule is checked against the exact propagator in the tests.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gamma

from .airy import airy_ai
from .contour import potential_w, potential_w_derivatives, sqrt_cut, w_minus, w_plus, z_of_w
from .errors import DomainError, RootFindingFailure

U_C = 2.0
V_C = 3.0 * math.sqrt(3.0) / 4.0
W_CRIT = np.exp(-2j * np.pi / 3)  # spine saddles merge here at v = v_c (z = -2)
AIRY_WINDOW = 4.0
ROOT_TOL = 1e-12
CLUSTER_TOL = 1e-6

_poly = np.polynomial.polynomial


# ---------------------------------------------------------------- saddle algebra

def saddle_polynomial(u: float, v: float) -> np.ndarray:
    """Ascending coefficients of the degree-6 saddle polynomial in w.

    i(w-1)^3 (w+1)(w^2+1) - u (w+1)(w-1) w (w^2-w+1) - v w (w^2-w+1)^2,
    i.e. the numerator of dW/dw after clearing denominators.
    """
    a = 1j * _poly.polymul(_poly.polymul(_poly.polypow([-1, 1], 3), [1, 1]), [1, 0, 1])
    b = -u * _poly.polymul(_poly.polymul([-1, 0, 1], [0, 1]), [1, -1, 1])
    c = -v * _poly.polymul([0, 1], _poly.polypow([1, -1, 1], 2))
    out = np.zeros(7, dtype=complex)
    for p in (a, b, c):
        out[: len(p)] += p
    return out


def _polish(coeffs: np.ndarray, w: complex, steps: int = 8) -> complex:
    d1 = _poly.polyder(coeffs)
    for _ in range(steps):
        p = _poly.polyval(w, coeffs)
        dp = _poly.polyval(w, d1)
        if dp == 0:
            break
        step = p / dp
        w = w - step
        if abs(step) < 1e-17 * max(1.0, abs(w)):
            break
    return w


def _residual(coeffs: np.ndarray, w: complex) -> float:
    scale = float(np.sum(np.abs(coeffs) * np.abs(w) ** np.arange(len(coeffs))))
    return abs(_poly.polyval(w, coeffs)) / max(scale, 1.0)


def _cluster(coeffs: np.ndarray, roots: np.ndarray):
    """Group numerically split multiple roots; return (values, multiplicities)."""
    # A root of multiplicity m is only resolved to ~eps^(1/m); group loosely
    # and keep a group only if the derivatives confirm the multiplicity.
    remaining = list(roots)
    values, mults = [], []
    while remaining:
        w = remaining.pop(0)
        group = [w] + [r for r in remaining if abs(r - w) < 1e-3]
        for r in group[1:]:
            remaining.remove(r)
        m = len(group)
        ders = [coeffs]
        for _ in range(m - 1):
            ders.append(_poly.polyder(ders[-1]))
        # the mean of a split cluster is accurate; a root of multiplicity m is
        # a simple root of the (m-1)-th derivative, so refine it there
        centre = _polish(ders[-1], complex(np.mean(group))) if m > 1 else complex(group[0])
        if m > 1 and all(_residual(d, centre) < 1e-9 for d in ders):
            values.append(centre)
            mults.append(m)
            continue
        # not a genuine multiple root: keep members, merging only exact coincidences
        for r in group:
            r = _polish(coeffs, r)
            for k, existing in enumerate(values):
                if abs(existing - r) < CLUSTER_TOL:
                    mults[k] += 1
                    break
            else:
                values.append(r)
                mults.append(1)
    return np.array(values, dtype=complex), np.array(mults, dtype=int)


@dataclass(frozen=True, eq=False)
class SpineSaddles:
    """Roots of the w-plane saddle polynomial with potential data.

    ``roots`` lists distinct roots, ``multiplicity`` their multiplicities
    (summing to 6).  ``W`` and ``W2`` hold the potential and its second
    derivative at each root; ``relevant`` is filled in by the Stokes module.
    """

    u: float
    v: float
    roots: np.ndarray
    multiplicity: np.ndarray
    W: np.ndarray = field(repr=False)
    W2: np.ndarray = field(repr=False)
    relevant: np.ndarray | None = None

    def with_relevance(self, flags) -> "SpineSaddles":
        return SpineSaddles(self.u, self.v, self.roots, self.multiplicity, self.W, self.W2,
                            np.asarray(flags, dtype=bool))


def spine_saddles(u: float, v: float) -> SpineSaddles:
    """All six saddles of W(w; u, v), polished, with multiplicities."""
    if u < 0 or v < 0:
        raise DomainError("velocities must be >= 0")
    coeffs = saddle_polynomial(u, v)
    roots, mult = _cluster(coeffs, _poly.polyroots(coeffs))
    for w, m in zip(roots, mult):
        if m == 1 and _residual(coeffs, w) > ROOT_TOL:
            raise RootFindingFailure(f"saddle residual {_residual(coeffs, w):.2e} at w={w} (u={u}, v={v})")
    W = np.array([potential_w(w, u, v) for w in roots])
    W2 = np.array([potential_w_derivatives(w, u, v)[1] for w in roots])
    return SpineSaddles(float(u), float(v), roots, mult, W, W2)


def _sylvester_discriminant(coeffs: np.ndarray) -> complex:
    """Resultant of p and p' via the Sylvester matrix (up to a constant factor)."""
    p = coeffs[::-1]
    dp = _poly.polyder(coeffs)[::-1]
    m, n = len(p) - 1, len(dp) - 1
    size = m + n
    S = np.zeros((size, size), dtype=complex)
    for r in range(n):
        S[r, r: r + m + 1] = p
    for r in range(m):
        S[n + r, r: r + n + 1] = dp
    return complex(np.linalg.det(S))


def critical_velocities() -> tuple[float, float]:
    """(u_c, v_c) = (2, 3 sqrt(3)/4): tooth and spine front speeds."""
    return U_C, V_C


def v_c_from_discriminant(guess: float = 1.3, tol: float = 1e-14) -> float:
    """Spine front speed as the root of the u = 0 saddle-polynomial discriminant.

    Secant iteration in v on the Sylvester-determinant discriminant, started
    near the merge; independent of the closed form 3 sqrt(3)/4.
    """
    def disc(v):
        return _sylvester_discriminant(saddle_polynomial(0.0, v))

    v0, v1 = guess, guess + 1e-3
    f0, f1 = disc(v0), disc(v1)
    for _ in range(100):
        if f1 == f0:
            break
        v2 = v1 - f1 * (v1 - v0) / (f1 - f0)
        v0, f0 = v1, f1
        v1, f1 = v2, disc(v2)
        if abs(v1 - v0) < tol:
            break
    return float(np.real(v1))


# ---------------------------------------------------------------- generic saddle term

def _prefactor(w: complex, j: int = 0) -> complex:
    z = z_of_w(w)
    return (1 - z**-2) / w / (2j * np.pi) * z ** (-j)


def _descent_direction(w: complex, W2: complex) -> complex:
    d = np.sqrt(-abs(W2) / W2)
    return d if (d * np.conj(1j * w)).real >= 0 else -d


def saddle_contribution(w: complex, t: float, u: float, v: float, extra: complex = 1.0) -> complex:
    """Leading steepest-descent term of a simple saddle w of W(.; u, v).

    ``extra`` multiplies the prefactor (for instance w^-|n| or z^-j factors
    not absorbed into the potential).
    """
    W = potential_w(w, u, v)
    W2 = potential_w_derivatives(w, u, v)[1]
    d = _descent_direction(w, W2)
    return complex(_prefactor(w) * extra * np.exp(t * W) * d * np.sqrt(2 * np.pi / (t * abs(W2))))


# ---------------------------------------------------------------- return amplitude

@dataclass(frozen=True)
class ReturnBreakdown:
    """Terms of the large-t return amplitude.

    ``branch``: z = -3 (w = -1), order t^-1/2.
    ``saddle_one``: quartic w-saddle at z = 1, order t^-3/4.
    ``saddle_minus_one``: z = -1 (w = +-i); the t^-1 and t^-3/2 orders
    both cancel there, so it is zero at the retained order.
    """

    branch: complex
    saddle_one: complex
    saddle_minus_one: complex

    @property
    def total(self) -> complex:
        return self.branch + self.saddle_one + self.saddle_minus_one


BRANCH_RETURN_COEFF = 2.0 / (3.0 * math.sqrt(2.0 * math.pi))
QUARTIC_RETURN_COEFF = math.sqrt(2.0) / (4.0 * math.pi) * gamma(0.75)


def return_amplitude_asymptotic(t: float) -> tuple[complex, ReturnBreakdown]:
    """A_t(0,0;0,0) to order t^-3/4; the remainder is O(t^-5/4).

    The leading probability is |A|^2 t -> 2/(9 pi) ~ 0.0707.
    """
    if t <= 0:
        raise DomainError("t must be > 0")
    branch = BRANCH_RETURN_COEFF * np.exp(1j * np.pi / 4) * np.exp(-16j * t / 3) / math.sqrt(t)
    quartic = QUARTIC_RETURN_COEFF * np.exp(-3j * np.pi / 8) * t**-0.75
    parts = ReturnBreakdown(complex(branch), complex(quartic), 0j)
    return parts.total, parts


# ---------------------------------------------------------------- teeth

@dataclass(frozen=True)
class ToothSaddles:
    u: float
    z_plus: complex
    z_minus: complex
    phi: float | None = None
    psi: float | None = None


def tooth_saddles(u: float) -> ToothSaddles:
    """Saddles of V_u(z) = i(z + 1/z - 2) - u log z."""
    if u < 0:
        raise DomainError("u must be >= 0")
    if u < U_C:
        phi = math.asin(u / 2)
        return ToothSaddles(u, complex(np.exp(-1j * phi)), complex(-np.exp(1j * phi)), phi=phi)
    if u == U_C:
        return ToothSaddles(u, -1j, -1j, phi=math.pi / 2, psi=0.0)
    psi = math.acosh(u / 2)
    return ToothSaddles(u, -1j * math.exp(psi), -1j * math.exp(-psi), psi=psi)


def _I(z):
    return (1 - z**-2) / sqrt_cut(z) / (2j * np.pi)


def _V2(z, u):
    return 2j / z**3 + u / z**2


AIRY_C2 = complex(-2j / sqrt_cut(-1j))  # |c2|^2 = 2/sqrt(5)


def tooth_decay_rate(u: float) -> float:
    """varpi(u) = u log((u + sqrt(u^2-4))/2) - sqrt(u^2-4), u >= 2."""
    if u < U_C:
        raise DomainError("evanescent regime needs u >= 2")
    r = math.sqrt(u * u - 4)
    return u * math.log((u + r) / 2) - r


def tooth_tail_exponent(u: float) -> float:
    """chi(u) = log((u + sqrt(u^2-4))/2), u >= 2."""
    if u < U_C:
        raise DomainError("evanescent regime needs u >= 2")
    return math.log((u + math.sqrt(u * u - 4)) / 2)


def tooth_evanescent_prefactor(u: float) -> complex:
    """e(u) of A ~ e(u) e^{-2it} i^j t^-1/2 e^{-t varpi}, from the saddle z_+ = -i e^psi."""
    if u <= U_C:
        raise DomainError("evanescent regime needs u > 2")
    z = -1j * math.exp(math.acosh(u / 2))
    V2 = _V2(z, u)
    # steepest descent through z_+ runs parallel to the real axis (positive orientation)
    d = np.sqrt(-abs(V2) / V2)
    if d.real < 0:
        d = -d
    return complex(_I(z) * d * np.sqrt(2 * np.pi / abs(V2)))


def tooth_regime(j: int, t: float, window: float = AIRY_WINDOW) -> str:
    """'oscillatory', 'airy' or 'evanescent' for the site j at time t."""
    u = j / t
    if abs(u - U_C) <= window * t ** (-2.0 / 3.0):
        return "airy"
    return "oscillatory" if u < U_C else "evanescent"


def tooth_amplitude_asymptotic(n: int, j: int, t: float, window: float = AIRY_WINDOW) -> complex:
    """Leading large-t amplitude A_t(0,0;n,j) for |n| = O(1), regime chosen from u = j/t."""
    if t <= 0 or j < 0:
        raise DomainError("need t > 0 and j >= 0")
    u = j / t
    regime = tooth_regime(j, t, window)
    m = abs(n)
    if regime == "airy":
        jhat = (j - 2 * t) / t ** (1.0 / 3.0)
        return complex(AIRY_C2 * w_minus(-1j) ** m * np.exp(-2j * t) * 1j ** (j % 4)
                       * t ** (-1.0 / 3.0) * airy_ai(jhat))
    s = tooth_saddles(u)
    zs = (s.z_plus, s.z_minus) if regime == "oscillatory" else (s.z_plus,)
    total = 0j
    for z in zs:
        w = w_plus(z)
        total += saddle_contribution(w, t, u, 0.0, extra=w ** (-m))
    return total


def coarse_profile_tooth(u: float, n: int = 0) -> float:
    """c(u, n): t times the window-averaged probability at j = u t on tooth n."""
    if not 0 < u < U_C:
        raise DomainError("coarse tooth profile needs 0 < u < 2")
    s = tooth_saddles(u)
    total = 0.0
    for z in (s.z_plus, s.z_minus):
        total += abs(_I(z)) ** 2 * abs(w_minus(z)) ** (2 * abs(n)) / abs(_V2(z, u))
    return 2 * math.pi * total


def _tooth_saddle_weights(u: float) -> tuple[float, float]:
    """t |A|^2 carried by each tooth saddle: u^2 / (2 pi r sqrt(8 + 3u^2 -+ 4r)), r = sqrt(4 - u^2).

    On the saddles |V''| = r, |1 - z^-2| = u and |S(z)|^2 = sqrt(8 + 3u^2 -+ 4r).
    """
    r = math.sqrt(4 - u * u)
    pref = u * u / (2 * math.pi * r)
    return pref / math.sqrt(8 + 3 * u * u - 4 * r), pref / math.sqrt(8 + 3 * u * u + 4 * r)


def coarse_profile_tooth_closed(u: float) -> float:
    """Closed form of c(u, 0)."""
    if not 0 < u < U_C:
        raise DomainError("coarse tooth profile needs 0 < u < 2")
    return sum(_tooth_saddle_weights(u))


def tooth_bounds(u: float) -> tuple[float, float]:
    """(d_-(u), d_+(u)) = (sqrt(p_+) -+ sqrt(p_-))^2: envelope of the two-saddle interference."""
    if not 0 < u < U_C:
        raise DomainError("tooth bounds need 0 < u < 2")
    p1, p2 = _tooth_saddle_weights(u)
    return (math.sqrt(p1) - math.sqrt(p2)) ** 2, (math.sqrt(p1) + math.sqrt(p2)) ** 2


# ---------------------------------------------------------------- spine

def spine_arc_saddles(v: float) -> tuple[complex, complex]:
    """The two u = 0 saddles on the lower-left unit arc (0 < v < v_c).

    Returned as (w1, w2) with w1 the continuation of w = -1 (z = -3) and w2
    the continuation of w = -i (z = -1).
    """
    if not 0 <= v < V_C:
        raise DomainError("arc saddles exist for 0 <= v < v_c")
    ss = spine_saddles(0.0, v)
    arc = [w for w in ss.roots if abs(abs(w) - 1) < 1e-6 and w.real < 1e-12 and w.imag < 1e-12]
    if v == 0:
        return complex(-1), complex(-1j)
    if len(arc) != 2:
        raise RootFindingFailure(f"expected two arc saddles at v={v}, found {len(arc)}")
    arc.sort(key=lambda w: w.imag, reverse=True)  # w1 nearer -1
    return complex(arc[0]), complex(arc[1])


def spine_outer_saddle(v: float) -> complex:
    """For v > v_c, the saddle leaving the arc with Re W < 0 (|w| > 1)."""
    if v <= V_C:
        raise DomainError("single-saddle regime needs v > v_c")
    ss = spine_saddles(0.0, v)
    cand = [(w, W) for w, W in zip(ss.roots, ss.W)
            if w.real < 0 and w.imag < 0 and abs(w) > 1 + 1e-9]
    if len(cand) != 1:
        raise RootFindingFailure(f"expected one outer saddle at v={v}, found {len(cand)}")
    return complex(cand[0][0])


def spine_decay_rate(v: float) -> float:
    """chi(v) = -Re W(w2'; 0, v) > 0 for v > v_c."""
    return float(-np.real(potential_w(spine_outer_saddle(v), 0.0, v)))


def _spine_airy_scale() -> float:
    # third w-derivative of W at the merge point, evaluated analytically
    w = W_CRIT
    z = z_of_w(w)
    z1, z2, z3 = 1 - 1 / w**2, 2 / w**3, -6 / w**4
    dv1 = 1j * (1 - 1 / z**2)
    dv2 = 2j / z**3
    dv3 = -6j / z**4
    f3 = dv3 * z1**3 + 3 * dv2 * z1 * z2 + dv1 * z3 - 2 * V_C / w**3
    return float(np.real(f3))


def spine_regime(n: int, t: float, window: float = AIRY_WINDOW) -> str:
    v = abs(n) / t
    if abs(v - V_C) <= window * t ** (-2.0 / 3.0):
        return "airy"
    return "oscillatory" if v < V_C else "evanescent"


def spine_amplitude_asymptotic(n: int, j: int, t: float, window: float = AIRY_WINDOW) -> complex:
    """Leading large-t amplitude A_t(0,0;n,j) for j = O(1), regime chosen from v = |n|/t."""
    if t <= 0 or j < 0:
        raise DomainError("need t > 0 and j >= 0")
    m = abs(n)
    v = m / t
    regime = spine_regime(n, t, window)
    if regime == "airy":
        f3 = _spine_airy_scale()
        scale = (2.0 / f3) ** (1.0 / 3.0)
        nhat = (m - V_C * t) / t ** (1.0 / 3.0)
        w = W_CRIT
        z = z_of_w(w)
        kappa = w * scale
        # integral over the merged saddle: e^{t V0(z_c)} w_c^-n t^-1/3 kappa Ai(nhat scale)
        pref = (1 - z**-2) / w * z ** (-j)
        return complex(pref * kappa * w ** (-m) * np.exp(1j * t * (z + 1 / z - 2))
                       * t ** (-1.0 / 3.0) * airy_ai(nhat * scale))
    if v == 0:
        raise DomainError("spine asymptotics need n != 0 (use return_amplitude_asymptotic)")
    ws = spine_arc_saddles(v) if regime == "oscillatory" else (spine_outer_saddle(v),)
    total = 0j
    for w in ws:
        total += saddle_contribution(w, t, 0.0, v, extra=z_of_w(w) ** (-j))
    return total


def coarse_profile_spine(v: float, j: int = 0) -> float:
    """t times the window-averaged probability at n = v t (one direction), row j."""
    if not 0 < v < V_C:
        raise DomainError("coarse spine profile needs 0 < v < v_c")
    total = 0.0
    for w in spine_arc_saddles(v):
        W2 = potential_w_derivatives(w, 0.0, v)[1]
        total += abs(_prefactor(w, j)) ** 2 / abs(W2)
    return 2 * math.pi * total

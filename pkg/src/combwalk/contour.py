"""Contour-integral representation of the comb propagator.

The amplitude from ``(0, j0)`` to ``(n, j)`` is

    A = delta_{n0} A0 + (1/2 pi i) oint (1 - z^-2)/S(z) w_-(z)^|n| z^-(j+j0) e^{t V0(z)} dz
    A0 = (1/2 pi i) oint z^(-j-1) (z^j0 - z^-j0) e^{t V0(z)} dz

with V0(z) = i(z + 1/z - 2), S(z) = sqrt((z+3)(z-1)) cut along [-3, 1] and
w_-(z) = 1/w_+(z).  The contour encircles the cut (and z = 0) once
counter-clockwise.  Under z = w + 1/w - 1 the ellipse with foci -3 and 1,
z = -1 + 2 cosh(rho + i phi), is the circle |w| = e^rho and dz/S = dw/w.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Literal

import mpmath
import numpy as np

from .errors import DomainError, OnCutError, QuadratureDivergence

FIRST = "first"
SECOND = "second"

DEFAULT_RHO = 0.4
CUT_LEFT, CUT_RIGHT = -3.0, 1.0
EPS = np.finfo(float).eps


def _on_cut(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    # the branch points themselves are fine: S vanishes there on both sheets
    return (z.imag == 0) & (z.real > CUT_LEFT) & (z.real < CUT_RIGHT)


def sqrt_cut(z):
    """First-sheet S(z) = sqrt((z+3)(z-1)): analytic off [-3, 1], positive for z > 1, zero at -3 and 1.

    Built as a product of principal roots, whose individual cuts cancel on
    (-inf, -3).  Accepts scalars or arrays.
    """
    zc = np.asarray(z, dtype=complex)
    if np.any(_on_cut(zc)):
        raise OnCutError("S(z) is undefined on the cut [-3, 1]")
    s = np.sqrt(zc + 3) * np.sqrt(zc - 1)
    return complex(s) if s.ndim == 0 else s


@dataclass(frozen=True)
class CutPoint:
    """A point of the two-sheeted surface of S."""

    z: complex
    sheet: Literal["first", "second"] = FIRST

    def __post_init__(self):
        if self.sheet not in (FIRST, SECOND):
            raise DomainError(f"sheet must be 'first' or 'second', got {self.sheet!r}")

    @property
    def S(self) -> complex:
        s = sqrt_cut(self.z)
        return s if self.sheet == FIRST else -s

    @property
    def w(self) -> complex:
        """Image in the w-plane: |w| > 1 on the first sheet, |w| < 1 on the second."""
        return (1 + self.z) / 2 + self.S / 2


def w_plus(z):
    return (1 + np.asarray(z, dtype=complex)) / 2 + sqrt_cut(z) / 2 if np.ndim(z) else (1 + z) / 2 + sqrt_cut(z) / 2


def w_minus(z):
    return (1 + np.asarray(z, dtype=complex)) / 2 - sqrt_cut(z) / 2 if np.ndim(z) else (1 + z) / 2 - sqrt_cut(z) / 2


def z_of_w(w):
    """Inverse of the w-map: z = w + 1/w - 1 (both sheets)."""
    if np.any(np.asarray(w) == 0):
        raise DomainError("z(w) is singular at w = 0")
    return w + 1 / w - 1


def potential(z, u: float = 0.0, v: float = 0.0):
    """V(z; u, v) = i(z + 1/z - 2) - u log z - v log w_+(z), principal logs."""
    if np.any(np.asarray(z) == 0):
        raise DomainError("potential is singular at z = 0")
    out = 1j * (z + 1 / z - 2)
    if u:
        out = out - u * np.log(z)
    if v:
        out = out - v * np.log(w_plus(z))
    return out


def potential_w(w, u: float = 0.0, v: float = 0.0):
    """W(w; u, v) = i(z + 1/z - 2) - u log z - v log w with z = z(w)."""
    z = z_of_w(w)
    if np.any(z == 0):
        raise DomainError("potential is singular where z(w) = 0")
    out = 1j * (z + 1 / z - 2)
    if u:
        out = out - u * np.log(z)
    if v:
        out = out - v * np.log(w)
    return out


def potential_w_derivatives(w, u: float = 0.0, v: float = 0.0):
    """First and second w-derivatives of W(w; u, v)."""
    z = w + 1 / w - 1
    z1 = 1 - 1 / w**2
    z2 = 2 / w**3
    dv = 1j * (1 - 1 / z**2) - u / z  # dW/dz at fixed w-term
    ddv = 2j / z**3 + u / z**2
    first = dv * z1 - v / w
    second = ddv * z1**2 + dv * z2 + v / w**2
    return first, second


@dataclass(frozen=True)
class ContourSpec:
    """Closed contour around the cut [-3, 1].

    ``kind="ellipse"`` uses z = -1 + 2 cosh(rho + i phi) with trapezoid
    nodes (``rho=None`` picks the offset minimizing rounding error per call); ``kind="polyline"`` takes CCW ``vertices`` with Gauss-Legendre
    nodes per edge.  ``nodes`` is the starting node count, doubled until two
    successive estimates agree.  ``dps`` switches to mpmath arithmetic with
    that many digits (None: double precision, or automatic when ``dps="auto"``).
    """

    kind: Literal["ellipse", "polyline"] = "ellipse"
    rho: float | None = None
    nodes: int = 64
    max_nodes: int = 1 << 16
    vertices: tuple = field(default=())
    dps: int | str | None = None

    def __post_init__(self):
        if self.kind not in ("ellipse", "polyline"):
            raise DomainError(f"unknown contour kind {self.kind!r}")
        if self.kind == "ellipse" and self.rho is not None and not self.rho > 0:
            raise DomainError("ellipse offset rho must be > 0")
        if self.kind == "polyline":
            if len(self.vertices) < 3:
                raise DomainError("polyline contour needs at least 3 vertices")
            if _winding_number(self.vertices, 0.0) != 1 or _winding_number(self.vertices, -3.0) != 1 \
                    or _winding_number(self.vertices, 1.0) != 1:
                raise DomainError("polyline must wind once counter-clockwise around [-3, 1]")
            if _polyline_touches_cut(self.vertices):
                raise DomainError("polyline touches the cut")
            if self.dps is not None:
                raise DomainError("extended precision is only implemented for the ellipse contour")

    def nodes_and_weights(self, count: int):
        """Quadrature nodes z_k and weights so that sum f(z_k) dz_k ~ oint f dz."""
        if self.kind == "ellipse":
            if self.rho is None:
                raise DomainError("resolve rho with best_rho() before sampling nodes")
            phi = 2 * np.pi * np.arange(count) / count
            s = self.rho + 1j * phi
            z = -1 + 2 * np.cosh(s)
            dz = 2j * np.sinh(s) * (2 * np.pi / count)
            return z, dz
        per_edge = max(count // len(self.vertices), 4)
        x, wts = np.polynomial.legendre.leggauss(per_edge)
        verts = np.asarray(self.vertices, dtype=complex)
        a, b = verts, np.roll(verts, -1)
        z = ((a + b)[:, None] + (b - a)[:, None] * x[None, :]) / 2
        dz = ((b - a)[:, None] / 2) * wts[None, :]
        return z.ravel(), dz.ravel()


def _ellipse_nodes_mp(rho: float, count: int):
    """Ellipse nodes and weights computed at the current mpmath precision."""
    h = 2 * mpmath.pi / count
    for k in range(count):
        s = mpmath.mpc(rho, k * h)
        yield -1 + 2 * mpmath.cosh(s), 2j * mpmath.sinh(s) * h


def _winding_number(vertices, point: complex) -> int:
    v = np.asarray(vertices, dtype=complex) - point
    angles = np.angle(np.roll(v, -1) / v)
    return int(round(angles.sum() / (2 * np.pi)))


def _polyline_touches_cut(vertices) -> bool:
    verts = np.asarray(vertices, dtype=complex)
    for a, b in zip(verts, np.roll(verts, -1)):
        if a.imag == b.imag == 0:
            lo, hi = sorted((a.real, b.real))
            if hi >= CUT_LEFT and lo <= CUT_RIGHT:
                return True
        elif (a.imag <= 0 <= b.imag) or (b.imag <= 0 <= a.imag):
            x = a.real + (b.real - a.real) * (-a.imag) / (b.imag - a.imag)
            if CUT_LEFT <= x <= CUT_RIGHT:
                return True
    return False


def _integrand(z, dz, n: int, j: int, t: float, j0: int):
    s = sqrt_cut(z)
    wm = (1 + z) / 2 - s / 2
    phase = np.exp(1j * t * (z + 1 / z - 2))
    f = (1 - z**-2) / s * wm ** abs(n) * z ** (-(j + j0))
    if n == 0 and j0:
        f = f + z ** (-j - 1) * (z**j0 - z ** (-j0))
    return f * phase * dz / (2j * np.pi)


def _integrand_mp(z, dz, n: int, j: int, t: float, j0: int):
    s = mpmath.sqrt(z + 3) * mpmath.sqrt(z - 1)
    wm = (1 + z) / 2 - s / 2
    f = (1 - z**-2) / s * wm ** abs(n) * z ** (-(j + j0))
    if n == 0 and j0:
        f += z ** (-j - 1) * (z**j0 - z ** (-j0))
    return f * mpmath.exp(1j * t * (z + 1 / z - 2)) * dz / (2j * mpmath.pi)


def condition_estimate(n: int, j: int, t: float, j0: int = 0, spec: ContourSpec | None = None) -> float:
    """Largest integrand term relative to a unit result; rounding error ~ eps times this."""
    spec = spec if spec is not None and spec.rho is not None else ContourSpec(rho=DEFAULT_RHO)
    z, dz = spec.nodes_and_weights(max(spec.nodes, 256))
    with np.errstate(over="ignore"):
        terms = _integrand(z, dz, n, j, t, j0)
    return float(np.max(np.abs(terms)) * len(z))


RHO_GRID = np.arange(0.2, 1.2001, 0.025)


def best_rho(n: int, j: int, t: float, j0: int = 0) -> float:
    """Ellipse offset with the smallest cancellation estimate.

    Small rho brings the contour close to the cut where 1/S and e^{t Re V0}
    grow; large rho sends it near z = 0 where z^-j and e^{i t/z} blow up.
    """
    conds = [condition_estimate(n, j, t, j0, ContourSpec(rho=float(r))) for r in RHO_GRID]
    return float(RHO_GRID[int(np.argmin(conds))])


def amplitude_contour(n: int, j: int, t: float, j0: int = 0, spec: ContourSpec | None = None,
                      tol: float = 1e-9) -> complex:
    """A_t(0, j0; n, j) by quadrature on a closed contour around the cut.

    Raises QuadratureDivergence when the estimated rounding error in double
    precision exceeds ``tol``; pass ``ContourSpec(dps="auto")`` to fall back
    to mpmath arithmetic instead.
    """
    if spec is None:
        spec = ContourSpec()
    if t < 0 or j < 0 or j0 < 0:
        raise DomainError("need t >= 0, j >= 0, j0 >= 0")
    if spec.kind == "ellipse" and spec.rho is None:
        spec = replace(spec, rho=best_rho(n, j, t, j0))
    cond = condition_estimate(n, j, t, j0, spec)
    dps = spec.dps
    if dps == "auto":
        dps = None if cond * EPS < tol else int(math.ceil(math.log10(cond / tol))) + 5
    if dps is None and cond * EPS > tol:
        raise QuadratureDivergence(
            f"cancellation ~{cond * EPS:.1e} exceeds tol={tol:g} at t={t}; "
            "use asymptotics, a different rho, or extended precision"
        )
    count = max(spec.nodes, 2 * (abs(n) + j + j0) + 16)
    previous = None
    while count <= spec.max_nodes:
        if dps is None:
            z, dz = spec.nodes_and_weights(count)
            value = complex(np.sum(_integrand(z, dz, n, j, t, j0)))
        else:
            with mpmath.workdps(dps):
                value = complex(mpmath.fsum(_integrand_mp(zk, dzk, n, j, t, j0)
                                            for zk, dzk in _ellipse_nodes_mp(spec.rho, count)))
        if previous is not None and abs(value - previous) <= tol:
            return value
        previous = value
        count *= 2
    raise QuadratureDivergence(f"no convergence with {spec.max_nodes} nodes (t={t}, n={n}, j={j}, j0={j0})")

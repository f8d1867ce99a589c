"""Steepest-descent geometry of W(w; u, v) and the Stokes structure of the (u, v) quadrant.

Relevance of a saddle is decided by its intersection number with the
original contour, a circle |w| = R that may be taken arbitrarily large
(all singular points of the integrand lie in |w| <= 1).  Following the
steepest-ascent curves out of a saddle, that number is +-1 exactly when one
ascent curve escapes to w = infinity and the other ends on a finite hill
(w = 0 or w = e^{+-i pi/3}); otherwise it is 0.  The descent path through
a relevant saddle is then oriented so that it crosses the escaping ascent
curve the same way the large circle does.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import fsolve, linear_sum_assignment

from .asymptotics import (SpineSaddles, _prefactor, return_amplitude_asymptotic, saddle_polynomial,
                          spine_amplitude_asymptotic, spine_regime, spine_saddles,
                          tooth_amplitude_asymptotic, tooth_regime)
from .contour import potential_w, potential_w_derivatives
from .errors import ClassificationAmbiguous, DomainError, StallError

POLES = (0j, complex(np.exp(1j * np.pi / 3)), complex(np.exp(-1j * np.pi / 3)))
POLE_LABELS = ("w=0", "e^{i pi/3}", "e^{-i pi/3}")
VALLEY_RADIUS = 1e-3
FAR_RADIUS = 1e3
ESCAPE_RADIUS = 30.0
IM_TOL = 1e-8
ZERO_TOL = 1e-8
STOKES_TUBE = 1e-3
MAX_STEPS = 200000


def _dW(w1: complex, w0: complex, u: float, v: float) -> complex:
    """W(w1) - W(w0) along a short segment, keeping the logarithms continuous."""
    z1, z0 = w1 + 1 / w1 - 1, w0 + 1 / w0 - 1
    out = 1j * (z1 + 1 / z1 - z0 - 1 / z0)
    if u:
        out -= u * np.log(z1 / z0)
    if v:
        out -= v * np.log(w1 / w0)
    return out


def _dW1(w: complex, u: float, v: float) -> complex:
    return potential_w_derivatives(w, u, v)[0]


@dataclass(frozen=True, eq=False)
class DescentPath:
    """Steepest path from a saddle; ``kind`` is 'descent' or 'ascent'."""

    seed: complex
    points: np.ndarray = field(repr=False)
    terminal: str
    kind: str = "descent"
    im_drift: float = 0.0
    re_values: np.ndarray = field(default=None, repr=False)


def _step_size(w: complex) -> float:
    dist = min(abs(w - p) for p in POLES)
    return max(min(0.02 * dist, 0.02 * max(1.0, abs(w)), 0.05), 1e-12)


def _terminal(w: complex, sign: int) -> str | None:
    if abs(w) > FAR_RADIUS:
        return "infinity"
    # beyond ESCAPE_RADIUS the flow is dominated by i w: ascent runs down and
    # descent runs up, so a path in that half plane can no longer come back
    if abs(w) > ESCAPE_RADIUS and sign * w.imag < 0:
        return "infinity"
    for p, label in zip(POLES, POLE_LABELS):
        if abs(w - p) < VALLEY_RADIUS:
            return label
    return None


def _trace(w_s: complex, direction: complex, u: float, v: float, sign: int,
           avoid=(), kind: str = "descent") -> tuple[DescentPath, float]:
    """Follow the gradient flow of sign * Re W from w_s, starting along ``direction``.

    Returns the path and the closest approach to any saddle in ``avoid``.
    """
    w = w_s + 1e-4 * direction
    im0 = 0.0  # Im W relative to the saddle, tracked incrementally
    rel = _dW(w, w_s, u, v)
    re_vals = [0.0, rel.real]
    im_now = rel.imag
    pts = [w_s, w]
    closest = math.inf

    def flow(x):
        g = np.conj(_dW1(x, u, v))
        a = abs(g)
        if a == 0:
            raise StallError(f"flow stalled at a critical point near w={x}")
        return sign * g / a

    for _ in range(MAX_STEPS):
        term = _terminal(w, sign)
        if term is not None:
            break
        h = _step_size(w)
        while True:
            if h < 1e-11:
                raise StallError(f"step size underflow on the {kind} path at w={w}")
            k1 = flow(w)
            k2 = flow(w + h / 2 * k1)
            k3 = flow(w + h / 2 * k2)
            k4 = flow(w + h * k3)
            w_new = w + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            # project back onto the level set Im W = Im W(w_s)
            for _ in range(3):
                d = _dW(w_new, w, u, v)
                drift = im_now + d.imag - im0
                if abs(drift) < 1e-13:
                    break
                w_new = w_new - 1j * drift / _dW1(w_new, u, v)
            d = _dW(w_new, w, u, v)
            # reject steps that leave the level set or fail to move along the flow
            if abs(im_now + d.imag - im0) < IM_TOL and sign * d.real > 0:
                break
            h /= 2
        im_now += d.imag
        re_vals.append(re_vals[-1] + d.real)
        w = w_new
        pts.append(w)
        for other in avoid:
            closest = min(closest, abs(w - other))
    else:
        raise StallError(f"path from {w_s} did not reach a valley in {MAX_STEPS} steps")
    path = DescentPath(complex(w_s), np.array(pts), term, kind, abs(im_now - im0), np.array(re_vals))
    return path, closest


def _directions(w_s: complex, u: float, v: float):
    W2 = potential_w_derivatives(w_s, u, v)[1]
    if abs(W2) < 1e-10:
        raise StallError(f"degenerate saddle at w={w_s}")
    descent = np.sqrt(-abs(W2) / W2)
    ascent = np.sqrt(abs(W2) / W2)
    return complex(descent), complex(ascent)


def trace_descent(w_s: complex, u: float, v: float) -> tuple[DescentPath, DescentPath]:
    """Both steepest-descent branches out of the simple saddle ``w_s``."""
    d, _ = _directions(w_s, u, v)
    return _trace(w_s, d, u, v, -1)[0], _trace(w_s, -d, u, v, -1)[0]


def trace_ascent(w_s: complex, u: float, v: float, avoid=()) -> tuple[DescentPath, DescentPath, float]:
    _, a = _directions(w_s, u, v)
    p1, c1 = _trace(w_s, a, u, v, +1, avoid, "ascent")
    p2, c2 = _trace(w_s, -a, u, v, +1, avoid, "ascent")
    return p1, p2, min(c1, c2)


@dataclass(frozen=True)
class SaddleRelevance:
    w: complex
    relevant: bool
    orientation: complex  # unit descent tangent with which the saddle enters the contour
    ascent_ends: tuple[str, str]


def saddle_relevance(w_s: complex, u: float, v: float, others=(), strict: bool = True) -> SaddleRelevance:
    """Intersection-number test for one simple saddle.

    Raises ClassificationAmbiguous when an ascent curve runs into another
    saddle (the configuration is on or near a Stokes line).
    """
    _, a = _directions(w_s, u, v)
    p1, p2, closest = trace_ascent(w_s, u, v, avoid=others)
    if strict and closest < 0.05:
        for o in others:
            for p in (p1, p2):
                k = int(np.argmin(np.abs(p.points - o)))
                if abs(p.points[k] - o) < 0.05:
                    gap = abs((_dW(o, p.points[k], u, v) + _dW(p.points[k], w_s, u, v)).imag)
                    if gap < STOKES_TUBE:
                        raise ClassificationAmbiguous(
                            f"ascent curve from {w_s:.4f} passes saddle {o:.4f} (Im gap {gap:.1e}) at u={u}, v={v}")
    ends = (p1.terminal, p2.terminal)
    esc = [e == "infinity" for e in ends]
    relevant = esc[0] != esc[1]
    orient = 0j
    if relevant:
        up = a if esc[0] else -a
        orient = 1j * up
    return SaddleRelevance(complex(w_s), relevant, complex(orient), ends)


AXIS_OFFSET = 1e-7


def _relevance_table(u: float, v: float) -> tuple[SpineSaddles, list[SaddleRelevance]]:
    """Relevance of every saddle at (u, v).

    On the axes u = 0 or v = 0 the reflection symmetry puts ascent curves
    exactly onto other saddles; there the flags are the one-sided limit from
    the quadrant interior, evaluated at an offset of AXIS_OFFSET and mapped
    back to the axis saddles by nearest root.
    """
    if u < 0 or v < 0:
        raise DomainError("(u, v) must lie in the closed first quadrant")
    ss = spine_saddles(u, v)
    if np.any(ss.multiplicity > 1):
        raise ClassificationAmbiguous(f"degenerate saddles at u={u}, v={v}")
    on_axis = u == 0 or v == 0
    uu = u + AXIS_OFFSET if u == 0 else u
    vv = v + AXIS_OFFSET if v == 0 else v
    probe = spine_saddles(uu, vv) if on_axis else ss
    table = []
    for w in ss.roots:
        k = int(np.argmin(np.abs(probe.roots - w)))
        others = [o for i, o in enumerate(probe.roots) if i != k]
        r = saddle_relevance(probe.roots[k], uu, vv, others, strict=not on_axis)
        table.append(SaddleRelevance(complex(w), r.relevant, r.orientation, r.ascent_ends))
    return ss, table


def relevant_saddles(u: float, v: float) -> SpineSaddles:
    """Saddles of W(.; u, v) with relevance flags from the ascent-curve test."""
    ss, table = _relevance_table(u, v)
    return ss.with_relevance([r.relevant for r in table])


def saddle_contributions(n: int, j: int, t: float) -> tuple[SpineSaddles, np.ndarray]:
    """Per-saddle terms of A_t(0,0;n,j) at u = j/t, v = |n|/t (zero for irrelevant saddles)."""
    u, v = j / t, abs(n) / t
    ss, table = _relevance_table(u, v)
    terms = np.zeros(len(ss.roots), dtype=complex)
    for k, r in enumerate(table):
        if r.relevant:
            w = ss.roots[k]
            terms[k] = (_prefactor(w) * np.exp(t * ss.W[k]) * r.orientation
                        * np.sqrt(2 * np.pi / (t * abs(ss.W2[k]))))
    return ss.with_relevance([r.relevant for r in table]), terms


def relevant_amplitude(n: int, j: int, t: float) -> complex:
    """Sum of relevant saddle contributions for A_t(0,0;n,j) with u = j/t, v = |n|/t."""
    return complex(saddle_contributions(n, j, t)[1].sum())


def amplitude_asymptotic(n: int, j: int, t: float) -> complex:
    """Leading large-t amplitude A_t(0,0;n,j) at any site.

    The return amplitude at the origin, the Airy forms inside the tooth and
    spine front windows, and the relevant-saddle sum elsewhere; near Stokes
    lines, where relevance is ambiguous, the fixed-n or fixed-j expansion is
    used instead, whichever coordinate is smaller.
    """
    if t <= 0 or j < 0:
        raise DomainError("need t > 0 and j >= 0")
    if n == 0 and j == 0:
        return return_amplitude_asymptotic(t)[0]
    if abs(n) <= j and tooth_regime(j, t) == "airy":
        return tooth_amplitude_asymptotic(n, j, t)
    if j < abs(n) and spine_regime(n, t) == "airy":
        return spine_amplitude_asymptotic(n, j, t)
    try:
        return relevant_amplitude(n, j, t)
    except ClassificationAmbiguous:
        if abs(n) <= j:
            return tooth_amplitude_asymptotic(n, j, t)
        return spine_amplitude_asymptotic(n, j, t)


# ---------------------------------------------------------------- labelled saddles and regions

def _roots(u: float, v: float) -> np.ndarray:
    return np.polynomial.polynomial.polyroots(saddle_polynomial(u, v))


def allowed_saddles(u: float, v: float) -> tuple[complex, complex, complex]:
    """(w1, w2, w3): continuations of -1, -i and the allowed branch of the triple point 1.

    All six roots are followed along the ray s (u, v), s in (0, 1], by a
    one-to-one nearest assignment, starting from a small s where the labels
    are unambiguous.  A step is accepted only when every root moves less
    than a quarter of the smallest root separation.
    """
    if u < 0 or v < 0 or (u == 0 and v == 0):
        raise DomainError("need a nonzero point of the closed first quadrant")
    # on the axes the labels are taken as limits from the quadrant interior
    u, v = max(u, AXIS_OFFSET), max(v, AXIS_OFFSET)
    s = 1e-3
    current = _roots(u * s, v * s)
    w1 = int(np.argmin(np.abs(current + 1)))
    w2 = int(np.argmin(np.abs(current + 1j)))
    near_one = [k for k in range(len(current)) if abs(current[k] - 1) < 0.3]
    re = [potential_w(current[k], u * s, v * s).real for k in near_one]
    labels = (w1, w2, near_one[int(np.argmin(re))])
    ratio = 0.1
    while s < 1.0:
        s_new = min(1.0, s * (1 + ratio))
        roots = _roots(u * s_new, v * s_new)
        cost = np.abs(current[:, None] - roots[None, :])
        rows, cols = linear_sum_assignment(cost)
        moved = cost[rows, cols].max()
        gaps = np.abs(roots[:, None] - roots[None, :])
        np.fill_diagonal(gaps, np.inf)
        if moved > 0.25 * gaps.min():
            ratio /= 2
            if ratio < 1e-9:
                raise ClassificationAmbiguous(f"saddle labels lost near a merge at s={s} along ({u}, {v})")
            continue
        current = roots[cols[np.argsort(rows)]]
        s = s_new
        ratio = min(0.1, ratio * 1.5)
    return tuple(complex(current[k]) for k in labels)


SUBREGIONS = {
    "A": {"A1": (2, 1, 3), "A2": (2, 3, 1)},
    "B": {"B1": (1, 2, 3), "B2": (2, 1, 3), "B3": (2, 3, 1)},
    "C": {"C1": (2, 3, 1), "C2": (3, 2, 1)},
    "D": {"D1": (1, 2, 3), "D2": (2, 1, 3), "D3": (2, 3, 1),
          "D4": (3, 2, 1), "D5": (3, 1, 2), "D6": (1, 3, 2)},
}


@dataclass(frozen=True)
class RegionLabel:
    major: str
    sub: str | None
    ordering: tuple[int, int, int]  # saddle indices by decreasing Re W
    relevant: tuple[bool, bool, bool]


def classify_region(u: float, v: float) -> RegionLabel:
    """Region A-D of the velocity quadrant from the relevance of (w1, w2, w3)."""
    if u <= 0 or v <= 0:
        raise DomainError("classification is defined off the axes (u > 0, v > 0)")
    ws = allowed_saddles(u, v)
    ss = spine_saddles(u, v)
    flags = []
    for w in ws:
        others = [o for o in ss.roots if abs(o - w) > 1e-9]
        flags.append(saddle_relevance(w, u, v, others).relevant)
    if not flags[1]:
        raise ClassificationAmbiguous(f"dominant saddle w2 not relevant at u={u}, v={v}")
    major = {(True, True): "A", (False, True): "B", (True, False): "C", (False, False): "D"}[(flags[0], flags[2])]
    re = [potential_w(w, u, v).real for w in ws]
    ordering = tuple(int(i) + 1 for i in np.argsort(re)[::-1])
    sub = next((name for name, order in SUBREGIONS[major].items() if order == ordering), None)
    return RegionLabel(major, sub, ordering, tuple(flags))


def _w1_relevant_on_axis(u: float) -> bool:
    """Relevance of w1 = -1 at (u, 0), as a limit from the quadrant interior."""
    ss, table = _relevance_table(u, 0.0)
    return table[int(np.argmin(np.abs(ss.roots + 1)))].relevant


def stokes_point_on_u_axis(lo: float = 2.01, hi: float = 3.0, tol: float = 1e-7) -> float:
    """Bisection in u (v = 0) for the loss of relevance of w1 = -1 beyond the tooth front.

    Axis flags are limits from the interior, where the ambiguity tube is not
    applied, so the flag flips exactly where the ascent curve from w1 crosses
    another saddle.
    """
    f_lo, f_hi = _w1_relevant_on_axis(lo), _w1_relevant_on_axis(hi)
    if f_lo is not True or f_hi is not False:
        raise ClassificationAmbiguous(f"w1 relevance does not flip on [{lo}, {hi}]")
    while hi - lo > tol:
        mid = (lo + hi) / 2
        f = _w1_relevant_on_axis(mid)
        lo, hi = (mid, hi) if f else (lo, mid)
    return (lo + hi) / 2


STOKES_POINT_EXACT = 20.0 / (3.0 * math.pi)  # Im W(-1) = Im W(z_+) on v = 0


# ---------------------------------------------------------------- (anti-)Stokes lines

def _pair_difference(u: float, v: float, pair: tuple[int, int], part: str) -> float:
    ws = allowed_saddles(u, v)
    a, b = ws[pair[0] - 1], ws[pair[1] - 1]
    if part == "re":
        # Re W is single valued
        return float(potential_w(a, u, v).real - potential_w(b, u, v).real)
    # Im W: continuous branch along the straight segment between the two saddles
    pts = np.linspace(a, b, 64)
    d = sum(_dW(pts[k + 1], pts[k], u, v) for k in range(len(pts) - 1))
    return float(-d.imag)


def _bisect_edge(f, p0, p1, f0: float) -> tuple[float, float] | None:
    lo, hi = np.asarray(p0, float), np.asarray(p1, float)
    for _ in range(60):
        mid = (lo + hi) / 2
        fm = f(*mid)
        if f0 * fm <= 0:
            hi = mid
        else:
            lo, f0 = mid, fm
        if np.abs(hi - lo).max() < 1e-12:
            break
    root = (lo + hi) / 2
    # reject jumps (log branches, label changes) that are not zeros
    if abs(f(*root)) < ZERO_TOL:
        return float(root[0]), float(root[1])
    return None


def _zero_lines(pair, u_grid, v_grid, part: str) -> np.ndarray:
    """Zero set of the pair difference: sign changes on grid-cell edges, refined by bisection.

    Nodes are returned sorted along v, then u.
    """
    def f(u, v):
        return _pair_difference(u, v, pair, part)

    F = np.array([[f(u, v) for v in v_grid] for u in u_grid])
    pts = set()
    for i in range(len(u_grid)):
        for k in range(len(v_grid)):
            here = (u_grid[i], v_grid[k])
            for di, dk in ((1, 0), (0, 1)):
                if i + di >= len(u_grid) or k + dk >= len(v_grid):
                    continue
                if F[i, k] == 0:
                    pts.add(here)
                elif F[i, k] * F[i + di, k + dk] < 0:
                    root = _bisect_edge(f, here, (u_grid[i + di], v_grid[k + dk]), F[i, k])
                    if root is not None:
                        pts.add(root)
    out = np.array(sorted(pts, key=lambda p: (p[1], p[0])))
    return out.reshape(-1, 2)


def anti_stokes_lines(pair: tuple[int, int], u_grid, v_grid) -> np.ndarray:
    """Points (u, v) where Re W(w_a) = Re W(w_b), located row by row."""
    return _zero_lines(pair, np.asarray(u_grid, float), np.asarray(v_grid, float), "re")


def stokes_lines(pair: tuple[int, int], u_grid, v_grid) -> np.ndarray:
    """Points (u, v) where Im W(w_a) = Im W(w_b) (continuous branch), located row by row."""
    return _zero_lines(pair, np.asarray(u_grid, float), np.asarray(v_grid, float), "im")


def anti_stokes_point(guess=(1.2, 1.85)) -> tuple[float, float]:
    """Common point of the three anti-Stokes lines: Re W(w1) = Re W(w2) = Re W(w3)."""
    def eqs(p):
        u, v = abs(p[0]), abs(p[1])
        return [_pair_difference(u, v, (1, 2), "re"), _pair_difference(u, v, (2, 3), "re")]

    sol, info, ier, msg = fsolve(eqs, guess, full_output=True, xtol=1e-12)
    if ier != 1:
        raise ClassificationAmbiguous(f"anti-Stokes point not found: {msg}")
    return float(abs(sol[0])), float(abs(sol[1]))


def region_atlas(u_grid, v_grid) -> list[tuple[float, float, str, str]]:
    """(u, v, major, sub) over a grid of the open quadrant; '?' marks ambiguous cells."""
    rows = []
    for v in v_grid:
        for u in u_grid:
            try:
                lab = classify_region(float(u), float(v))
                rows.append((float(u), float(v), lab.major, lab.sub or "?"))
            except (ClassificationAmbiguous, StallError):
                rows.append((float(u), float(v), "?", "?"))
    return rows

"""Eigenfunctions of the comb Hamiltonian and a numerical completeness check.

Extended states  phi(n, j) = A e^{i alpha n + i theta j} + B e^{i alpha n - i theta j}
with y = 1 - 2 cos alpha, A = y + e^{i theta}, B = -(y + e^{-i theta}),
energy 2 - 2 cos theta in [0, 4], normalized to N(alpha, theta) delta delta.

Localized states  psi(n, j) = c e^{i alpha n} (-1)^j e^{-gamma j}, alpha in
(pi/2, 3pi/2), e^gamma = 1 - 2 cos alpha, energy 2 + 2 cosh gamma in (4, 16/3),
|c|^2 = (1 - e^{-2 gamma}) / (2 pi).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .comb import Vertex
from .errors import DomainError

NEAR_ZERO_NORM = 1e-8


@dataclass(frozen=True)
class ExtendedState:
    alpha: float
    theta: float

    def __post_init__(self):
        if not 0 < self.theta < math.pi:
            raise DomainError(f"theta must lie in (0, pi), got {self.theta}")

    @property
    def y(self) -> float:
        return 1 - 2 * math.cos(self.alpha)

    @property
    def A(self) -> complex:
        return self.y + np.exp(1j * self.theta)

    @property
    def B(self) -> complex:
        return -(self.y + np.exp(-1j * self.theta))

    @property
    def energy(self) -> float:
        return 2 - 2 * math.cos(self.theta)


def extended_eigenfunction(st: ExtendedState, v) -> complex:
    n, j = Vertex(*v)
    bloch = np.exp(1j * st.alpha * n)
    return complex(bloch * (st.A * np.exp(1j * st.theta * j) + st.B * np.exp(-1j * st.theta * j)))


def extended_norm(alpha: float, theta: float) -> float:
    """N(alpha, theta) = 4 pi^2 (y^2 + 2 y cos theta + 1); warns when it nearly vanishes."""
    y = 1 - 2 * math.cos(alpha)
    value = 4 * math.pi**2 * (y * y + 2 * y * math.cos(theta) + 1)
    if value < NEAR_ZERO_NORM:
        warnings.warn(f"extended-state norm {value:.2e} near zero at alpha={alpha}, theta={theta}",
                      RuntimeWarning, stacklevel=2)
    return value


@dataclass(frozen=True)
class LocalizedState:
    alpha: float

    def __post_init__(self):
        if not math.pi / 2 < self.alpha < 3 * math.pi / 2:
            raise DomainError(f"localized states need alpha in (pi/2, 3pi/2), got {self.alpha}")

    @property
    def gamma(self) -> float:
        return math.log(1 - 2 * math.cos(self.alpha))

    @property
    def c(self) -> float:
        return math.sqrt((1 - math.exp(-2 * self.gamma)) / (2 * math.pi))

    @property
    def energy(self) -> float:
        return 2 + 2 * math.cosh(self.gamma)


def localized_state(alpha: float) -> LocalizedState:
    return LocalizedState(alpha)


def localized_eigenfunction(st: LocalizedState, v) -> complex:
    n, j = Vertex(*v)
    return complex(st.c * np.exp(1j * st.alpha * n) * (-1) ** j * math.exp(-st.gamma * j))


@dataclass(frozen=True)
class QuadratureSpec:
    """Resolution of the completeness quadrature.

    ``n_theta`` Gauss-Legendre nodes in tau with theta = pi (1 - cos tau)/2,
    which clusters nodes at both ends where the alpha-integrated integrand
    behaves like sqrt(theta).  At each theta the alpha trapezoid uses
    ``alpha_min + alpha_density (theta^-1/2 + (pi - theta)^-1)`` nodes, capped at
    ``alpha_max``: the integrand's poles sit about sqrt(theta) from the real
    alpha axis near (0, 0) and about (pi - theta)/2 near (pi/2, pi).
    ``n_localized`` Gauss-Legendre nodes cover alpha in (pi/2, 3pi/2).
    """

    n_theta: int = 200
    alpha_density: float = 40.0
    alpha_min: int = 64
    alpha_max: int = 1 << 15
    n_localized: int = 64


def _extended_gram(ns: np.ndarray, js: np.ndarray, quad: QuadratureSpec) -> np.ndarray:
    x, wx = np.polynomial.legendre.leggauss(quad.n_theta)
    tau = (x + 1) * math.pi / 2
    theta = math.pi * (1 - np.cos(tau)) / 2
    dtheta = math.pi / 2 * np.sin(tau) * wx * math.pi / 2
    total = np.zeros((len(ns), len(ns)), dtype=complex)
    for th, wth in zip(theta, dtheta):
        want = quad.alpha_min + quad.alpha_density * (th**-0.5 + 1 / (math.pi - th))
        count = int(min(quad.alpha_max, math.ceil(want)))
        alpha = 2 * math.pi * np.arange(count) / count
        y = 1 - 2 * np.cos(alpha)
        A = y + np.exp(1j * th)
        B = -(y + np.exp(-1j * th))
        up = np.exp(1j * th * js)[:, None]
        phi = np.exp(1j * np.outer(ns, alpha)) * (A[None, :] * up + B[None, :] / up)
        weight = (2 * math.pi / count) / (4 * math.pi**2 * np.abs(A) ** 2)
        total += wth * (np.conj(phi) * weight) @ phi.T
    return total


def _localized_gram(ns: np.ndarray, js: np.ndarray, quad: QuadratureSpec) -> np.ndarray:
    x, w = np.polynomial.legendre.leggauss(quad.n_localized)
    alpha = math.pi + x * math.pi / 2
    y = 1 - 2 * np.cos(alpha)
    c = np.sqrt((1 - y**-2) / (2 * math.pi))
    psi = c[None, :] * np.exp(1j * np.outer(ns, alpha)) * (-y[None, :]) ** (-js[:, None].astype(float))
    return (np.conj(psi) * (w * math.pi / 2)) @ psi.T


def completeness_matrix(vertices, quad: QuadratureSpec | None = None) -> np.ndarray:
    """Matrix of defects [spectral <v_a|v_b>] - identity over a list of vertices."""
    quad = quad or QuadratureSpec()
    verts = [Vertex(*v) for v in vertices]
    if any(v.j < 0 for v in verts):
        raise DomainError("tooth coordinates must be >= 0")
    ns = np.array([v.n for v in verts], dtype=float)
    js = np.array([v.j for v in verts], dtype=int)
    gram = _extended_gram(ns, js, quad) + _localized_gram(ns, js, quad)
    eye = np.array([[1.0 if a == b else 0.0 for b in verts] for a in verts])
    return gram - eye


def completeness_defect(v1, v2, quad: QuadratureSpec | None = None) -> complex:
    """Spectral resolution of <v1|v2> minus the Kronecker delta."""
    return complex(completeness_matrix([v1, v2], quad)[0, 1] if Vertex(*v1) != Vertex(*v2)
                   else completeness_matrix([v1], quad)[0, 0])

"""Comb lattice, truncated windows and the action of H = -Laplacian.

Sites are ``(n, j)`` with ``n`` the spine coordinate and ``j >= 0`` the
distance up the tooth attached at ``n``.  A :class:`Truncation` keeps the
sites ``-L <= n <= L`` and ``0 <= j <= M``; amplitudes live in a dense
``(2L+1, M+1)`` complex array.

The window operator is the restriction ``P H P`` of the infinite-comb
Hamiltonian: diagonal entries keep the infinite-comb degree even on the
window edge, so sites beyond the window behave as zero (Dirichlet).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple

import numpy as np

from .errors import DomainError

SPINE_DEGREE = 3
TOOTH_DEGREE = 2


class Vertex(NamedTuple):
    n: int
    j: int


@dataclass(frozen=True)
class Truncation:
    L: int
    M: int

    def __post_init__(self):
        if self.L < 1 or self.M < 1:
            raise DomainError(f"truncation needs L >= 1 and M >= 1, got L={self.L}, M={self.M}")

    @property
    def shape(self) -> tuple[int, int]:
        return (2 * self.L + 1, self.M + 1)

    def contains(self, v) -> bool:
        v = Vertex(*v)
        return -self.L <= v.n <= self.L and 0 <= v.j <= self.M

    def index(self, v) -> tuple[int, int]:
        v = Vertex(*v)
        if not self.contains(v):
            raise DomainError(f"vertex {tuple(v)} outside window L={self.L}, M={self.M}")
        return (v.n + self.L, v.j)

    def boundary_distance(self, v) -> int:
        """Graph distance from ``v`` to the nearest site outside the window."""
        v = Vertex(*v)
        return min(self.L - abs(v.n), self.M - v.j) + 1


@dataclass(frozen=True, eq=False)
class WaveState:
    """Complex amplitudes on a truncated comb window."""

    trunc: Truncation
    amp: np.ndarray = field(repr=False)

    def __post_init__(self):
        amp = np.asarray(self.amp, dtype=complex)
        if amp.shape != self.trunc.shape:
            raise DomainError(f"amplitude shape {amp.shape} does not match window {self.trunc.shape}")
        object.__setattr__(self, "amp", amp)

    @cached_property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amp))

    def __getitem__(self, v) -> complex:
        return complex(self.amp[self.trunc.index(Vertex(*v))])

    def vdot(self, other: "WaveState") -> complex:
        return complex(np.vdot(self.amp, other.amp))

    @classmethod
    def point(cls, trunc: Truncation, v) -> "WaveState":
        amp = np.zeros(trunc.shape, dtype=complex)
        amp[trunc.index(Vertex(*v))] = 1.0
        return cls(trunc, amp)


def degree(v) -> int:
    """Degree of ``v`` in the infinite comb: 3 on the spine, 2 on a tooth."""
    n, j = v
    if j < 0:
        raise DomainError(f"tooth coordinate must be >= 0, got {j}")
    return SPINE_DEGREE if j == 0 else TOOTH_DEGREE


def hamiltonian_matvec(a: np.ndarray, out: np.ndarray | None = None) -> np.ndarray:
    """Apply the window Hamiltonian to a raw ``(2L+1, M+1)`` array.

    ``out`` may be supplied to avoid an allocation; it must not alias ``a``.
    """
    if out is None:
        out = np.empty_like(a)
    np.multiply(a, TOOTH_DEGREE, out=out)
    out[:, 0] += a[:, 0]
    out[:, :-1] -= a[:, 1:]
    out[:, 1:] -= a[:, :-1]
    out[:-1, 0] -= a[1:, 0]
    out[1:, 0] -= a[:-1, 0]
    return out


def apply_hamiltonian(s: WaveState) -> WaveState:
    return WaveState(s.trunc, hamiltonian_matvec(s.amp))


def spectral_bound() -> float:
    """Gershgorin bound on ||H||: twice the maximal degree."""
    return 2.0 * SPINE_DEGREE

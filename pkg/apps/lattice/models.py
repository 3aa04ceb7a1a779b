from __future__ import annotations
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

from apps.selfdual.models import SelfDualHamiltonian, SelfDualSpace

from .exceptions import LatticeError

OPEN = "open"
PERIODIC = "periodic"
BOUNDARIES = (OPEN, PERIODIC)

Site = Tuple[int, ...]


@dataclass(frozen=True)
class LatticeConfig:
    """ℤᵈ 상자 Λ_L = {−L..L}ᵈ, 스핀 집합, 경계 조건, 거리 지수 ε."""
    d: int = 1
    L: int = 0
    spins: Tuple[str, ...] = ("0",)
    boundary: str = OPEN
    epsilon: float = 1.0

    def __post_init__(self):
        if self.d < 1:
            raise LatticeError(f"d must be >= 1, got {self.d}")
        if self.L < 0:
            raise LatticeError(f"L must be >= 0, got {self.L}")
        if not self.spins:
            raise LatticeError("spin label set is empty")
        if self.boundary not in BOUNDARIES:
            raise LatticeError(f"boundary must be one of {BOUNDARIES}")
        if not (0.0 < self.epsilon <= 1.0):
            raise LatticeError(f"epsilon must lie in (0, 1], got {self.epsilon}")

    @property
    def side(self) -> int:
        return 2 * self.L + 1

    @property
    def n_sites(self) -> int:
        return self.side ** self.d

    @property
    def n_spins(self) -> int:
        return len(self.spins)

    @property
    def periods(self) -> Optional[Tuple[int, ...]]:
        return (self.side,) * self.d if self.boundary == PERIODIC else None


@dataclass(frozen=True, eq=False)
class DisorderRealization:
    seed: int
    potential: Dict[Site, float]
    lam: float = 0.0

    def __post_init__(self):
        if self.lam < 0:
            raise LatticeError("disorder coupling lambda must be >= 0")
        bad = [x for x, v in self.potential.items() if not (-1.0 <= v <= 1.0)]
        if bad:
            raise LatticeError(f"potential outside [-1, 1] at sites {bad[:5]}")


@dataclass(frozen=True, eq=False)
class QuadraticModel:
    """h: 𝔥 위 에르미트 행렬, g: ⟨ψ_i, gψ_j⟩ 반대칭 쌍형성 행렬."""
    h: np.ndarray
    g: Optional[np.ndarray] = None

    def pairing(self) -> np.ndarray:
        if self.g is None:
            return np.zeros_like(np.asarray(self.h, dtype=complex))
        return np.asarray(self.g, dtype=complex)


@dataclass(frozen=True, eq=False)
class Restriction:
    """H_big = inner(⊕ 0) + boundary + outer, 세 블록이 정확히 분할."""
    inner: SelfDualHamiltonian
    boundary: SelfDualHamiltonian
    outer: np.ndarray
    indices: np.ndarray
    big_space: SelfDualSpace = field(repr=False)

    def reassemble(self) -> np.ndarray:
        full = self.boundary.matrix + self.outer
        full = np.array(full, copy=True)
        full[np.ix_(self.indices, self.indices)] += self.inner.matrix
        return full

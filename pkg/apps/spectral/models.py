from __future__ import annotations
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from apps.selfdual.models import BasisProjection, Label, SelfDualHamiltonian

from .exceptions import GapClosed

NOT_APPLICABLE = "not_applicable"
OK = "ok"
VIOLATED = "violated"


@dataclass(frozen=True, eq=False)
class SpectralResolution:
    """
    H = Σ λ_k v_k v_k*. E₀ 은 |λ| ≤ zero_tol 클러스터.
    gap_defined=False 이면 모든 고유값이 0 (gap 은 0 으로 보고).
    """
    hamiltonian: SelfDualHamiltonian
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    gap: float
    zero_tol: float
    E_plus: np.ndarray
    E_minus: np.ndarray
    E_zero: np.ndarray
    gap_defined: bool = True

    @property
    def space(self):
        return self.hamiltonian.space

    @property
    def gapped(self) -> bool:
        return self.gap_defined and not np.any(np.abs(self.eigenvalues) <= self.zero_tol)

    @property
    def n_zero(self) -> int:
        return int(np.sum(np.abs(self.eigenvalues) <= self.zero_tol))

    def basis_projection(self) -> BasisProjection:
        if not self.gapped:
            raise GapClosed(f"E₀ has rank {self.n_zero}; E₊ is not a basis projection")
        return BasisProjection(space=self.space, matrix=self.E_plus)

    def function(self, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
        """f(H) = V f(Λ) V*."""
        v = self.eigenvectors
        return (v * f(self.eigenvalues)) @ v.conj().T


@dataclass(frozen=True)
class DecayParams:
    mu: float
    epsilon: float
    S_value: float
    Delta_value: float

    def __post_init__(self):
        if self.S_value < 0 or self.Delta_value < 0:
            raise ValueError("S and Delta must be non-negative")

    @property
    def applicable(self) -> bool:
        return self.Delta_value > self.S_value

    def s_value_at(self, mu: float) -> float:
        """0 ≤ μ' ≤ μ 에서 𝐒(H,μ') ≤ (μ'/μ)·𝐒(H,μ) 상계."""
        if not (0.0 <= mu <= self.mu):
            raise ValueError(f"monotone bound needs 0 <= mu' <= {self.mu}")
        if self.mu == 0:
            return 0.0
        return (mu / self.mu) * self.S_value


@dataclass(frozen=True)
class CTReport:
    params: DecayParams
    z: complex
    status: str
    worst_ratio: float = 0.0
    worst_pair: Optional[Tuple[Label, Label]] = None
    violations: int = 0
    gap: float = 0.0
    gapped_status: str = NOT_APPLICABLE
    gapped_mu: float = 0.0
    gapped_worst_ratio: float = 0.0
    gapped_violations: int = 0
    n_pairs: int = 0

    @property
    def passed(self) -> bool:
        return self.status != VIOLATED and self.gapped_status != VIOLATED


@dataclass(frozen=True)
class DecayFit:
    rate: float
    intercept: float
    residual: float
    n_pairs: int
    epsilon: float = 1.0

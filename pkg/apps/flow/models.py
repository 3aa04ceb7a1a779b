from __future__ import annotations
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from apps.selfdual.models import SelfDualHamiltonian, SelfDualSpace
from apps.selfdual.services import opnorm

from . import conf
from .exceptions import FlowError


@dataclass(frozen=True)
class FilterProfile:
    """J(ν) = −1/ν (|ν| ≥ nu0), −ν/nu0² (|ν| < nu0). 홀함수, 연속."""
    nu0: float

    def __post_init__(self):
        if not self.nu0 > 0:
            raise FlowError(f"filter cutoff must be positive, got {self.nu0}")

    def J(self, nu: np.ndarray) -> np.ndarray:
        nu = np.asarray(nu, dtype=float)
        outside = np.abs(nu) >= self.nu0
        safe = np.where(outside, nu, 1.0)
        return np.where(outside, -1.0 / safe, -nu / self.nu0 ** 2)


@dataclass(frozen=True, eq=False)
class HamiltonianPath:
    """s ∈ [0,1] -> H_s 와 ∂ₛH_s. grid 는 기록 지점."""
    at: Callable[[float], SelfDualHamiltonian]
    derivative_at: Callable[[float], np.ndarray]
    grid: Tuple[float, ...]
    meta: Dict = field(default_factory=dict)

    def __post_init__(self):
        g = tuple(float(s) for s in self.grid)
        if len(g) < 2:
            raise FlowError("path grid needs at least 2 points")
        if any(b <= a for a, b in zip(g, g[1:])):
            raise FlowError("path grid must be strictly increasing")
        object.__setattr__(self, "grid", g)

    @property
    def space(self) -> SelfDualSpace:
        return self.at(self.grid[0]).space

    def check_derivative(self, points: Sequence[float] = (0.25, 0.5, 0.75), h: float = 1e-4) -> float:
        """max ‖(H_{s+h} − H_{s−h})/2h − ∂H_s‖ (구간 경계에 걸친 점은 한쪽 차분)."""
        worst = 0.0
        for s in points:
            lo, hi = max(s - h, 0.0), min(s + h, 1.0)
            fd = (self.at(hi).matrix - self.at(lo).matrix) / (hi - lo)
            worst = max(worst, opnorm(fd - self.derivative_at(s)))
        return worst


@dataclass(frozen=True)
class StepControl:
    h: float = conf.DEFAULT_H
    h_min: float = conf.DEFAULT_H_MIN
    transport_tol: float = conf.DEFAULT_TRANSPORT_TOL
    reunitarize_tol: float = conf.REUNITARIZE_TOL

    def __post_init__(self):
        if not (0 < self.h_min <= self.h):
            raise FlowError(f"need 0 < h_min <= h, got h={self.h}, h_min={self.h_min}")

    @classmethod
    def from_settings(cls, **overrides) -> "StepControl":
        values = dict(h=conf.h_initial(), h_min=conf.h_min(), transport_tol=conf.transport_tol())
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


@dataclass(frozen=True, eq=False)
class FlowResult:
    s_grid: Tuple[float, ...]
    V: Tuple[np.ndarray, ...]
    transport_errors: Tuple[float, ...]
    det_track: Tuple[complex, ...]
    gamma_residual: float
    deficit: Tuple[float, ...]
    mode: str = conf.KATO
    h: float = conf.DEFAULT_H
    converged: bool = True
    status: str = "ok"
    n_reunitarized: int = 0

    @property
    def transport_error(self) -> float:
        return max(self.transport_errors)

    @property
    def final(self) -> np.ndarray:
        return self.V[-1]

    def propagator_between(self, k: int, j: int) -> np.ndarray:
        """U(s_k, s_j) = V_k V_j*."""
        return self.V[k] @ self.V[j].conj().T

    def records(self) -> List[Dict]:
        return [
            {"s": s, "transport_error": e, "det": [d.real, d.imag], "deficit": f}
            for s, e, d, f in zip(self.s_grid, self.transport_errors, self.det_track, self.deficit)
        ]


@dataclass(frozen=True)
class DeficitRow:
    L: int
    n_sites: int
    deficit: float          # tr|1 − V₁| / 2N
    per_site: float         # tr|1 − V₁| / |Λ_L|
    det: complex
    transport_error: float
    converged: bool
    sigma: Optional[int] = None

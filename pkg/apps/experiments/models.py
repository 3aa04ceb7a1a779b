from __future__ import annotations
import copy
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from apps.flow.models import FlowResult
from apps.qfstates.exceptions import SpaceMismatch
from apps.qfstates.models import Monomial, Symbol
from apps.qfstates.services import evaluate
from apps.selfdual.models import SelfDualSpace


@dataclass(frozen=True)
class ExperimentConfig:
    """검증된 실험 설정. 각 섹션은 기본값이 채워진 dict."""
    model: Dict[str, Any]
    path: Dict[str, Any]
    tolerances: Dict[str, Any]
    flow: Dict[str, Any]
    crossing: Dict[str, Any]
    ct: Dict[str, Any]
    ensemble: Dict[str, Any]
    run: Dict[str, Any]
    source: Optional[str] = None

    SECTIONS = ("model", "path", "tolerances", "flow", "crossing", "ct", "ensemble", "run")

    def echo(self) -> Dict[str, Any]:
        """출력 헤더용. 출력 경로는 결과에 영향이 없어 뺀다."""
        out = {name: copy.deepcopy(getattr(self, name)) for name in self.SECTIONS}
        out["run"].pop("out", None)
        return out

    def waypoint(self, k: int) -> Dict[str, Any]:
        """모델 파라미터에 k 번째 경유점을 덮어쓴 dict."""
        params = {k2: v for k2, v in self.model.items() if k2 != "kind"}
        params.update(self.path["waypoints"][k])
        return params

    @property
    def n_waypoints(self) -> int:
        return len(self.path["waypoints"])


@dataclass(frozen=True)
class GapClosing:
    s_tilde: float
    gap: float
    bracket: Tuple[float, float]
    n_crossings: int
    scan: Tuple[Tuple[float, float, int], ...] = ()   # (s, gap, parity)


@dataclass(frozen=True, eq=False)
class SweepResult:
    records: List[Dict[str, Any]]
    gapped: bool
    flow: Optional[FlowResult] = None
    closing: Optional[GapClosing] = None


@dataclass(frozen=True, eq=False)
class CrossingReport:
    """
    s̃ 에서의 일측 사영 E_{s̃±} 와 분할 P̃₊ + P̃₋ + P̃₀ = 1.
    𝒦₁ = ran(P̃₊ + P̃₋), 𝒦₀ = ran P̃₀.
    """
    space: SelfDualSpace
    s_tilde: float
    delta: float
    E_left: np.ndarray
    E_right: np.ndarray
    sigma_across: int
    P_plus: np.ndarray
    P_minus: np.ndarray
    W_right: np.ndarray     # E_{s̃+} ∧ E_{s̃−}⊥
    W_left: np.ndarray      # E_{s̃+}⊥ ∧ E_{s̃−}
    splitting_residual: float
    richardson: float
    jump: Optional[Dict[str, float]] = None

    @property
    def K1(self) -> np.ndarray:
        return self.P_plus + self.P_minus

    @property
    def P_zero(self) -> np.ndarray:
        return self.W_right + self.W_left

    @property
    def K0(self) -> np.ndarray:
        return self.P_zero

    @property
    def rank_zero(self) -> int:
        return int(round(np.trace(self.P_zero).real))

    def summary(self) -> Dict[str, Any]:
        out = {
            "s_tilde": self.s_tilde, "delta": self.delta, "sigma_across": self.sigma_across,
            "rank_plus": int(round(np.trace(self.P_plus).real)),
            "rank_minus": int(round(np.trace(self.P_minus).real)),
            "rank_zero": self.rank_zero,
            "splitting_residual": self.splitting_residual, "richardson": self.richardson,
        }
        if self.jump:
            out["jump"] = dict(self.jump)
        return out


@dataclass(frozen=True, eq=False)
class MixedGroundState:
    """
    ω̃_λ(a₁a₀) = ω_{S₁}(a₁)·(λω₊(a₀) + (1−λ)ω₋(a₀)),
    a₁ 은 𝒦₁, a₀ 는 𝒦₀ 위 벡터로 만든 단항식.
    """
    report: CrossingReport
    lam: float
    outer: Symbol           # 𝒦₁ 에서 P̃₊
    inner_plus: Symbol      # 𝒦₀ 에서 E_{s̃+}
    inner_minus: Symbol     # 𝒦₀ 에서 E_{s̃−}
    support_tol: float = 1e-8

    def __post_init__(self):
        if not (0.0 <= self.lam <= 1.0):
            raise ValueError(f"lambda must lie in [0, 1], got {self.lam}")

    def _check_support(self, m: Monomial, proj: np.ndarray, name: str) -> None:
        for f in m.factors:
            v = np.asarray(f.vector, dtype=complex)
            off = float(np.linalg.norm(v - proj @ v))
            if off > self.support_tol * max(1.0, float(np.linalg.norm(v))):
                raise SpaceMismatch(f"factor is not supported in {name} (distance {off:.2e})")

    def evaluate(self, a1: Monomial, a0: Monomial = Monomial()) -> complex:
        self._check_support(a1, self.report.K1, "K1")
        self._check_support(a0, self.report.K0, "K0")
        outer = evaluate(self.outer, a1)
        inner = self.lam * evaluate(self.inner_plus, a0) + (1.0 - self.lam) * evaluate(self.inner_minus, a0)
        return outer * inner


@dataclass(frozen=True)
class EnsembleMember:
    index: int
    seed: int
    gap: float
    sigma: int
    decay_rate: Optional[float] = None
    decay_residual: Optional[float] = None


@dataclass(frozen=True)
class StabilizationRow:
    L: int
    dim: int
    sigma: int
    gap_left: float
    gap_right: float


@dataclass(frozen=True, eq=False)
class Stabilization:
    rows: List[StabilizationRow] = field(default_factory=list)
    L0: Optional[int] = None
    sigma: Optional[int] = None


@dataclass(frozen=True, eq=False)
class EnsembleResult:
    members: List[EnsembleMember]
    aggregate: Dict[str, Any]

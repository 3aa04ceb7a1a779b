from __future__ import annotations
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from . import conf
from .exceptions import NotInvolution, NotUnitary, ShapeMismatch

MINUS = "-"
PLUS = "+"

# (x, spin, tag): x 는 정수 좌표 tuple, spin 은 스핀 인덱스, tag 는 "-" / "+"
Label = Tuple[Tuple[int, ...], int, str]


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SelfDualSpace:
    """
    유한차원 자기쌍대 공간 (ℋ, Γ), Γv = G·conj(v).
    labels 는 (x, spin, tag) 사전식 정렬, tag "-" 가 "+" 보다 먼저.
    periods: 주기 경계 축의 길이 (거리 계산용), 없으면 열린 상자.
    """
    labels: Tuple[Label, ...]
    gamma_matrix: np.ndarray
    partner: np.ndarray
    periods: Optional[Tuple[Optional[int], ...]] = None
    box_radius: Optional[int] = None
    _index: Dict[Label, int] = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "gamma_matrix", _frozen(self.gamma_matrix))
        object.__setattr__(self, "partner", _frozen(self.partner))
        object.__setattr__(self, "_index", {lab: i for i, lab in enumerate(self.labels)})
        self._check_gamma()

    def _check_gamma(self):
        """G 유니터리, Γ² = G·conj(G) = 1."""
        g = self.gamma_matrix
        if g.shape != (len(self.labels), len(self.labels)):
            raise ShapeMismatch(f"gamma matrix of shape {g.shape} does not match {len(self.labels)} labels")
        eye = np.eye(g.shape[0])
        unitary = float(np.linalg.norm(g.conj().T @ g - eye, 2))
        if unitary > conf.GAMMA_TOL:
            raise NotUnitary(f"gamma matrix is not unitary (residual {unitary:.2e})", residual=unitary)
        square = float(np.linalg.norm(g @ g.conj() - eye, 2))
        if square > conf.GAMMA_TOL:
            raise NotInvolution(f"Γ² differs from 1 (residual {square:.2e})", residual=square)

    # ---------- 기본 정보 ----------
    @property
    def dim(self) -> int:
        return len(self.labels)

    @property
    def n_modes(self) -> int:
        return self.dim // 2

    @property
    def spatial_dim(self) -> int:
        return len(self.labels[0][0])

    def index_of(self, label: Label) -> int:
        return self._index[label]

    @property
    def minus_indices(self) -> np.ndarray:
        return np.array([i for i, lab in enumerate(self.labels) if lab[2] == MINUS], dtype=int)

    @property
    def plus_indices(self) -> np.ndarray:
        return self.partner[self.minus_indices]

    def sites(self) -> List[Tuple[int, ...]]:
        seen: Dict[Tuple[int, ...], None] = {}
        for x, _, _ in self.labels:
            seen.setdefault(x, None)
        return list(seen)

    def positions(self) -> np.ndarray:
        """label 별 좌표 (dim × d)."""
        return np.array([lab[0] for lab in self.labels], dtype=float)

    # ---------- Γ ----------
    def gamma(self, v: np.ndarray) -> np.ndarray:
        return self.gamma_matrix @ np.conj(v)

    def gamma_conjugate(self, a: np.ndarray) -> np.ndarray:
        """ΓAΓ = G·conj(A)·conj(G)."""
        return self.gamma_matrix @ np.conj(a) @ np.conj(self.gamma_matrix)

    def canonical_projection(self) -> "BasisProjection":
        p = np.zeros((self.dim, self.dim), dtype=complex)
        idx = self.minus_indices
        p[idx, idx] = 1.0
        return BasisProjection(space=self, matrix=p)

    def majorana_basis(self) -> np.ndarray:
        """
        Γ-실수 정규직교 기저 W (ΓW = W, 열 단위).
        모드 (i=-, j=+) 마다 (e_i + e_j)/√2, i(e_i − e_j)/√2.
        """
        w = np.zeros((self.dim, self.dim), dtype=complex)
        r = 1.0 / np.sqrt(2.0)
        for k, (i, j) in enumerate(zip(self.minus_indices, self.plus_indices)):
            w[i, 2 * k] = r
            w[j, 2 * k] = r
            w[i, 2 * k + 1] = 1j * r
            w[j, 2 * k + 1] = -1j * r
        return w


@dataclass(frozen=True, eq=False)
class SelfDualHamiltonian:
    space: SelfDualSpace
    matrix: np.ndarray
    meta: Dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "matrix", _frozen(np.asarray(self.matrix, dtype=complex)))

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.matrix, 2))

    def with_meta(self, **extra) -> "SelfDualHamiltonian":
        return SelfDualHamiltonian(space=self.space, matrix=self.matrix, meta={**self.meta, **extra})


@dataclass(frozen=True, eq=False)
class BasisProjection:
    space: SelfDualSpace
    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", _frozen(np.asarray(self.matrix, dtype=complex)))

    @property
    def complement(self) -> np.ndarray:
        return np.eye(self.space.dim) - self.matrix

    def range_basis(self) -> np.ndarray:
        """ran P 의 정규직교 기저 (dim × N)."""
        w, v = np.linalg.eigh(self.matrix)
        return v[:, w > 0.5]


@dataclass(frozen=True, eq=False)
class BogoliubovTransform:
    space: SelfDualSpace
    matrix: np.ndarray
    parity: int
    det: complex
    kernel_dim: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "matrix", _frozen(np.asarray(self.matrix, dtype=complex)))

"""
소형 계의 정확한 Fock 공간 오라클.

기저: 점유 비트열 사전식 (모드 0 이 최상위 비트), 진공 = 인덱스 0.
a_j 부호: 더 낮은 모드의 점유수 popcount.
π_P(B(φ)) = a(Pφ) + a*(ΓP⊥φ).
"""
from __future__ import annotations
import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy import linalg as sla

from apps.selfdual.models import BasisProjection, SelfDualHamiltonian, SelfDualSpace

from . import conf
from .exceptions import SpaceMismatch, TooManyModes
from .models import Monomial

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class FockOracle:
    space: SelfDualSpace
    projection: np.ndarray
    basis: np.ndarray                  # ran P 의 정규직교 기저 (dim × n)
    annihilators: Tuple[np.ndarray, ...]

    @property
    def n_modes(self) -> int:
        return len(self.annihilators)

    @property
    def fock_dim(self) -> int:
        return 2 ** self.n_modes

    @property
    def vacuum(self) -> np.ndarray:
        v = np.zeros(self.fock_dim, dtype=complex)
        v[0] = 1.0
        return v

    def field(self, phi: np.ndarray) -> np.ndarray:
        """π_P(B(φ)), φ 에 대해 반선형."""
        phi = np.asarray(phi, dtype=complex)
        if phi.shape != (self.space.dim,):
            raise SpaceMismatch(f"vector of shape {phi.shape} is not in the oracle space")
        p_perp = np.eye(self.space.dim) - self.projection
        c = self.basis.conj().T @ phi
        d = self.basis.conj().T @ self.space.gamma(p_perp @ phi)
        out = np.zeros((self.fock_dim, self.fock_dim), dtype=complex)
        for j, a in enumerate(self.annihilators):
            out += np.conj(c[j]) * a + d[j] * a.T
        return out

    def operator(self, m: Monomial) -> np.ndarray:
        out = np.eye(self.fock_dim, dtype=complex)
        for f in m.factors:
            x = self.field(f.vector)
            out = out @ (x.conj().T if f.star else x)
        return out


def _annihilators(n: int) -> List[np.ndarray]:
    dim = 2 ** n
    ops = []
    for j in range(n):
        bit = 1 << (n - 1 - j)
        a = np.zeros((dim, dim))
        for b in range(dim):
            if b & bit:
                lower = b >> (n - j)
                a[b ^ bit, b] = -1.0 if lower.bit_count() % 2 else 1.0
        ops.append(a)
    return ops


def build_fock_oracle(space: SelfDualSpace, projection: Optional[BasisProjection] = None) -> FockOracle:
    n = space.n_modes
    if n > conf.FOCK_MAX_MODES:
        raise TooManyModes(f"{n} modes exceed the dense oracle limit {conf.FOCK_MAX_MODES}")
    if projection is None:
        p = space.canonical_projection().matrix
        w = np.eye(space.dim, dtype=complex)[:, space.minus_indices]
    else:
        p = np.asarray(projection.matrix, dtype=complex)
        w = projection.range_basis()
    if w.shape[1] != n:
        raise SpaceMismatch(f"projection rank {w.shape[1]} differs from {n} modes")
    return FockOracle(space=space, projection=p, basis=w, annihilators=tuple(_annihilators(n)))


# ---------- 기대값 / 쌍선형 원소 ----------
def fock_expectation(oracle: FockOracle, m: Monomial, density: Optional[np.ndarray] = None) -> complex:
    """density 가 없으면 ⟨Ω, π(m) Ω⟩, 있으면 tr(ρ π(m))."""
    x = oracle.operator(m)
    if density is None:
        return complex(x[0, 0])
    return complex(np.trace(density @ x))


def fock_bilinear(oracle: FockOracle, h: SelfDualHamiltonian) -> np.ndarray:
    """⟨B, HB⟩ = Σ_ij ⟨e_i, H e_j⟩ π(B(e_j)) π(B(e_i))*."""
    space = oracle.space
    if h.space.dim != space.dim:
        raise SpaceMismatch("Hamiltonian and oracle live on different spaces")
    eye = np.eye(space.dim, dtype=complex)
    fields = [oracle.field(eye[:, i]) for i in range(space.dim)]
    daggers = [f.conj().T for f in fields]
    out = np.zeros((oracle.fock_dim, oracle.fock_dim), dtype=complex)
    for j, fj in enumerate(fields):
        acc = np.zeros_like(out)
        for i in np.flatnonzero(h.matrix[:, j]):
            acc += h.matrix[i, j] * daggers[i]
        out += fj @ acc
    return out


def gibbs_density(oracle: FockOracle, h: SelfDualHamiltonian, beta: float) -> np.ndarray:
    """e^{(β/2)⟨B,HB⟩} / Z."""
    x = fock_bilinear(oracle, h)
    w, v = sla.eigh(0.5 * (x + x.conj().T))
    weights = np.exp(0.5 * beta * (w - w.max()))
    rho = (v * weights) @ v.conj().T
    return rho / np.trace(rho).real


def conjugated_field(oracle: FockOracle, h: SelfDualHamiltonian, phi: np.ndarray, z: complex) -> np.ndarray:
    """e^{−(z/2)⟨B,HB⟩} π(B(φ)*) e^{(z/2)⟨B,HB⟩}."""
    x = fock_bilinear(oracle, h)
    left = sla.expm(-0.5 * z * x)
    right = sla.expm(0.5 * z * x)
    return left @ oracle.field(phi).conj().T @ right

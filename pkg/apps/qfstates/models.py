from __future__ import annotations
from dataclasses import dataclass
from typing import Iterable, List, Tuple

import numpy as np

from apps.selfdual.models import SelfDualSpace

from .exceptions import SpaceMismatch


@dataclass(frozen=True, eq=False)
class Symbol:
    """준자유 상태의 symbol S: 0 ≤ S ≤ 1, S + ΓSΓ = 1."""
    space: SelfDualSpace
    S: np.ndarray

    def __post_init__(self):
        s = np.array(self.S, dtype=complex, copy=True)
        s.setflags(write=False)
        object.__setattr__(self, "S", s)

    def two_point(self, phi: np.ndarray, chi: np.ndarray) -> complex:
        """ω(B(φ)B(χ)*) = ⟨φ, Sχ⟩."""
        return complex(np.vdot(phi, self.S @ chi))


@dataclass(frozen=True, eq=False)
class Factor:
    vector: np.ndarray
    star: bool = False


@dataclass(frozen=True, eq=False)
class Monomial:
    """B(φ₁)^{(*)}···B(φ_k)^{(*)} (왼쪽부터)."""
    factors: Tuple[Factor, ...] = ()

    @classmethod
    def of(cls, *items) -> "Monomial":
        """items: 벡터 또는 (벡터, star) 쌍."""
        out: List[Factor] = []
        for it in items:
            if isinstance(it, Factor):
                out.append(it)
            elif isinstance(it, tuple):
                out.append(Factor(vector=np.asarray(it[0], dtype=complex), star=bool(it[1])))
            else:
                out.append(Factor(vector=np.asarray(it, dtype=complex)))
        return cls(factors=tuple(out))

    def __len__(self) -> int:
        return len(self.factors)

    def __mul__(self, other: "Monomial") -> "Monomial":
        return Monomial(factors=self.factors + other.factors)

    def adjoint(self) -> "Monomial":
        return Monomial(factors=tuple(Factor(f.vector, not f.star) for f in reversed(self.factors)))

    def plain_vectors(self, space: SelfDualSpace) -> List[np.ndarray]:
        """B(φ)* = B(Γφ) 로 바꾼 벡터 목록."""
        out = []
        for f in self.factors:
            v = np.asarray(f.vector, dtype=complex)
            if v.shape != (space.dim,):
                raise SpaceMismatch(f"factor of shape {v.shape} does not live in a {space.dim}-dim space")
            out.append(space.gamma(v) if f.star else v)
        return out


def basis_vector(space: SelfDualSpace, i: int) -> np.ndarray:
    e = np.zeros(space.dim, dtype=complex)
    e[i] = 1.0
    return e


def monomials_from_indices(space: SelfDualSpace, pairs: Iterable[Tuple[int, bool]]) -> Monomial:
    return Monomial.of(*[(basis_vector(space, i), star) for i, star in pairs])

"""
Z₂ 사영 지표 σ(P₁,P₂) = (−1)^{dim(P₁ ∧ P₂⊥)}.

독립적인 네 가지 계산:
  A  P₁P₂⊥P₁ 의 고유값 1 개수
  B  ker(P₁ + P₂ − 1) 차원의 절반 (항상 짝수)
  C  P₂ = U*P₁U 인 U 가 주어지면 sign det U
  D  Majorana 기저에서 Pf(−i(2W*PW − 1)) 부호의 곱 (판정 띠 없음)
"""
from __future__ import annotations
import logging
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import linalg as sla

from apps.qfstates.pfaffian import pfaffian
from apps.selfdual.models import BasisProjection, SelfDualSpace
from apps.selfdual.services import bogoliubov_parity, opnorm, validate_basis_projection

from . import conf
from .exceptions import IllConditioned, MethodDisagreement, Z2IndexError
from .models import IndexReport

log = logging.getLogger(__name__)

ProjectionLike = Union[BasisProjection, np.ndarray]


def _matrix(p: ProjectionLike) -> np.ndarray:
    return np.asarray(p.matrix if isinstance(p, BasisProjection) else p, dtype=complex)


def _herm(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.conj().T)


# ---------- 방법 A ----------
def intersection_spectrum(p1: ProjectionLike, p2_perp: ProjectionLike) -> np.ndarray:
    a, b = _matrix(p1), _matrix(p2_perp)
    return sla.eigvalsh(_herm(a @ b @ a))


def _count_ones(w: np.ndarray, tol_one: float, what: str) -> Tuple[int, float]:
    """(1 근처 개수, conditioning). 애매한 띠에 걸리면 IllConditioned."""
    near_one = w >= 1.0 - tol_one
    ambiguous = (w > 1.0 - tol_one * conf.AMBIGUITY_FACTOR) & ~near_one
    if np.any(ambiguous):
        worst = float(np.max(1.0 - w[ambiguous]))
        raise IllConditioned(
            f"{what}: eigenvalue at distance {worst:.2e} from 1 cannot be counted", residual=worst)
    lo, hi = conf.WARN_BAND
    if np.any((w > lo) & (w < hi)):
        log.warning("%s: eigenvalues inside (%.1f, %.1f); index near a degeneracy", what, lo, hi)
    rest = w[(w > tol_one) & ~near_one]
    conditioning = float(np.min(np.minimum(rest, 1.0 - rest))) if rest.size else 0.5
    return int(near_one.sum()), conditioning


def intersection_dim(p1: ProjectionLike, p2_perp: ProjectionLike,
                     tol_one: Optional[float] = None) -> int:
    tol = conf.tol_one() if tol_one is None else tol_one
    n, _ = _count_ones(intersection_spectrum(p1, p2_perp), tol, "intersection")
    return n


def wedge(p: ProjectionLike, q: ProjectionLike, tol_one: Optional[float] = None) -> np.ndarray:
    """P ∧ Q: ran P ∩ ran Q 위로의 직교 사영."""
    tol = conf.tol_one() if tol_one is None else tol_one
    a, b = _matrix(p), _matrix(q)
    w, v = sla.eigh(_herm(a @ b @ a))
    _count_ones(w, tol, "wedge")
    cols = v[:, w >= 1.0 - tol]
    return cols @ cols.conj().T


# ---------- 방법 B ----------
def kernel_dim(p1: ProjectionLike, p2: ProjectionLike, tol: float = conf.KERNEL_TOL) -> int:
    a, b = _matrix(p1), _matrix(p2)
    w = sla.eigvalsh(_herm(a + b - np.eye(a.shape[0])))
    return int(np.sum(np.abs(w) <= tol))


# ---------- 방법 D ----------
def pfaffian_parity(space: SelfDualSpace, p: ProjectionLike) -> int:
    """sign Pf(−i(2W*PW − 1)), W = Γ-실수 기저. 표준 사영에서 +1."""
    w = space.majorana_basis()
    a = -1j * (2.0 * w.conj().T @ _matrix(p) @ w - np.eye(space.dim))
    imag = opnorm(a.imag)
    if imag > 1e-8:
        raise Z2IndexError(f"Majorana form is not real (‖Im A‖ = {imag:.2e}); not a basis projection",
                           residual=imag)
    pf = pfaffian(a.real)
    if abs(abs(pf) - 1.0) > conf.PARITY_SLACK:
        log.warning("|Pf(A)| = %.6f drifts from 1", abs(pf))
    return 1 if pf.real > 0 else -1


def relative_parity(space: SelfDualSpace, p1: ProjectionLike, p2: ProjectionLike) -> int:
    return pfaffian_parity(space, p1) * pfaffian_parity(space, p2)


def chained_parity(space: SelfDualSpace, projections: Sequence[ProjectionLike]) -> int:
    """σ(P₀,P₁)σ(P₁,P₂)···, 곱셈성으로 σ(P₀,P_last) 와 같다."""
    parities = [pfaffian_parity(space, p) for p in projections]
    out = 1
    for a, b in zip(parities, parities[1:]):
        out *= a * b
    return out


# ---------- 종합 ----------
def _as_basis(space: SelfDualSpace, p: ProjectionLike) -> BasisProjection:
    return validate_basis_projection(space, _matrix(p))


def z2_index(p1: BasisProjection, p2: BasisProjection, u: Optional[np.ndarray] = None, *,
             tol_one: Optional[float] = None, strict: bool = True) -> IndexReport:
    """
    모든 방법을 계산하고 일치 여부를 검사한다.
    strict=False 면 불일치를 예외 대신 methods_agree=False 로 돌려준다.
    """
    space = p1.space
    if p2.space.dim != space.dim:
        raise Z2IndexError(f"projections live on spaces of dim {space.dim} and {p2.space.dim}")
    p1 = _as_basis(space, p1)
    p2 = _as_basis(space, p2)
    tol = conf.tol_one() if tol_one is None else tol_one

    w = intersection_spectrum(p1, p2.complement)
    dim_int, conditioning = _count_ones(w, tol, "intersection")
    kdim = kernel_dim(p1, p2)
    methods: Dict[str, int] = {
        "intersection": (-1) ** dim_int,
        "pfaffian": relative_parity(space, p1, p2),
    }
    problems = []
    if kdim % 2:
        problems.append(f"odd kernel dimension {kdim}")
    else:
        methods["kernel"] = (-1) ** (kdim // 2)
    if kdim != 2 * dim_int:
        problems.append(f"kernel dimension {kdim} != 2 x intersection {dim_int}")

    det = None
    if u is not None:
        u = np.asarray(u, dtype=complex)
        moved = opnorm(u.conj().T @ p1.matrix @ u - p2.matrix)
        if moved > 1e-8:
            raise Z2IndexError(f"U does not carry P1 to P2 (‖U*P₁U − P₂‖ = {moved:.2e})", residual=moved)
        transform = bogoliubov_parity(space, u)
        methods["determinant"] = transform.parity
        det = transform.det

    if len(set(methods.values())) > 1:
        problems.append(f"methods disagree: {dict(sorted(methods.items()))}")
    agree = not problems
    if problems:
        msg = "; ".join(problems)
        if strict:
            raise MethodDisagreement(msg)
        log.warning("z2 index: %s", msg)

    return IndexReport(
        sigma=methods["intersection"], dim_intersection=dim_int, kernel_dim=kdim,
        conditioning=conditioning, methods_agree=agree, methods=methods, det=det,
    )

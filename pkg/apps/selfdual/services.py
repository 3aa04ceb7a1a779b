from __future__ import annotations
import logging
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np
from scipy import linalg as sla

from . import conf
from .exceptions import (
    DetNotReal, KernelParityMismatch, NotBasisProjection, NotGammaCommuting,
    NotHermitian, NotSelfDual, NotUnitary, ShapeMismatch, UnpairedLabel,
)
from .models import (
    MINUS, PLUS, BasisProjection, BogoliubovTransform, Label,
    SelfDualHamiltonian, SelfDualSpace,
)

log = logging.getLogger(__name__)


# ---------- 공용 노름 ----------
def opnorm(a: np.ndarray) -> float:
    """연산자 노름 (최대 특이값). 빈 행렬은 0."""
    a = np.asarray(a)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def _check_square(space: SelfDualSpace, a: np.ndarray, what: str) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.shape != (space.dim, space.dim):
        raise ShapeMismatch(f"{what} has shape {a.shape}, expected {(space.dim, space.dim)}")
    return a


# ---------- 공간 ----------
def _normalize_label(raw: Sequence) -> Label:
    x, spin, tag = raw
    if isinstance(x, (int, np.integer)):
        x = (int(x),)
    else:
        x = tuple(int(c) for c in x)
    if tag not in (MINUS, PLUS):
        raise UnpairedLabel(f"Unknown particle/hole tag {tag!r} on site {x}")
    return (x, int(spin), tag)


def make_space(labels: Iterable[Sequence], *, periods: Optional[Sequence[Optional[int]]] = None,
               box_radius: Optional[int] = None) -> SelfDualSpace:
    """
    라벨 목록 -> SelfDualSpace.
    G 는 각 (x,s,-)/(x,s,+) 쌍을 교환하는 치환행렬, 즉 Γ = 쌍교환 ∘ 켤레.
    """
    labs: List[Label] = [_normalize_label(lab) for lab in labels]
    if not labs:
        raise UnpairedLabel("Label list is empty")
    if len(set(labs)) != len(labs):
        raise UnpairedLabel("Label list contains duplicates")
    labs.sort(key=lambda lab: (lab[0], lab[1], 0 if lab[2] == MINUS else 1))

    index = {lab: i for i, lab in enumerate(labs)}
    n = len(labs)
    partner = np.empty(n, dtype=int)
    for i, (x, s, tag) in enumerate(labs):
        other = (x, s, PLUS if tag == MINUS else MINUS)
        j = index.get(other)
        if j is None:
            raise UnpairedLabel(f"Label {(x, s, tag)} has no Γ-partner {other}")
        partner[i] = j

    g = np.zeros((n, n), dtype=complex)
    g[np.arange(n), partner] = 1.0
    return SelfDualSpace(
        labels=tuple(labs), gamma_matrix=g, partner=partner,
        periods=tuple(periods) if periods is not None else None,
        box_radius=box_radius,
    )


def chain_labels(n_sites: int, *, first_site: int = 0, n_spins: int = 1) -> List[Label]:
    return [((x,), s, tag)
            for x in range(first_site, first_site + n_sites)
            for s in range(n_spins)
            for tag in (MINUS, PLUS)]


# ---------- 자기쌍대 해밀토니안 ----------
def symmetrize(space: SelfDualSpace, a: np.ndarray) -> np.ndarray:
    """에르미트 부분을 취한 뒤 (A − ΓAΓ)/2."""
    a = _check_square(space, a, "matrix")
    h = 0.5 * (a + a.conj().T)
    return 0.5 * (h - space.gamma_conjugate(h))


def validate_self_dual(space: SelfDualSpace, matrix: np.ndarray, *,
                       rtol: Optional[float] = None, meta: Optional[Dict] = None) -> SelfDualHamiltonian:
    h = _check_square(space, matrix, "Hamiltonian")
    tol = conf.rtol() if rtol is None else rtol
    norm = opnorm(h)

    herm = opnorm(h - h.conj().T)
    if herm > tol * norm:
        raise NotHermitian(f"‖H − H*‖ = {herm:.3e} exceeds {tol:.1e}·‖H‖", residual=herm)

    sd = opnorm(h + space.gamma_conjugate(h))
    if sd > tol * norm:
        raise NotSelfDual(f"‖H + ΓHΓ‖ = {sd:.3e} exceeds {tol:.1e}·‖H‖", residual=sd)

    tr = abs(np.trace(h))
    if tr > conf.TRACE_TOL * norm * space.dim:
        raise NotSelfDual(f"|tr H| = {tr:.3e} is not zero", residual=tr)

    residuals = {"hermitian": herm, "self_dual": sd, "trace": tr}
    return SelfDualHamiltonian(space=space, matrix=h, meta={**(meta or {}), "residuals": residuals})


def random_self_dual(space: SelfDualSpace, seed: int, norm_scale: float = 1.0) -> SelfDualHamiltonian:
    """테스트 픽스처용. 스펙트럼 반경 = norm_scale."""
    if norm_scale <= 0:
        raise ValueError("norm_scale must be positive")
    rng = np.random.default_rng(seed)
    n = space.dim
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    h = symmetrize(space, a)
    h = norm_scale * h / opnorm(h)
    return validate_self_dual(space, h, meta={"model": "random", "seed": int(seed)})


# ---------- 기저 사영 ----------
def validate_basis_projection(space: SelfDualSpace, matrix: np.ndarray) -> BasisProjection:
    p = _check_square(space, matrix, "projection")
    idem = opnorm(p @ p - p)
    herm = opnorm(p - p.conj().T)
    if idem > 1e-10 or herm > 1e-10:
        raise NotBasisProjection(f"not an orthogonal projection (‖P²−P‖={idem:.2e}, ‖P−P*‖={herm:.2e})",
                                 residual=max(idem, herm))
    gam = opnorm(space.gamma_conjugate(p) - (np.eye(space.dim) - p))
    if gam > conf.PROJECTION_GAMMA_TOL:
        raise NotBasisProjection(f"‖ΓPΓ − (1−P)‖ = {gam:.3e}", residual=gam)
    rank_err = abs(np.trace(p).real - space.n_modes)
    if rank_err > 1e-8:
        raise NotBasisProjection(f"tr P differs from N = {space.n_modes} by {rank_err:.3e}", residual=rank_err)
    return BasisProjection(space=space, matrix=p)


def one_particle_hamiltonian(h: SelfDualHamiltonian, p: BasisProjection) -> np.ndarray:
    """H_P = 2PHP 를 ran P 의 정규직교 기저로 표현 (N×N)."""
    w = p.range_basis()
    return 2.0 * (w.conj().T @ h.matrix @ w)


def diagonalization_residual(h: SelfDualHamiltonian, p: BasisProjection) -> float:
    """‖H − ½(PH_PP − P⊥ΓH_PΓP⊥)‖, H_P = 2PHP. P 가 H 를 대각화하면 0."""
    space = h.space
    hp = 2.0 * p.matrix @ h.matrix @ p.matrix
    q = p.complement
    recon = 0.5 * (hp - q @ space.gamma_conjugate(hp) @ q)
    return opnorm(h.matrix - recon)


def diagonalizes(h: SelfDualHamiltonian, p: BasisProjection, rtol: Optional[float] = None) -> bool:
    tol = conf.rtol() if rtol is None else rtol
    return diagonalization_residual(h, p) <= max(tol * h.norm, 1e-14)


# ---------- 보골리우보프 변환 ----------
def gamma_commutation_residual(space: SelfDualSpace, u: np.ndarray) -> float:
    """‖UG − G·conj(U)‖ (= ‖UΓ − ΓU‖)."""
    g = space.gamma_matrix
    return opnorm(u @ g - g @ np.conj(u))


def bogoliubov_parity(space: SelfDualSpace, u: np.ndarray,
                      projection: Optional[BasisProjection] = None) -> BogoliubovTransform:
    u = _check_square(space, u, "unitary")
    unit = opnorm(u.conj().T @ u - np.eye(space.dim))
    if unit > 1e-10:
        raise NotUnitary(f"‖U*U − 1‖ = {unit:.3e}", residual=unit)
    gc = gamma_commutation_residual(space, u)
    if gc > 1e-9:
        raise NotGammaCommuting(f"‖UG − G·conj(U)‖ = {gc:.3e}", residual=gc)

    det = complex(np.linalg.det(u))
    if abs(det.imag) > conf.DET_IMAG_MAX:
        raise DetNotReal(f"Im det U = {det.imag:.3e}; numerical breakdown", residual=abs(det.imag))
    if abs(det.imag) > 1e-8 or abs(abs(det) - 1.0) > 1e-8:
        log.warning("det U = %s drifts from ±1", det)
    parity = 1 if det.real > 0 else -1

    kernel_dim = None
    if projection is not None:
        w = projection.range_basis()
        sv = np.linalg.svd(w.conj().T @ u @ w, compute_uv=False)
        kernel_dim = int(np.sum(sv < conf.KERNEL_TOL))
        if (-1) ** kernel_dim != parity:
            raise KernelParityMismatch(
                f"dim ker(PUP) = {kernel_dim} disagrees with sign det U = {parity}")
    return BogoliubovTransform(space=space, matrix=u, parity=parity, det=det, kernel_dim=kernel_dim)


def mode_swap(space: SelfDualSpace, modes: Iterable[int]) -> np.ndarray:
    """선택한 모드마다 e_- ↔ e_+ 교환. det = (−1)^{모드 수}."""
    u = np.eye(space.dim, dtype=complex)
    minus, plus = space.minus_indices, space.plus_indices
    for k in modes:
        i, j = minus[k], plus[k]
        u[i, i] = u[j, j] = 0.0
        u[i, j] = u[j, i] = 1.0
    return u


def random_bogoliubov(space: SelfDualSpace, seed: int, *, scale: float = 3.0,
                      swapped_modes: Iterable[int] = ()) -> np.ndarray:
    """exp(iD)·swap, D 는 자기쌍대 에르미트 (iD 가 Γ 와 교환)."""
    d = random_self_dual(space, seed, norm_scale=scale).matrix
    return sla.expm(1j * d) @ mode_swap(space, swapped_modes)

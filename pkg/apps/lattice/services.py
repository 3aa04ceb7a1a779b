from __future__ import annotations
import logging
from typing import Dict, Optional

import numpy as np

from apps.selfdual.exceptions import ShapeMismatch
from apps.selfdual.models import MINUS, PLUS, SelfDualHamiltonian, SelfDualSpace
from apps.selfdual.services import chain_labels, make_space, opnorm, validate_self_dual

from .exceptions import BoxMismatch, LatticeError
from .geometry import box_sites, neighbors
from .models import (
    OPEN, PERIODIC, DisorderRealization, LatticeConfig, QuadraticModel, Restriction, Site,
)

log = logging.getLogger(__name__)


# ---------- 상자 공간 ----------
def build_box_space(config: LatticeConfig) -> SelfDualSpace:
    labels = [(x, s, tag)
              for x in box_sites(config)
              for s in range(config.n_spins)
              for tag in (MINUS, PLUS)]
    return make_space(labels, periods=config.periods, box_radius=config.L)


# ---------- 그래프 라플라시안 / Anderson ----------
def _site_laplacian(config: LatticeConfig, hopping_scale: float) -> np.ndarray:
    sites = box_sites(config)
    index = {x: i for i, x in enumerate(sites)}
    lap = np.zeros((len(sites), len(sites)))
    for x in sites:
        i = index[x]
        nbrs = neighbors(x, config)
        lap[i, i] = len(nbrs)
        for y in nbrs:
            lap[i, index[y]] -= hopping_scale
    return lap


def build_laplacian(config: LatticeConfig, hopping_scale: float = 1.0) -> np.ndarray:
    """[Δψ](v) = deg(v)ψ(v) − s·Σ_w ψ(w), 스핀마다 같은 블록."""
    if not (0.0 <= hopping_scale <= 1.0):
        raise LatticeError(f"hopping scale must lie in [0, 1], got {hopping_scale}")
    lap = _site_laplacian(config, hopping_scale)
    return np.kron(lap, np.eye(config.n_spins)).astype(complex)


def _zigzag(v: int) -> int:
    return 2 * v if v >= 0 else -2 * v - 1


def sample_disorder(config: LatticeConfig, seed: int, lam: float) -> DisorderRealization:
    """
    i.i.d. 균등분포 [−1,1]. (seed, site) 키의 Philox 스트림이라
    사이트 열거 순서와 무관하다.
    """
    if seed < 0:
        raise LatticeError("disorder seed must be a non-negative 64-bit integer")
    potential: Dict[Site, float] = {}
    for x in box_sites(config):
        key = np.random.SeedSequence([int(seed)] + [_zigzag(c) for c in x])
        rng = np.random.Generator(np.random.Philox(key))
        potential[x] = float(rng.uniform(-1.0, 1.0))
    return DisorderRealization(seed=int(seed), potential=potential, lam=float(lam))


def build_anderson(config: LatticeConfig, realization: DisorderRealization, *,
                   hopping_scale: float = 1.0, fermi: float = 0.0) -> np.ndarray:
    """h = Δ + λV_ρ − fermi·1."""
    h = build_laplacian(config, hopping_scale)
    v = np.array([realization.potential.get(x, 0.0) for x in box_sites(config)])
    h = h + realization.lam * np.kron(np.diag(v), np.eye(config.n_spins))
    if fermi:
        h = h - fermi * np.eye(h.shape[0])
    return h


# ---------- 2차 모델 임베딩 ----------
def embed_quadratic(model: QuadraticModel, space: SelfDualSpace, *,
                    meta: Optional[dict] = None) -> SelfDualHamiltonian:
    """
    κ(h) + κ̃(g), (−,+) 교차 배치:
      H[−,−] = ½h, H[+,+] = −½conj(h), H[−,+] = ½g, H[+,−] = ½g*.
    상수항 ½tr h 는 meta["trace_shift"] 에 남긴다.
    """
    n = space.n_modes
    h = np.asarray(model.h, dtype=complex)
    g = model.pairing()
    if h.shape != (n, n) or g.shape != (n, n):
        raise ShapeMismatch(f"h {h.shape} / g {g.shape} do not match {n} modes")
    scale = max(opnorm(h), opnorm(g), 1.0)
    if opnorm(h - h.conj().T) > 1e-10 * scale:
        raise LatticeError("one-particle matrix h is not Hermitian")
    if opnorm(g + g.T) > 1e-10 * scale:
        raise LatticeError("pairing matrix g is not antisymmetric")

    m, p = space.minus_indices, space.plus_indices
    out = np.zeros((space.dim, space.dim), dtype=complex)
    out[np.ix_(m, m)] = 0.5 * h
    out[np.ix_(p, p)] = -0.5 * np.conj(h)
    out[np.ix_(m, p)] = 0.5 * g
    out[np.ix_(p, m)] = 0.5 * g.conj().T
    info = {"trace_shift": 0.5 * float(np.trace(h).real), **(meta or {})}
    return validate_self_dual(space, out, meta=info)


def build_anderson_hamiltonian(config: LatticeConfig, realization: DisorderRealization, *,
                               hopping_scale: float = 1.0, fermi: float = 0.0,
                               space: Optional[SelfDualSpace] = None) -> SelfDualHamiltonian:
    space = space or build_box_space(config)
    h = build_anderson(config, realization, hopping_scale=hopping_scale, fermi=fermi)
    return embed_quadratic(QuadraticModel(h=h), space, meta={
        "model": "anderson", "seed": realization.seed, "lam": realization.lam,
        "hopping": hopping_scale, "fermi": fermi,
    })


# ---------- Kitaev 사슬 ----------
def _chain_bonds(n_sites: int, boundary: str):
    bonds = [(j, j + 1) for j in range(n_sites - 1)]
    if boundary == PERIODIC:
        bonds.append((n_sites - 1, 0))
    return bonds


def build_kitaev_chain(n_sites: int, t: float, mu: float, delta: float,
                       boundary: str = OPEN, *, first_site: int = 0) -> SelfDualHamiltonian:
    """
    h = −t·(최근접 hopping) − μ·1, g_{j,j+1} = Δ = −g_{j+1,j}.
    H = ½·BdG 이므로 고리의 분산은 ±½√((2t cos k + μ)² + 4Δ² sin² k).
    """
    if n_sites < 2:
        raise LatticeError("Kitaev chain needs at least 2 sites")
    if boundary not in (OPEN, PERIODIC):
        raise LatticeError(f"unknown boundary {boundary!r}")
    space = make_space(chain_labels(n_sites, first_site=first_site),
                       periods=(n_sites,) if boundary == PERIODIC else None)
    h = -mu * np.eye(n_sites, dtype=complex)
    g = np.zeros((n_sites, n_sites), dtype=complex)
    for j, k in _chain_bonds(n_sites, boundary):
        h[j, k] -= t
        h[k, j] -= t
        g[j, k] += delta
        g[k, j] -= delta
    return embed_quadratic(QuadraticModel(h=h, g=g), space, meta={
        "model": "kitaev", "n_sites": n_sites, "t": t, "mu": mu, "delta": delta,
        "boundary": boundary, "first_site": first_site,
    })


# ---------- 유한 부피 제한 ----------
def _box_radius_of(space: SelfDualSpace) -> int:
    if space.box_radius is not None:
        return space.box_radius
    sites = space.sites()
    radius = int(max(max(abs(c) for c in x) for x in sites))
    spins = {lab[1] for lab in space.labels}
    if len(space.labels) != 2 * len(spins) * (2 * radius + 1) ** space.spatial_dim:
        raise BoxMismatch("space labels do not form a centered cubic box")
    return radius


def restrict_finite_volume(h_big: SelfDualHamiltonian, L1: int) -> Restriction:
    """H_L₁ = P H P (작은 공간으로 재색인), ∂H = P H Pᶜ + Pᶜ H P."""
    space = h_big.space
    L2 = _box_radius_of(space)
    if L1 < 0 or L1 > L2:
        raise BoxMismatch(f"cannot restrict a box of radius {L2} to radius {L1}")

    inside = np.array([max(abs(c) for c in lab[0]) <= L1 for lab in space.labels])
    idx = np.flatnonzero(inside)
    small = make_space([space.labels[i] for i in idx], box_radius=L1)

    hm = h_big.matrix
    mask_in = np.outer(inside, inside)
    mask_out = np.outer(~inside, ~inside)
    boundary = np.where(~mask_in & ~mask_out, hm, 0.0)
    outer = np.where(mask_out, hm, 0.0)

    meta = {k: v for k, v in h_big.meta.items() if k != "residuals"}
    inner = validate_self_dual(small, hm[np.ix_(idx, idx)], meta={**meta, "box_radius": L1})
    bnd = validate_self_dual(space, boundary, meta={"boundary_of": L1})
    log.debug("restricted box %s -> %s (boundary norm %.3e)", L2, L1, opnorm(boundary))
    return Restriction(inner=inner, boundary=bnd, outer=outer, indices=idx, big_space=space)

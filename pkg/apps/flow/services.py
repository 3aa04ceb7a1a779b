"""
스펙트럼 흐름 ∂ₛVₛ = −i𝔇ₛVₛ, V₀ = 1.

고유기저 X = V*(∂H)V 에서
  kato:   𝔇_mn = −i X_mn / (λ_m − λ_n)   (m, n 이 서로 다른 띠), 같은 띠 0
  filter: 𝔇_mn = i J(λ_m − λ_n) X_mn     (m ≠ n)
두 생성자 모두 −i[𝔇, E₊] = ∂E₊ 를 만족한다.
"""
from __future__ import annotations
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy import linalg as sla

from apps.selfdual.services import gamma_commutation_residual, opnorm
from apps.spectral.exceptions import GapClosed
from apps.spectral.models import SpectralResolution
from apps.spectral.services import gap_of, resolve

from . import conf
from .exceptions import CutoffTooLarge, FlowError, GapClosedOnPath
from .models import DeficitRow, FilterProfile, FlowResult, HamiltonianPath, StepControl
from .paths import restricted_path

log = logging.getLogger(__name__)


def _as_matrix(dh) -> np.ndarray:
    return np.asarray(getattr(dh, "matrix", dh), dtype=complex)


def _bands(res: SpectralResolution) -> np.ndarray:
    return (res.eigenvalues > res.zero_tol).astype(float)


def min_cross_band_difference(res: SpectralResolution) -> float:
    w = res.eigenvalues
    pos, neg = w[w > res.zero_tol], w[w < -res.zero_tol]
    if not pos.size or not neg.size:
        return math.inf
    return float(pos.min() - neg.max())


# ---------- 생성자 ----------
def projection_derivative(res: SpectralResolution, dh) -> np.ndarray:
    """1차 섭동 ∂E₊: (∂E₊)_ab = X_ab (θ_a − θ_b)/(λ_a − λ_b)."""
    if not res.gapped:
        raise GapClosed(f"E₀ has rank {res.n_zero}; ∂E₊ is undefined")
    v, lam = res.eigenvectors, res.eigenvalues
    x = v.conj().T @ _as_matrix(dh) @ v
    theta = _bands(res)
    cross = theta[:, None] != theta[None, :]
    denom = np.where(cross, lam[:, None] - lam[None, :], 1.0)
    d = np.where(cross, x * (theta[:, None] - theta[None, :]) / denom, 0.0)
    return v @ d @ v.conj().T


def flow_generator(res: SpectralResolution, dh, profile: Optional[FilterProfile] = None,
                   mode: str = conf.KATO) -> np.ndarray:
    if mode not in conf.MODES:
        raise FlowError(f"unknown generator mode {mode!r}")
    if not res.gapped or res.gap <= res.zero_tol:
        raise GapClosed(f"generator needs a gap; E₀ has rank {res.n_zero}")
    v, lam = res.eigenvectors, res.eigenvalues
    x = v.conj().T @ _as_matrix(dh) @ v
    nu = lam[:, None] - lam[None, :]

    if mode == conf.KATO:
        theta = _bands(res)
        cross = theta[:, None] != theta[None, :]
        d = np.where(cross, -1j * x / np.where(cross, nu, 1.0), 0.0)
    else:
        if profile is None:
            raise FlowError("filter mode needs a FilterProfile")
        limit = min_cross_band_difference(res)
        if profile.nu0 > limit + conf.CUTOFF_SLACK:
            raise CutoffTooLarge(f"cutoff nu0 = {profile.nu0:.4e} exceeds the cross-band gap {limit:.4e}")
        d = 1j * profile.J(nu) * x
        np.fill_diagonal(d, 0.0)

    out = v @ d @ v.conj().T
    return 0.5 * (out + out.conj().T)


def generator_residuals(res: SpectralResolution, dh, gen: np.ndarray) -> Dict[str, float]:
    """에르미트성, Γ (Γ𝔇Γ = −𝔇), 대각합, 수송 항등식 잔차."""
    space = res.space
    e_plus = res.E_plus
    transport = projection_derivative(res, dh) + 1j * (gen @ e_plus - e_plus @ gen)
    return {
        "hermitian": opnorm(gen - gen.conj().T),
        "gamma": opnorm(gen + space.gamma_conjugate(gen)),
        "trace": abs(np.trace(gen)),
        "transport": opnorm(transport),
    }


# ---------- 적분 ----------
def _expm_herm(d: np.ndarray, h: float) -> np.ndarray:
    """exp(−ih𝔇), 𝔇 에르미트."""
    w, q = sla.eigh(d)
    return (q * np.exp(-1j * h * w)) @ q.conj().T


def _resolve_on_path(path: HamiltonianPath, s: float) -> SpectralResolution:
    res = resolve(path.at(s))
    if not res.gapped:
        raise GapClosedOnPath(f"gap closes on the path at s = {s:.6g}", s=float(s))
    return res


def scan_min_gap(path: HamiltonianPath, refine: int = conf.NU0_REFINE) -> float:
    grid = path.grid
    n = (len(grid) - 1) * refine + 1
    worst = math.inf
    for s in np.linspace(grid[0], grid[-1], n):
        g = gap_of(path.at(float(s)))
        if g <= 0:
            raise GapClosedOnPath(f"gap closes on the path at s = {s:.6g}", s=float(s))
        worst = min(worst, g)
    return worst


def default_profile(path: HamiltonianPath) -> FilterProfile:
    """nu0 = 2·𝔤_min (10배 세밀 격자), 5% 여유."""
    g_min = scan_min_gap(path)
    return FilterProfile(nu0=2.0 * g_min * conf.NU0_MARGIN)


def _deficit(v: np.ndarray) -> float:
    """tr|1 − V| / 2N."""
    sv = np.linalg.svd(np.eye(v.shape[0]) - v, compute_uv=False)
    return float(sv.sum() / v.shape[0])


def _integrate_once(path: HamiltonianPath, targets: List[np.ndarray], profile: Optional[FilterProfile],
                    mode: str, h: float, reunitarize_tol: float) -> Dict:
    grid = path.grid
    dim = targets[0].shape[0]
    v = np.eye(dim, dtype=complex)
    vs = [v.copy()]
    n_fix = 0
    for a, b in zip(grid, grid[1:]):
        n_sub = max(1, math.ceil((b - a) / h - 1e-12))
        step = (b - a) / n_sub
        for k in range(n_sub):
            mid = a + (k + 0.5) * step
            res = _resolve_on_path(path, mid)
            gen = flow_generator(res, path.derivative_at(mid), profile, mode)
            v = _expm_herm(gen, step) @ v
            drift = opnorm(v.conj().T @ v - np.eye(dim))
            if drift > reunitarize_tol:
                v, _ = sla.polar(v)
                n_fix += 1
                log.warning("re-unitarized V at s = %.6g (drift %.2e)", mid + 0.5 * step, drift)
        vs.append(v.copy())

    errors = [opnorm(vk.conj().T @ e @ vk - targets[0]) for vk, e in zip(vs, targets)]
    return {"V": vs, "errors": errors, "n_fix": n_fix}


def integrate_flow(path: HamiltonianPath, profile: Optional[FilterProfile] = None,
                   mode: str = conf.KATO, control: Optional[StepControl] = None) -> FlowResult:
    """
    중간점 지수 적분. 수송 오차가 목표를 넘으면 h 를 반으로 줄여 처음부터 다시.
    h_min 에서도 못 맞추면 converged=False 로 진단 결과를 돌려준다.
    """
    control = control or StepControl.from_settings()
    targets = [_resolve_on_path(path, s).E_plus for s in path.grid]
    if mode == conf.FILTER and profile is None:
        profile = default_profile(path)
        log.info("filter cutoff nu0 = %.4e", profile.nu0)

    h = control.h
    while True:
        run = _integrate_once(path, targets, profile, mode, h, control.reunitarize_tol)
        err = max(run["errors"])
        if err <= control.transport_tol:
            status, converged = "ok", True
            break
        if h / 2.0 < control.h_min:
            status, converged = "step_floor_reached", False
            log.warning("transport error %.2e above %.1e at step floor h = %.2e",
                        err, control.transport_tol, h)
            break
        log.warning("transport error %.2e above %.1e; halving h = %.2e", err, control.transport_tol, h)
        h /= 2.0

    vs = run["V"]
    space = path.space
    dets = tuple(complex(np.linalg.det(v)) for v in vs)
    drift = max(abs(d - 1.0) for d in dets)
    if drift > conf.DET_TOL:
        log.warning("det V drifts from 1 by %.2e", drift)
    gamma = max(gamma_commutation_residual(space, v) for v in vs)
    if gamma > conf.GAMMA_TOL:
        log.warning("V leaves the Bogoliubov group (Γ residual %.2e)", gamma)

    return FlowResult(
        s_grid=path.grid, V=tuple(vs), transport_errors=tuple(run["errors"]), det_track=dets,
        gamma_residual=gamma, deficit=tuple(_deficit(v) for v in vs), mode=mode, h=h,
        converged=converged, status=status, n_reunitarized=run["n_fix"],
    )


# ---------- 유한 부피 ----------
def _deficit_row(path: HamiltonianPath, L: int, profile, mode, control) -> DeficitRow:
    small = restricted_path(path, L)
    result = integrate_flow(small, profile, mode, control)
    space = small.space
    n_sites = len(space.sites())
    v1 = result.final
    trace_norm = result.deficit[-1] * space.dim
    log.info("deficit study L=%s: tr|1-V|/|Λ| = %.4e, det = %s", L, trace_norm / n_sites, result.det_track[-1])
    return DeficitRow(
        L=L, n_sites=n_sites, deficit=result.deficit[-1], per_site=trace_norm / n_sites,
        det=complex(np.linalg.det(v1)), transport_error=result.transport_error,
        converged=result.converged,
    )


def transport_deficit_study(path: HamiltonianPath, L_list: Sequence[int],
                            profile: Optional[FilterProfile] = None, mode: str = conf.KATO,
                            control: Optional[StepControl] = None,
                            workers: int = 1) -> List[DeficitRow]:
    """각 L 에서 s = 1 의 tr|1 − V₁⁽ᴸ⁾|. 결과는 L_list 순서."""
    control = control or StepControl.from_settings()
    if workers <= 1:
        return [_deficit_row(path, L, profile, mode, control) for L in L_list]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda L: _deficit_row(path, L, profile, mode, control), L_list))

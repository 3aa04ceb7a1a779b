"""
Combes–Thomas 상수/검증과 커널 감쇠율 적합.

  𝐒(H,μ) = max_x Σ_y (e^{μ|x−y|^ε} − 1)|H_xy|,   Δ(H,z) = dist(z, spec H)
  일반:  |⟨𝔢_x,(z−H)^{-1}𝔢_y⟩| ≤ e^{−μ|x−y|^ε} / (Δ − 𝐒)          (Δ > 𝐒)
  갭:    ≤ 4/𝔤 · exp(−μ min{1, 𝔤/(4𝐒)} |x−y|^ε)                 (Δ ≥ 𝔤/2)
"""
from __future__ import annotations
import logging
from typing import Optional

import numpy as np

from apps.lattice.geometry import distance_matrix
from apps.selfdual.models import SelfDualHamiltonian, SelfDualSpace

from . import conf
from .exceptions import InsufficientData
from .models import NOT_APPLICABLE, OK, VIOLATED, CTReport, DecayFit, DecayParams, SpectralResolution
from .services import resolve, resolvent

log = logging.getLogger(__name__)

# 부동소수 여유
_RATIO_SLACK = 1e-9


def combes_thomas_sum(h: SelfDualHamiltonian, mu: float, epsilon: float = 1.0,
                      dist: Optional[np.ndarray] = None) -> float:
    if mu < 0:
        raise ValueError("decay rate mu must be >= 0")
    if dist is None:
        dist = distance_matrix(h.space, epsilon)
    weights = np.expm1(mu * dist)
    return float(np.max(np.sum(weights * np.abs(h.matrix), axis=1)))


def ct_constants(h: SelfDualHamiltonian, mu: float, epsilon: float = 1.0, z: complex = 0j,
                 res: Optional[SpectralResolution] = None) -> DecayParams:
    res = res or resolve(h)
    s_value = combes_thomas_sum(h, mu, epsilon)
    delta_value = float(np.min(np.abs(z - res.eigenvalues)))
    return DecayParams(mu=float(mu), epsilon=float(epsilon), S_value=s_value, Delta_value=delta_value)


def _worst(ratio: np.ndarray, space: SelfDualSpace):
    k = int(np.argmax(ratio))
    i, j = divmod(k, ratio.shape[1])
    return float(ratio[i, j]), (space.labels[i], space.labels[j])


def ct_verify(h: SelfDualHamiltonian, mu: float, epsilon: float = 1.0, z: complex = 1j,
              res: Optional[SpectralResolution] = None) -> CTReport:
    """모든 라벨 쌍에서 두 상계를 검사. 가정이 깨지면 NotApplicable 상태."""
    res = res or resolve(h)
    space = h.space
    dist = distance_matrix(space, epsilon)
    s_value = combes_thomas_sum(h, mu, epsilon, dist=dist)
    delta_value = float(np.min(np.abs(z - res.eigenvalues)))
    params = DecayParams(mu=float(mu), epsilon=float(epsilon), S_value=s_value, Delta_value=delta_value)
    gap = res.gap if res.gapped else 0.0

    if not params.applicable:
        log.info("Combes-Thomas hypothesis fails: Delta=%.3e <= S=%.3e", delta_value, s_value)
        return CTReport(params=params, z=complex(z), status=NOT_APPLICABLE, gap=gap)

    kernel = np.abs(resolvent(res, z))
    bound = np.exp(-mu * dist) / (delta_value - s_value)
    ratio = kernel / bound
    worst, pair = _worst(ratio, space)
    violations = int(np.sum(ratio > 1.0 + _RATIO_SLACK))
    report = dict(
        params=params, z=complex(z), status=VIOLATED if violations else OK,
        worst_ratio=worst, worst_pair=pair, violations=violations, gap=gap,
        n_pairs=int(kernel.size),
    )

    # 갭 경우: Δ(H,z) ≥ 𝔤/2 일 때만
    if gap > 0 and delta_value >= gap / 2.0:
        mu_eff = mu * min(1.0, gap / (4.0 * s_value)) if s_value > 0 else mu
        g_bound = (4.0 / gap) * np.exp(-mu_eff * dist)
        g_ratio = kernel / g_bound
        g_worst, _ = _worst(g_ratio, space)
        g_viol = int(np.sum(g_ratio > 1.0 + _RATIO_SLACK))
        report.update(gapped_status=VIOLATED if g_viol else OK, gapped_mu=float(mu_eff),
                      gapped_worst_ratio=g_worst, gapped_violations=g_viol)
    if violations or report.get("gapped_violations"):
        log.warning("Combes-Thomas bound violated (%s general, %s gapped)",
                    violations, report.get("gapped_violations", 0))
    return CTReport(**report)


def decay_fit(kernel: np.ndarray, space: SelfDualSpace, epsilon: float = 1.0,
              floor: float = conf.DECAY_FLOOR) -> DecayFit:
    """log|K_xy| ~ a − rate·|x−y|^ε 최소제곱 (비대각 쌍, |K| > floor)."""
    k = np.abs(np.asarray(kernel))
    dist = distance_matrix(space, epsilon)
    mask = (k > floor) & ~np.eye(k.shape[0], dtype=bool)
    n_pairs = int(mask.sum())
    if n_pairs < conf.DECAY_MIN_PAIRS:
        raise InsufficientData(f"only {n_pairs} kernel entries above {floor:g}")
    d = dist[mask]
    if np.ptp(d) == 0:
        raise InsufficientData("all usable pairs sit at one distance; no slope to fit")
    y = np.log(k[mask])
    slope, intercept = np.polyfit(d, y, 1)
    resid = float(np.sqrt(np.mean((y - (slope * d + intercept)) ** 2)))
    return DecayFit(rate=float(-slope), intercept=float(intercept), residual=resid,
                    n_pairs=n_pairs, epsilon=float(epsilon))

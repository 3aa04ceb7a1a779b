# apps/experiments/services/crossing.py
"""
s̃ 에서의 교차 분석.

E_{s̃±} ≈ E₊(s̃ ± δ), δ/2 와 비교하는 Richardson 검사.
  P̃₊ = E_{s̃+} ∧ E_{s̃−},  P̃₋ = E_{s̃+}⊥ ∧ E_{s̃−}⊥,
  P̃₀ = E_{s̃+} ∧ E_{s̃−}⊥ + E_{s̃+}⊥ ∧ E_{s̃−}
각 쐐기의 치역이 E_{s̃+} 또는 E_{s̃+}⊥ 안에 있도록 첫 인자를 고정한다.
"""
from __future__ import annotations
import logging
from typing import Dict, Optional, Tuple

import numpy as np

from apps.flow.models import HamiltonianPath
from apps.qfstates.models import Symbol
from apps.qfstates.services import first_separating, make_symbol, weakstar_distance
from apps.selfdual.services import opnorm
from apps.spectral.services import resolve
from apps.z2index.exceptions import IllConditioned
from apps.z2index.services import relative_parity, wedge

from .. import conf
from ..exceptions import DegenerateWedge, ExperimentError, StillGapped
from ..models import CrossingReport, MixedGroundState

log = logging.getLogger(__name__)


def _e_plus(path: HamiltonianPath, s: float) -> np.ndarray:
    s = min(max(s, 0.0), 1.0)
    res = resolve(path.at(s))
    if not res.gapped:
        raise ExperimentError(f"one-sided point s = {s:.10f} is not gapped; delta is too small")
    return res.E_plus


def _one_sided(path: HamiltonianPath, s_tilde: float, delta: float) -> Tuple[np.ndarray, np.ndarray, float]:
    left, right = _e_plus(path, s_tilde - delta), _e_plus(path, s_tilde + delta)
    left2, right2 = _e_plus(path, s_tilde - delta / 2), _e_plus(path, s_tilde + delta / 2)
    rich = max(opnorm(left - left2), opnorm(right - right2))
    return left, right, rich


def _jump(left: np.ndarray, right: np.ndarray, space, n_max: int) -> Optional[Dict[str, float]]:
    s_minus, s_plus = Symbol(space=space, S=left), Symbol(space=space, S=right)
    hit = first_separating(s_minus, s_plus, n_max=n_max)
    if hit is None:
        return None
    m, w = hit
    return {
        "m": m, "w": w, "lower_bound": w / 2 ** m, "radius": w / 2 ** (m + 1),
        "distance": weakstar_distance(s_minus, s_plus, n_max=n_max),
    }


def crossing_analysis(path: HamiltonianPath, s_tilde: float, *, delta: float = conf.DEFAULT_DELTA,
                      n_max: int = 64) -> CrossingReport:
    space = path.space
    d = delta
    while True:
        left, right, rich = _one_sided(path, s_tilde, d)
        if rich > conf.RICHARDSON_TOL:
            problem = f"Richardson difference {rich:.2e}"
        else:
            try:
                p_plus = wedge(right, left)
                p_minus = wedge(np.eye(space.dim) - right, np.eye(space.dim) - left)
                w_right = wedge(right, np.eye(space.dim) - left)
                w_left = wedge(np.eye(space.dim) - right, left)
                break
            except IllConditioned as e:
                problem = str(e)
        if d / conf.DELTA_SHRINK < conf.MIN_DELTA:
            raise DegenerateWedge(f"one-sided projections do not settle at delta = {d:.1e}: {problem}")
        log.info("shrinking delta %.1e -> %.1e (%s)", d, d / conf.DELTA_SHRINK, problem)
        d /= conf.DELTA_SHRINK

    residual = opnorm(p_plus + p_minus + w_right + w_left - np.eye(space.dim))
    if residual > conf.SPLITTING_TOL:
        raise DegenerateWedge(f"‖P̃₊ + P̃₋ + P̃₀ − 1‖ = {residual:.2e}", residual=residual)

    sigma = relative_parity(space, right, left)
    rank = int(round(np.trace(w_right).real))
    if (-1) ** rank != sigma:
        raise DegenerateWedge(f"wedge rank {rank} disagrees with sigma = {sigma}")
    if rank == 0:
        raise StillGapped(f"E₊ does not change across s = {s_tilde:.10f}; no crossing there")

    jump = _jump(left, right, space, n_max)
    if jump:
        log.info("weak* jump: first separating observable #%s, d >= %.3e", jump["m"], jump["lower_bound"])
    return CrossingReport(
        space=space, s_tilde=s_tilde, delta=d, E_left=left, E_right=right, sigma_across=sigma,
        P_plus=p_plus, P_minus=p_minus, W_right=w_right, W_left=w_left,
        splitting_residual=residual, richardson=rich, jump=jump,
    )


def mixed_ground_state(report: CrossingReport, lam: float) -> MixedGroundState:
    """𝒦₁ 밖은 ½ 로 채운 symbol 로 각 인자를 평가한다."""
    half_k1 = 0.5 * report.K1
    return MixedGroundState(
        report=report, lam=lam,
        outer=make_symbol(report.space, report.P_plus + 0.5 * report.P_zero),
        inner_plus=make_symbol(report.space, report.W_right + half_k1),
        inner_minus=make_symbol(report.space, report.W_left + half_k1),
    )

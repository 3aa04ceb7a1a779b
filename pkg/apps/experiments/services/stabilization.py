# apps/experiments/services/stabilization.py
"""
유한 크기 연구.

index_stabilization: 양 끝 경유점의 σ(E₊(H₀⁽ᴸ⁾), E₊(H₁⁽ᴸ⁾)) 를 L 마다 구하고
  그 뒤로 σ 가 변하지 않는 가장 작은 L₀ 를 보고.
run_deficit_study: 반지름 2·max(L) 상자 경로를 L 마다 제한해 tr|1 − V₁⁽ᴸ⁾|.
"""
from __future__ import annotations
import logging
from typing import List, Optional, Sequence

from apps.flow.models import DeficitRow
from apps.flow.services import transport_deficit_study
from apps.lattice.models import OPEN
from apps.spectral.services import resolve
from apps.z2index.services import relative_parity

from .. import conf
from ..exceptions import ExperimentError
from ..models import ExperimentConfig, Stabilization, StabilizationRow
from .factory import build_model, build_path, flow_profile, step_control

log = logging.getLogger(__name__)


def index_stabilization(config: ExperimentConfig, L_list: Optional[Sequence[int]] = None) -> Stabilization:
    L_list = sorted(L_list or config.run["L_list"])
    if not L_list:
        raise ExperimentError("run.L_list is empty")
    rows: List[StabilizationRow] = []
    for L in L_list:
        left, right = resolve(build_model(config, 0, L=L)), resolve(build_model(config, -1, L=L))
        if left.gapped and right.gapped:
            sigma = relative_parity(left.space, left.E_plus, right.E_plus)
        else:
            sigma = 0
            log.warning("L=%s: an endpoint is not gapped", L)
        rows.append(StabilizationRow(L=L, dim=left.space.dim, sigma=sigma,
                                     gap_left=left.gap if left.gapped else 0.0,
                                     gap_right=right.gap if right.gapped else 0.0))
        log.info("L=%s dim=%s sigma=%+d", L, left.space.dim, sigma)

    final = rows[-1].sigma
    L0 = None
    for row in reversed(rows):
        if row.sigma != final or row.sigma == 0:
            break
        L0 = row.L
    return Stabilization(rows=rows, L0=L0, sigma=final if L0 is not None else None)


def run_deficit_study(config: ExperimentConfig, L_list: Optional[Sequence[int]] = None,
                      workers: Optional[int] = None) -> List[DeficitRow]:
    L_list = list(L_list or config.run["L_list"])
    if not L_list:
        raise ExperimentError("run.L_list is empty")
    big = 2 * max(L_list)
    overrides = {"boundary": OPEN} if config.model["kind"] == "kitaev" else {}
    path = build_path(config, L=big, **overrides)
    return transport_deficit_study(
        path, L_list, flow_profile(config), config.flow["mode"], step_control(config),
        workers=workers or conf.workers(),
    )

# apps/experiments/services/sweep.py
from __future__ import annotations
import logging
from typing import List, Optional

import numpy as np

from apps.flow.conf import DET_TOL, KATO
from apps.flow.models import FilterProfile, HamiltonianPath, StepControl
from apps.flow.services import integrate_flow
from apps.spectral.services import resolve
from apps.z2index.exceptions import IllConditioned
from apps.z2index.services import intersection_dim, pfaffian_parity

from ..models import SweepResult
from .gapfind import find_gap_closing

log = logging.getLogger(__name__)


def _neighbour_sigma(e_prev: np.ndarray, e_next: np.ndarray) -> Optional[int]:
    """이웃 격자점 사이 σ (교집합 방법). 판정 불가면 None."""
    try:
        return (-1) ** intersection_dim(e_prev, np.eye(e_next.shape[0]) - e_next)
    except IllConditioned as e:
        log.warning("neighbour index ill-conditioned: %s", e)
        return None


def run_sweep(path: HamiltonianPath, *, profile: Optional[FilterProfile] = None, mode: str = KATO,
              control: Optional[StepControl] = None) -> SweepResult:
    """
    격자 점마다 gap, σ(E₊,₀, E₊,ₛ) (Pfaffian 부호) 와 이웃 교집합 σ 의 누적곱.
    갭이 닫히거나 σ 가 바뀌면 find_gap_closing 으로 넘기고 흐름은 적분하지 않는다.
    """
    space = path.space
    records: List[dict] = []
    closed = False
    p0 = None
    chain: Optional[int] = 1
    e_prev = None
    for s in path.grid:
        res = resolve(path.at(s))
        if not res.gapped:
            closed = True
            break
        parity = pfaffian_parity(space, res.E_plus)
        p0 = parity if p0 is None else p0
        if e_prev is not None and chain is not None:
            step = _neighbour_sigma(e_prev, res.E_plus)
            chain = None if step is None else chain * step
        e_prev = res.E_plus
        sigma = parity * p0
        records.append({"s": float(s), "gap": res.gap, "sigma": sigma, "sigma_chain": chain})
        if sigma != 1:
            closed = True
            break
        log.debug("sweep s=%.4f gap=%.4e", s, res.gap)

    if closed:
        closing = find_gap_closing(path)
        log.warning("sweep aborted: gap closes at s~ = %.8f", closing.s_tilde)
        kept = [r for r in records if r["s"] < closing.s_tilde]
        kept.append({"event": "gap_closing", "s_tilde": closing.s_tilde, "gap": closing.gap,
                     "n_crossings": closing.n_crossings})
        return SweepResult(records=kept, gapped=False, closing=closing)

    flow = integrate_flow(path, profile, mode, control)
    for rec, err, det, deficit in zip(records, flow.transport_errors, flow.det_track, flow.deficit):
        rec.update(transport_error=err, det=[det.real, det.imag], deficit=deficit)
        if abs(det - 1.0) > DET_TOL:
            log.warning("det V = %s at s = %.4f", det, rec["s"])
    log.info("sweep done: %d points, transport error %.2e, status %s",
             len(records), flow.transport_error, flow.status)
    return SweepResult(records=records, gapped=True, flow=flow)

# apps/experiments/services/gapfind.py
"""
갭 닫힘 위치 s̃ 탐색.

1) 10배 세밀 격자 사전 스캔: 각 점의 갭과 Pfaffian 부호
2) 첫 부호 변화 구간을 |구간| ≤ 1e−8 까지 이분
스캔 점에서 갭이 정확히 닫히면 그 점을 바로 돌려준다.
"""
from __future__ import annotations
import logging
from typing import List, Optional, Tuple

import numpy as np
from scipy import linalg as sla

from apps.flow.models import HamiltonianPath
from apps.spectral.services import resolve
from apps.z2index.services import pfaffian_parity

from .. import conf
from ..exceptions import NoSignChange
from ..models import GapClosing

log = logging.getLogger(__name__)


def _sample(path: HamiltonianPath, s: float) -> Tuple[float, int]:
    """(gap, parity). 닫혀 있으면 (0, 0)."""
    res = resolve(path.at(s))
    if not res.gapped:
        return 0.0, 0
    return res.gap, pfaffian_parity(res.space, res.E_plus)


def _events(scan: List[Tuple[float, float, int]]) -> List[Tuple[str, float, float]]:
    """("zero", s, s) 또는 ("flip", a, b) 목록."""
    events = []
    last: Optional[Tuple[float, int]] = None
    in_zero = False
    for s, _, parity in scan:
        if parity == 0:
            if not in_zero:
                events.append(("zero", s, s))
            in_zero = True
            continue
        if last is not None and not in_zero and parity != last[1]:
            events.append(("flip", last[0], s))
        in_zero = False
        last = (s, parity)
    return events


def _min_abs_eig(path: HamiltonianPath, s: float) -> float:
    return float(np.min(np.abs(sla.eigvalsh(path.at(s).matrix))))


def find_gap_closing(path: HamiltonianPath, *, refine: int = conf.PRESCAN_REFINE,
                     tol: float = conf.BISECT_TOL) -> GapClosing:
    grid = path.grid
    n = (len(grid) - 1) * refine + 1
    scan = []
    for s in np.linspace(grid[0], grid[-1], n):
        gap, parity = _sample(path, float(s))
        scan.append((float(s), gap, parity))

    events = _events(scan)
    if not events:
        raise NoSignChange("endpoints lie in the same phase and the gap never closes on the scan")
    if len(events) > 1:
        log.warning("path crosses a gap closing %d times; analysing the first", len(events))

    kind, a, b = events[0]
    if kind == "zero":
        log.info("gap closes on scan point s = %.6g", a)
        return GapClosing(s_tilde=a, gap=_min_abs_eig(path, a), bracket=(a, a),
                          n_crossings=len(events), scan=tuple(scan))

    pa = _sample(path, a)[1]
    while b - a > tol:
        m = 0.5 * (a + b)
        _, pm = _sample(path, m)
        if pm == 0:
            a = b = m
            break
        if pm == pa:
            a = m
        else:
            b = m
    s_tilde = 0.5 * (a + b)
    gap = _min_abs_eig(path, s_tilde)
    if gap > conf.GAP_CLOSED_TOL:
        log.warning("gap at s~ = %.10f is %.2e, above %.1e", s_tilde, gap, conf.GAP_CLOSED_TOL)
    log.info("gap closing at s~ = %.10f (gap %.2e)", s_tilde, gap)
    return GapClosing(s_tilde=s_tilde, gap=gap, bracket=(a, b), n_crossings=len(events), scan=tuple(scan))

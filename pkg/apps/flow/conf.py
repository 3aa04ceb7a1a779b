from __future__ import annotations

from apps.selfdual.conf import setting

DEFAULT_TRANSPORT_TOL = 1e-6
DEFAULT_H = 1e-2
DEFAULT_H_MIN = 1e-5
REUNITARIZE_TOL = 1e-9
GAMMA_TOL = 1e-7
DET_TOL = 1e-6
NU0_REFINE = 10            # 𝔤_min 사전 스캔 격자 배율
NU0_MARGIN = 0.95          # 중간점이 스캔 점 사이에 떨어지는 경우 여유
CUTOFF_SLACK = 1e-12

KATO = "kato"
FILTER = "filter"
MODES = (KATO, FILTER)


def transport_tol() -> float:
    return float(setting("FLOW_TRANSPORT_TOL", DEFAULT_TRANSPORT_TOL))


def h_initial() -> float:
    return float(setting("FLOW_H_INITIAL", DEFAULT_H))


def h_min() -> float:
    return float(setting("FLOW_H_MIN", DEFAULT_H_MIN))

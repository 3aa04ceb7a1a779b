from __future__ import annotations

from apps.selfdual.conf import setting

# 교차 분석
DEFAULT_DELTA = 1e-4
MIN_DELTA = 1e-6
DELTA_SHRINK = 4.0
RICHARDSON_TOL = 1e-3
SPLITTING_TOL = 1e-8

# 갭 닫힘 탐색
PRESCAN_REFINE = 10
BISECT_TOL = 1e-8
GAP_CLOSED_TOL = 1e-6

# 앙상블 / 출력
DEFAULT_REALIZATIONS = 1
MODEL_KINDS = ("kitaev", "anderson", "matrix")
PATH_RULES = ("linear", "ramp")


def out_dir() -> str:
    return str(setting("EXPERIMENTS_OUT_DIR", "out"))


def workers() -> int:
    return int(setting("EXPERIMENTS_WORKERS", 4))

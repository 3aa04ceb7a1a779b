from __future__ import annotations

from apps.selfdual.conf import setting

DEFAULT_TOL_ONE = 1e-6
AMBIGUITY_FACTOR = 1e3     # (1 − tol_one·10³, 1 − tol_one) 는 판정 불가
KERNEL_TOL = 1e-6
WARN_BAND = (0.1, 0.9)
PARITY_SLACK = 1e-6        # |Pf(A)| 가 1 에서 벗어나는 허용치


def tol_one() -> float:
    return float(setting("Z2INDEX_TOL_ONE", DEFAULT_TOL_ONE))

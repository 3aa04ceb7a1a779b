from __future__ import annotations
from typing import Any

from django.conf import settings
from django.core.exceptions import ImproperlyConfigured

# 자기쌍대 공통 상수 (settings 로 덮어쓰기 가능)
DEFAULT_RTOL = 1e-10
GAMMA_TOL = 1e-12          # G 유니터리 / Γ² = 1
PROJECTION_GAMMA_TOL = 1e-9
TRACE_TOL = 1e-9
DET_IMAG_MAX = 1e-6
KERNEL_TOL = 1e-6


def setting(name: str, default: Any) -> Any:
    """settings 가 없으면(라이브러리 단독 사용) default."""
    try:
        return getattr(settings, name, default)
    except ImproperlyConfigured:
        return default


def rtol() -> float:
    return float(setting("SELFDUAL_RTOL", DEFAULT_RTOL))

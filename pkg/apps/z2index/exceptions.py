from __future__ import annotations

from apps.selfdual.exceptions import NotBasisProjection, SelfDualError

__all__ = ["Z2IndexError", "IllConditioned", "MethodDisagreement", "NotBasisProjection"]


class Z2IndexError(SelfDualError):
    pass


class IllConditioned(Z2IndexError):
    """교집합 차원 판정이 모호 (고유값이 1 근처 애매한 띠에 있음)."""


class MethodDisagreement(Z2IndexError):
    pass

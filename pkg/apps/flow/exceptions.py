from __future__ import annotations
from typing import Optional

from apps.selfdual.exceptions import SelfDualError
from apps.spectral.exceptions import GapClosed

__all__ = ["FlowError", "GapClosed", "GapClosedOnPath", "CutoffTooLarge", "PathMismatch"]


class FlowError(SelfDualError):
    pass


class GapClosedOnPath(FlowError):
    """경로 위 s 에서 갭이 닫힘."""

    def __init__(self, message: str, *, s: float, residual: Optional[float] = None):
        super().__init__(message, residual=residual)
        self.s = s


class CutoffTooLarge(FlowError):
    pass


class PathMismatch(FlowError):
    pass

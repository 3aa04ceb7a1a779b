from __future__ import annotations
from typing import Optional


class SelfDualError(ValueError):
    """자기쌍대 계열 공통 예외. residual 은 위반된 잔차(있으면)."""

    def __init__(self, message: str, *, residual: Optional[float] = None):
        super().__init__(message)
        self.residual = residual


class UnpairedLabel(SelfDualError):
    pass


class ShapeMismatch(SelfDualError):
    pass


class NotHermitian(SelfDualError):
    pass


class NotSelfDual(SelfDualError):
    pass


class NotBasisProjection(SelfDualError):
    pass


class NotUnitary(SelfDualError):
    pass


class NotGammaCommuting(SelfDualError):
    pass


class DetNotReal(SelfDualError):
    pass


class KernelParityMismatch(SelfDualError):
    pass


class NotInvolution(SelfDualError):
    pass

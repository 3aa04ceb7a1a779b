from __future__ import annotations

from apps.selfdual.exceptions import SelfDualError


class LatticeError(SelfDualError):
    pass


class BoxMismatch(LatticeError):
    pass

from __future__ import annotations

from apps.selfdual.exceptions import SelfDualError


class QFStatesError(SelfDualError):
    pass


class NotSkew(QFStatesError):
    pass


class OddDimension(QFStatesError):
    pass


class NotSymbol(QFStatesError):
    pass


class SpaceMismatch(QFStatesError):
    pass


class TooManyModes(QFStatesError):
    pass

from __future__ import annotations

from apps.selfdual.exceptions import SelfDualError


class SpectralError(SelfDualError):
    pass


class EigensolverFailure(SpectralError):
    pass


class ZNearSpectrum(SpectralError):
    pass


class GapClosed(SpectralError):
    pass


class InsufficientData(SpectralError):
    pass

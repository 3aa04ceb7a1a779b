from __future__ import annotations

from apps.selfdual.conf import setting

DEFAULT_ZERO_RTOL = 1e-8
Z_NEAR_SPECTRUM = 1e-12
DECAY_FLOOR = 1e-14
DECAY_MIN_PAIRS = 10


def zero_rtol() -> float:
    return float(setting("SPECTRAL_ZERO_RTOL", DEFAULT_ZERO_RTOL))

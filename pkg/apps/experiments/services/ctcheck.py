# apps/experiments/services/ctcheck.py
from __future__ import annotations
import logging
from typing import List, Optional

from apps.spectral.decay import ct_verify
from apps.spectral.models import CTReport

from ..models import ExperimentConfig
from .ensemble import realization_seeds
from .factory import build_model

log = logging.getLogger(__name__)


def run_ct_check(config: ExperimentConfig, n_realizations: Optional[int] = None) -> List[CTReport]:
    """anderson 이면 앙상블 시드마다, 아니면 첫 경유점 하나."""
    ct = config.ct
    z = complex(ct["z_re"], ct["z_im"])
    if config.model["kind"] == "anderson":
        n = int(n_realizations or config.ensemble["n_realizations"])
        hams = [build_model(config, 0, seed=s) for s in realization_seeds(config.run["seed"], n)]
    else:
        hams = [build_model(config, 0)]

    reports = [ct_verify(h, float(ct["mu"]), float(ct["epsilon"]), z) for h in hams]
    failed = sum(not r.passed for r in reports)
    log.info("Combes-Thomas check: %d instances, %d violated, %d not applicable",
             len(reports), failed, sum(r.status == "not_applicable" for r in reports))
    return reports

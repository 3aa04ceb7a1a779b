# apps/experiments/services/ensemble.py
"""
무질서 앙상블.

실현마다 시드 = SeedSequence(master).spawn(n)[i] 의 첫 64비트.
σ 는 같은 기하의 무질서 없는 모델(λ = 0) 의 E₊ 에 대해 잰다.
"""
from __future__ import annotations
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional

import numpy as np

from apps.spectral.decay import decay_fit
from apps.spectral.exceptions import InsufficientData
from apps.spectral.services import resolve, resolvent
from apps.z2index.services import relative_parity

from .. import conf
from ..exceptions import ExperimentError
from ..models import EnsembleMember, EnsembleResult, ExperimentConfig
from .factory import build_model

log = logging.getLogger(__name__)


def realization_seeds(master: int, n: int) -> List[int]:
    children = np.random.SeedSequence(int(master)).spawn(n)
    return [int(c.generate_state(1, dtype=np.uint64)[0]) for c in children]


def _member(config: ExperimentConfig, index: int, seed: int, clean_plus: np.ndarray) -> EnsembleMember:
    h = build_model(config, 0, seed=seed)
    res = resolve(h)
    gap = res.gap if res.gapped else 0.0
    sigma = relative_parity(h.space, clean_plus, res.E_plus) if res.gapped else 0
    ct = config.ct
    rate = resid = None
    try:
        kernel = resolvent(res, complex(ct["z_re"], ct["z_im"]))
        fit = decay_fit(kernel, h.space, float(config.model.get("epsilon", 1.0)))
        rate, resid = fit.rate, fit.residual
    except InsufficientData as e:
        log.info("realization %s: no decay fit (%s)", index, e)
    log.info("realization %s seed=%s gap=%.4e sigma=%+d", index, seed, gap, sigma)
    return EnsembleMember(index=index, seed=seed, gap=gap, sigma=sigma,
                          decay_rate=rate, decay_residual=resid)


def ensemble_run(config: ExperimentConfig, n_realizations: Optional[int] = None,
                 workers: Optional[int] = None) -> EnsembleResult:
    if config.model["kind"] != "anderson":
        raise ExperimentError("ensemble runs need kind = anderson")
    n = int(n_realizations or config.ensemble["n_realizations"])
    if n < 1:
        raise ExperimentError("need at least one realization")
    clean = resolve(build_model(config, 0, lam=0.0))
    if not clean.gapped:
        raise ExperimentError("clean reference model is not gapped; shift fermi to open a gap")
    seeds = realization_seeds(config.run["seed"], n)

    workers = workers or conf.workers()
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        members = list(pool.map(lambda i: _member(config, i, seeds[i], clean.E_plus), range(n)))

    gaps = np.array([m.gap for m in members])
    rates = [m.decay_rate for m in members if m.decay_rate is not None]
    aggregate = {
        "n": n,
        "mean_gap": float(gaps.mean()),
        "min_gap": float(gaps.min()),
        "sigma_counts": {"+1": sum(m.sigma == 1 for m in members),
                         "-1": sum(m.sigma == -1 for m in members),
                         "closed": sum(m.sigma == 0 for m in members)},
        "mean_decay_rate": float(np.mean(rates)) if rates else None,
    }
    log.info("ensemble of %d: min gap %.4e, sigma counts %s", n, aggregate["min_gap"], aggregate["sigma_counts"])
    return EnsembleResult(members=members, aggregate=aggregate)

# apps/experiments/services/factory.py
"""
설정 -> 해밀토니안 / 경로 / 적분 설정.

크기 파라미터 L 을 주면 모델 크기를 덮어쓴다.
  kitaev 고리(periodic): n_sites = 2L
  kitaev 열린 사슬:      n_sites = 2L+1, first_site = −L (중심 상자)
  anderson:              상자 반지름 L
"""
from __future__ import annotations
import logging
from pathlib import Path
from typing import Any, Dict, Optional

from apps.flow.models import FilterProfile, HamiltonianPath, StepControl
from apps.flow.paths import piecewise_path, ramp_path
from apps.lattice.models import PERIODIC, LatticeConfig
from apps.lattice.services import build_anderson_hamiltonian, build_kitaev_chain, sample_disorder
from apps.selfdual.models import SelfDualHamiltonian
from apps.selfdual.serializers import load_matrix
from apps.selfdual.services import chain_labels, make_space, validate_self_dual

from ..exceptions import ExperimentError
from ..models import ExperimentConfig

log = logging.getLogger(__name__)


# ---------- 모델 빌더 (파라미터에 대해 아핀) ----------
def kitaev_builder(*, n_sites, t, mu, delta, boundary, first_site=0) -> SelfDualHamiltonian:
    return build_kitaev_chain(int(n_sites), float(t), float(mu), float(delta), boundary,
                              first_site=int(first_site))


def anderson_builder(*, d, L, spins, boundary, epsilon, lam, hopping, fermi, seed) -> SelfDualHamiltonian:
    lattice = LatticeConfig(d=int(d), L=int(L), spins=tuple(spins), boundary=boundary, epsilon=float(epsilon))
    realization = sample_disorder(lattice, int(seed), float(lam))
    return build_anderson_hamiltonian(lattice, realization, hopping_scale=float(hopping), fermi=float(fermi))


def matrix_builder(*, file, base_dir: Optional[str] = None) -> SelfDualHamiltonian:
    path = Path(base_dir) / file if base_dir else Path(file)
    m = load_matrix(path)
    if m.shape[0] != m.shape[1] or m.shape[0] % 2:
        raise ExperimentError(f"{path}: matrix of shape {m.shape} is not a 2N x 2N operator")
    space = make_space(chain_labels(m.shape[0] // 2))
    return validate_self_dual(space, m, meta={"model": "matrix", "file": str(file)})


BUILDERS = {"kitaev": kitaev_builder, "anderson": anderson_builder}


def sized(params: Dict[str, Any], kind: str, L: Optional[int]) -> Dict[str, Any]:
    if L is None:
        return params
    out = dict(params)
    if kind == "kitaev":
        if out.get("boundary") == PERIODIC:
            out.update(n_sites=max(2, 2 * L), first_site=0)
        else:
            out.update(n_sites=2 * L + 1, first_site=-L)
    elif kind == "anderson":
        out.update(L=L)
    else:
        raise ExperimentError("matrix models have a fixed size")
    return out


def _base_dir(config: ExperimentConfig) -> Optional[str]:
    return str(Path(config.source).parent) if config.source else None


def build_model(config: ExperimentConfig, k: int = 0, *, L: Optional[int] = None,
                **overrides) -> SelfDualHamiltonian:
    """k 번째 경유점의 해밀토니안. 음수 k 는 뒤에서부터."""
    kind = config.model["kind"]
    params = config.waypoint(k % config.n_waypoints)
    params.update(overrides)
    if kind == "matrix":
        return matrix_builder(file=params["file"], base_dir=_base_dir(config))
    return BUILDERS[kind](**sized(params, kind, L))


def build_path(config: ExperimentConfig, *, L: Optional[int] = None, **overrides) -> HamiltonianPath:
    kind = config.model["kind"]
    n = config.n_waypoints
    grid = int(config.path["grid"])
    if config.path["rule"] == "ramp":
        waypoints = [sized({**config.waypoint(k), **overrides}, kind, L) for k in range(n)]
        return ramp_path(BUILDERS[kind], waypoints, grid)
    hams = [build_model(config, k, L=L, **overrides) for k in range(n)]
    return piecewise_path(hams, grid, meta={"model": kind})


def step_control(config: ExperimentConfig) -> StepControl:
    return StepControl(
        h=float(config.flow["h"]), h_min=float(config.flow["h_min"]),
        transport_tol=float(config.tolerances["transport"]),
    )


def flow_profile(config: ExperimentConfig) -> Optional[FilterProfile]:
    nu0 = config.flow.get("nu0")
    return FilterProfile(nu0=float(nu0)) if nu0 else None


def tolerance_settings(config: ExperimentConfig) -> Dict[str, float]:
    """settings 덮어쓰기용 (각 앱 conf 가 호출 시점에 읽는다)."""
    tol = config.tolerances
    return {
        "SELFDUAL_RTOL": float(tol["residual"]),
        "SPECTRAL_ZERO_RTOL": float(tol["zero_rel"]),
        "Z2INDEX_TOL_ONE": float(tol["tol_one"]),
        "FLOW_TRANSPORT_TOL": float(tol["transport"]),
    }

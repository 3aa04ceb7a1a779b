"""
HamiltonianPath 생성기.

  constant   H_s = H₀
  scaled     H_s = (1+s)H₀
  linear     H_s = (1−s)H₀ + sH₁
  piecewise  경유점 사이 선형, 미분 = 구간 차 × 구간 수
  ramp       모델 파라미터 선형 보간 (빌더가 파라미터에 대해 아핀)
  restricted 큰 상자 경로를 반지름 L 상자로 제한
"""
from __future__ import annotations
from typing import Any, Callable, Dict, Mapping, Sequence

import numpy as np

from apps.lattice.services import restrict_finite_volume
from apps.selfdual.models import SelfDualHamiltonian
from apps.selfdual.services import validate_self_dual

from .exceptions import PathMismatch
from .models import HamiltonianPath


def uniform_grid(n: int) -> tuple:
    if n < 2:
        raise PathMismatch("grid needs at least 2 points")
    return tuple(np.linspace(0.0, 1.0, n))


def constant_path(h0: SelfDualHamiltonian, grid: int = 11) -> HamiltonianPath:
    zero = np.zeros_like(h0.matrix)
    return HamiltonianPath(at=lambda s: h0, derivative_at=lambda s: zero,
                           grid=uniform_grid(grid), meta={"rule": "constant"})


def scaled_path(h0: SelfDualHamiltonian, grid: int = 11) -> HamiltonianPath:
    def at(s: float) -> SelfDualHamiltonian:
        return SelfDualHamiltonian(space=h0.space, matrix=(1.0 + s) * h0.matrix, meta=h0.meta)

    return HamiltonianPath(at=at, derivative_at=lambda s: h0.matrix,
                           grid=uniform_grid(grid), meta={"rule": "scaled"})


def _segment(s: float, n_seg: int):
    k = min(int(s * n_seg), n_seg - 1)
    return k, s * n_seg - k


def piecewise_path(waypoints: Sequence[SelfDualHamiltonian], grid: int = 11,
                   meta: Dict = None) -> HamiltonianPath:
    if len(waypoints) < 2:
        raise PathMismatch("a path needs at least 2 waypoints")
    space = waypoints[0].space
    for w in waypoints[1:]:
        if w.space.labels != space.labels:
            raise PathMismatch("waypoints live on different self-dual spaces")
    mats = [w.matrix for w in waypoints]
    n_seg = len(mats) - 1

    def at(s: float) -> SelfDualHamiltonian:
        k, t = _segment(s, n_seg)
        return SelfDualHamiltonian(space=space, matrix=(1.0 - t) * mats[k] + t * mats[k + 1],
                                   meta={"s": float(s)})

    def derivative_at(s: float) -> np.ndarray:
        k, _ = _segment(s, n_seg)
        return n_seg * (mats[k + 1] - mats[k])

    return HamiltonianPath(at=at, derivative_at=derivative_at, grid=uniform_grid(grid),
                           meta={"rule": "linear", "n_segments": n_seg, **(meta or {})})


def linear_path(h0: SelfDualHamiltonian, h1: SelfDualHamiltonian, grid: int = 11) -> HamiltonianPath:
    return piecewise_path([h0, h1], grid)


def _blend(p0: Mapping[str, Any], p1: Mapping[str, Any], t: float) -> Dict[str, Any]:
    out = dict(p0)
    for key, b in p1.items():
        a = p0.get(key, b)
        if isinstance(a, (int, float)) and isinstance(b, (int, float)) and a != b:
            out[key] = (1.0 - t) * a + t * b
        else:
            out[key] = b
    return out


def ramp_path(builder: Callable[..., SelfDualHamiltonian], waypoints: Sequence[Mapping[str, Any]],
              grid: int = 11) -> HamiltonianPath:
    """
    파라미터 경유점 사이를 선형 보간해 빌더를 호출한다.
    빌더가 파라미터에 대해 아핀이면 미분은 인접 경유점 해밀토니안의 차이.
    """
    if len(waypoints) < 2:
        raise PathMismatch("a ramp needs at least 2 parameter waypoints")
    ends = [builder(**w) for w in waypoints]
    space = ends[0].space
    if any(e.space.labels != space.labels for e in ends[1:]):
        raise PathMismatch("ramp waypoints produce different self-dual spaces")
    n_seg = len(ends) - 1

    def at(s: float) -> SelfDualHamiltonian:
        k, t = _segment(s, n_seg)
        return builder(**_blend(waypoints[k], waypoints[k + 1], t))

    def derivative_at(s: float) -> np.ndarray:
        k, _ = _segment(s, n_seg)
        return n_seg * (ends[k + 1].matrix - ends[k].matrix)

    return HamiltonianPath(at=at, derivative_at=derivative_at, grid=uniform_grid(grid),
                           meta={"rule": "ramp", "n_segments": n_seg})


def restricted_path(path: HamiltonianPath, L: int) -> HamiltonianPath:
    """at(s) 와 ∂H_s 를 같은 색인으로 반지름 L 상자에 제한."""
    first = restrict_finite_volume(path.at(path.grid[0]), L)
    idx = first.indices
    small = first.inner.space

    def at(s: float) -> SelfDualHamiltonian:
        return restrict_finite_volume(path.at(s), L).inner

    def derivative_at(s: float) -> np.ndarray:
        d = np.asarray(path.derivative_at(s))[np.ix_(idx, idx)]
        return validate_self_dual(small, d).matrix if np.any(d) else d

    return HamiltonianPath(at=at, derivative_at=derivative_at, grid=path.grid,
                           meta={**path.meta, "box_radius": L})



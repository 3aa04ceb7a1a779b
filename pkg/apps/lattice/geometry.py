from __future__ import annotations
import itertools
from typing import List, Optional, Sequence

import numpy as np

from apps.selfdual.models import SelfDualSpace

from .models import PERIODIC, LatticeConfig, Site


def box_sites(config: LatticeConfig) -> List[Site]:
    """Λ_L 의 사이트, 사전식 순서."""
    return list(itertools.product(range(-config.L, config.L + 1), repeat=config.d))


def neighbors(site: Site, config: LatticeConfig) -> List[Site]:
    out: List[Site] = []
    side = config.side
    for axis in range(config.d):
        for step in (-1, 1):
            y = list(site)
            y[axis] += step
            if config.boundary == PERIODIC:
                y[axis] = (y[axis] + config.L) % side - config.L
            elif abs(y[axis]) > config.L:
                continue
            y_t = tuple(y)
            if y_t != tuple(site) and y_t not in out:
                out.append(y_t)
    return out


def displacement(x: np.ndarray, y: np.ndarray, periods: Optional[Sequence[Optional[int]]] = None) -> np.ndarray:
    d = np.abs(np.asarray(x, dtype=float) - np.asarray(y, dtype=float))
    if periods is not None:
        for axis, p in enumerate(periods):
            if p:
                d[..., axis] = np.minimum(d[..., axis], p - d[..., axis])
    return d


def distance_matrix(space: SelfDualSpace, epsilon: float = 1.0) -> np.ndarray:
    """라벨 쌍의 |x−y|^ε (유클리드, 주기 경계면 토러스 거리)."""
    pos = space.positions()
    d = displacement(pos[:, None, :], pos[None, :, :], space.periods)
    return np.sqrt(np.sum(d * d, axis=-1)) ** epsilon

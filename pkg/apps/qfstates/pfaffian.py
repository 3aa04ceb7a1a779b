"""
Pfaffian.

pfaffian: Parlett–Reid 삼중대각화 (부분 피벗, 교환마다 부호 반전).
pfaffian_by_permutations: 2N ≤ 10 용 정의식 오라클,
  Pf(M) = 1/(2ᴺN!) Σ_σ sgn(σ) Π M_{σ(2i−1)σ(2i)}.
0×0 행렬의 Pf 는 1.
"""
from __future__ import annotations
import itertools
import math

import numpy as np

from apps.selfdual.services import opnorm

from . import conf
from .exceptions import NotSkew, OddDimension


def _check(m: np.ndarray) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotSkew(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] % 2:
        raise OddDimension(f"Pfaffian of odd dimension {a.shape[0]} is not defined")
    skew = opnorm(a + a.T)
    if skew > conf.SKEW_TOL * max(1.0, opnorm(a)):
        raise NotSkew(f"‖M + Mᵀ‖ = {skew:.3e}", residual=skew)
    return a


def pfaffian(m: np.ndarray) -> complex:
    a = _check(m)
    n = a.shape[0]
    if n == 0:
        return 1.0 + 0j
    a = 0.5 * (a - a.T)
    pf = 1.0 + 0j

    for k in range(0, n - 1, 2):
        kp = k + 1 + int(np.argmax(np.abs(a[k + 1:, k])))
        if kp != k + 1:
            a[[k + 1, kp], :] = a[[kp, k + 1], :]
            a[:, [k + 1, kp]] = a[:, [kp, k + 1]]
            pf = -pf
        if a[k + 1, k] == 0.0:
            return 0j
        pf *= a[k, k + 1]
        if k + 2 < n:
            tau = a[k, k + 2:] / a[k, k + 1]
            col = a[k + 2:, k + 1]
            sub = a[k + 2:, k + 2:] + np.outer(tau, col) - np.outer(col, tau)
            # 누적 오차로 깨진 반대칭성 복원
            a[k + 2:, k + 2:] = 0.5 * (sub - sub.T)
    return complex(pf)


def _perm_sign(p) -> int:
    sign, seen = 1, [False] * len(p)
    for i in range(len(p)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = p[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def pfaffian_by_permutations(m: np.ndarray) -> complex:
    a = _check(m)
    n = a.shape[0]
    if n == 0:
        return 1.0 + 0j
    if n > conf.ORACLE_MAX_ORDER:
        raise ValueError(f"permutation oracle is limited to 2N <= {conf.ORACLE_MAX_ORDER}")
    half = n // 2
    total = 0j
    for p in itertools.permutations(range(n)):
        term = complex(_perm_sign(p))
        for i in range(half):
            term *= a[p[2 * i], p[2 * i + 1]]
        total += term
    return total / (2 ** half * math.factorial(half))

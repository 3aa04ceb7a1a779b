from __future__ import annotations
import itertools
import logging
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import expit

from apps.selfdual.models import SelfDualHamiltonian, SelfDualSpace
from apps.selfdual.services import opnorm
from apps.spectral.exceptions import GapClosed
from apps.spectral.models import SpectralResolution
from apps.spectral.services import propagator, resolve

from . import conf
from .exceptions import NotSymbol, SpaceMismatch
from .models import Monomial, Symbol, monomials_from_indices
from .pfaffian import pfaffian

log = logging.getLogger(__name__)


# ---------- symbol ----------
def make_symbol(space: SelfDualSpace, s: np.ndarray) -> Symbol:
    s = np.asarray(s, dtype=complex)
    if s.shape != (space.dim, space.dim):
        raise SpaceMismatch(f"symbol shape {s.shape} does not match dim {space.dim}")
    herm = opnorm(s - s.conj().T)
    if herm > conf.SYMBOL_GAMMA_TOL:
        raise NotSymbol(f"symbol is not Hermitian (‖S − S*‖ = {herm:.2e})", residual=herm)
    w = np.linalg.eigvalsh(0.5 * (s + s.conj().T))
    if w.min() < -conf.SYMBOL_EIG_SLACK or w.max() > 1.0 + conf.SYMBOL_EIG_SLACK:
        raise NotSymbol(f"symbol spectrum [{w.min():.3e}, {w.max():.3e}] leaves [0, 1]")
    gam = opnorm(s + space.gamma_conjugate(s) - np.eye(space.dim))
    if gam > conf.SYMBOL_GAMMA_TOL:
        raise NotSymbol(f"‖S + ΓSΓ − 1‖ = {gam:.3e}", residual=gam)
    return Symbol(space=space, S=s)


def tracial_symbol(space: SelfDualSpace) -> Symbol:
    return Symbol(space=space, S=0.5 * np.eye(space.dim, dtype=complex))


def gibbs_symbol(h: SelfDualHamiltonian, beta: float,
                 res: Optional[SpectralResolution] = None) -> Symbol:
    """S = (1 + e^{−βH})^{-1}. β = 0 은 tracial 과 정확히 같다."""
    if beta < 0:
        raise ValueError("beta must be >= 0")
    if beta == 0:
        return tracial_symbol(h.space)
    res = res or resolve(h)
    return make_symbol(h.space, res.function(lambda lam: expit(beta * lam)))


def ground_symbol(res: SpectralResolution) -> Symbol:
    if not res.gapped:
        raise GapClosed(f"ground state is not unique: E₀ has rank {res.n_zero}")
    return Symbol(space=res.space, S=res.E_plus)


def transform_symbol(symbol: Symbol, u: np.ndarray) -> Symbol:
    """ω∘χ_U 의 symbol U*SU."""
    return make_symbol(symbol.space, u.conj().T @ symbol.S @ u)


def evolve_symbol(symbol: Symbol, res: SpectralResolution, t: float) -> Symbol:
    """ω∘τ_t, τ_t(B(φ)) = B(e^{itH}φ)."""
    return transform_symbol(symbol, propagator(res, t))


# ---------- 평가 ----------
def pair_matrix(state: Symbol, m: Monomial) -> np.ndarray:
    """M_kl = ω(B(ψ_k)B(ψ_l)) = ⟨ψ_k, SΓψ_l⟩ (k<l), 반대칭 완성."""
    space = state.space
    vecs = m.plain_vectors(space)
    x = np.conj(np.array(vecs))
    full = x @ state.S @ space.gamma_matrix @ x.T
    upper = np.triu(full, 1)
    return upper - upper.T


def evaluate(state: Symbol, m: Monomial) -> complex:
    n = len(m)
    if n % 2:
        m.plain_vectors(state.space)  # 공간 검사만
        return 0j
    if n == 0:
        return 1.0 + 0j
    return pfaffian(pair_matrix(state, m))


# ---------- weak* 거리 ----------
def observable_family(space: SelfDualSpace, n_max: int = conf.WEAKSTAR_N_MAX) -> List[Monomial]:
    """
    표준기저 짝수 단항식, 차수 우선:
      B(e_i)B(e_j)*  (i ≤ j)  →  B(e_i)B(e_j)*B(e_k)B(e_l)*  ((i,j) ≤ (k,l))
    """
    return list(itertools.islice(_family(space), n_max))


def _family(space: SelfDualSpace) -> Iterator[Monomial]:
    pairs = [(i, j) for i in range(space.dim) for j in range(i, space.dim)]
    for i, j in pairs:
        yield monomials_from_indices(space, [(i, False), (j, True)])
    for a, (i, j) in enumerate(pairs):
        for k, l in pairs[a:]:
            yield monomials_from_indices(space, [(i, False), (j, True), (k, False), (l, True)])


def _differences(s1: Symbol, s2: Symbol, family: Sequence[Monomial]) -> np.ndarray:
    if s1.space is not s2.space and s1.space.labels != s2.space.labels:
        raise SpaceMismatch("states live on different spaces")
    return np.array([abs(evaluate(s1, a) - evaluate(s2, a)) for a in family])


def weakstar_distance(s1: Symbol, s2: Symbol, family: Optional[Sequence[Monomial]] = None,
                      n_max: int = conf.WEAKSTAR_N_MAX) -> float:
    """d = Σ_n 2^{−n}|ω₁(A_n) − ω₂(A_n)|, n = 1, 2, …"""
    family = family if family is not None else observable_family(s1.space, n_max)
    diffs = _differences(s1, s2, family)
    weights = 0.5 ** np.arange(1, len(diffs) + 1)
    return float(np.sum(weights * diffs))


def first_separating(s1: Symbol, s2: Symbol, family: Optional[Sequence[Monomial]] = None,
                     n_max: int = conf.WEAKSTAR_N_MAX,
                     threshold: float = conf.SEPARATION_THRESHOLD) -> Optional[Tuple[int, float]]:
    """처음으로 |ω₁(A_m) − ω₂(A_m)| > threshold 인 (m, w), m 은 1부터."""
    family = family if family is not None else observable_family(s1.space, n_max)
    for m, a in enumerate(family, start=1):
        w = abs(evaluate(s1, a) - evaluate(s2, a))
        if w > threshold:
            return m, float(w)
    return None

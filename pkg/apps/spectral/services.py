from __future__ import annotations
import logging
from typing import Optional, Union

import numpy as np
from scipy import linalg as sla

from apps.selfdual.models import Label, SelfDualHamiltonian
from apps.selfdual.services import opnorm

from . import conf
from .exceptions import EigensolverFailure, ZNearSpectrum
from .models import SpectralResolution

log = logging.getLogger(__name__)


def _proj(v: np.ndarray, mask: np.ndarray) -> np.ndarray:
    cols = v[:, mask]
    return cols @ cols.conj().T


def resolve(h: SelfDualHamiltonian, zero_tol: Optional[float] = None) -> SpectralResolution:
    """고유분해 + E₊/E₋/E₀. zero_tol 기본값 1e−8·‖H‖."""
    tol = conf.zero_rtol() * h.norm if zero_tol is None else float(zero_tol)
    try:
        w, v = sla.eigh(h.matrix)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise EigensolverFailure(f"eigh failed: {e}") from e

    pos, neg = w > tol, w < -tol
    zero = ~(pos | neg)
    nonzero = np.abs(w[~zero])
    gap_defined = nonzero.size > 0
    gap = float(nonzero.min()) if gap_defined else 0.0
    if not gap_defined:
        log.info("zero Hamiltonian: gap undefined, reported as 0")
    return SpectralResolution(
        hamiltonian=h, eigenvalues=w, eigenvectors=v, gap=gap, zero_tol=tol,
        E_plus=_proj(v, pos), E_minus=_proj(v, neg), E_zero=_proj(v, zero),
        gap_defined=gap_defined,
    )


def gap_of(h: SelfDualHamiltonian, zero_tol: Optional[float] = None) -> float:
    """고유벡터 없이 gap 만 (스캔용). 닫혀 있으면 0."""
    tol = conf.zero_rtol() * h.norm if zero_tol is None else float(zero_tol)
    try:
        w = sla.eigvalsh(h.matrix)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise EigensolverFailure(f"eigvalsh failed: {e}") from e
    a = np.abs(w)
    if np.any(a <= tol):
        return 0.0
    return float(a.min())


# ---------- 동역학 ----------
def propagator(res: SpectralResolution, t: float) -> np.ndarray:
    """e^{itH}."""
    return res.function(lambda lam: np.exp(1j * t * lam))


def evolve_operator(res: SpectralResolution, a: np.ndarray, t: float) -> np.ndarray:
    """e^{itH} A e^{−itH}."""
    u = propagator(res, t)
    return u @ a @ u.conj().T


# ---------- 레졸벤트 ----------
def _min_distance(res: SpectralResolution, z: complex) -> float:
    return float(np.min(np.abs(z - res.eigenvalues)))


def resolvent(res: SpectralResolution, z: complex) -> np.ndarray:
    """(z − H)^{-1} (고유기저 합)."""
    dist = _min_distance(res, z)
    if dist < conf.Z_NEAR_SPECTRUM:
        raise ZNearSpectrum(f"z = {z} lies within {dist:.1e} of the spectrum")
    return res.function(lambda lam: 1.0 / (z - lam))


def _as_index(res: SpectralResolution, x: Union[int, Label]) -> int:
    if isinstance(x, (int, np.integer)):
        return int(x)
    return res.space.index_of(tuple(x))


def resolvent_element(res: SpectralResolution, z: complex, x: Union[int, Label],
                      y: Union[int, Label]) -> complex:
    """⟨𝔢_x, (z−H)^{-1} 𝔢_y⟩."""
    dist = _min_distance(res, z)
    if dist < conf.Z_NEAR_SPECTRUM:
        raise ZNearSpectrum(f"z = {z} lies within {dist:.1e} of the spectrum")
    i, j = _as_index(res, x), _as_index(res, y)
    v = res.eigenvectors
    return complex(np.sum(v[i, :] * np.conj(v[j, :]) / (z - res.eigenvalues)))


def reconstruction_residual(res: SpectralResolution) -> float:
    """‖Σ λ v v* − H‖ / ‖H‖."""
    h = res.hamiltonian.matrix
    back = res.function(lambda lam: lam)
    norm = opnorm(h)
    return opnorm(back - h) / norm if norm else opnorm(back)

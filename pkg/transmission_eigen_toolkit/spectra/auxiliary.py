"""
Auxiliary spectra on [0, b]: the zeros in lambda of phi(k, b) and phi'(k, b),
and the interlacing check between them.
"""

import logging
from typing import Optional, Sequence

import numpy as np

from ..forward.propagation import OVERFLOW_GUARD, regular_data
from ..models.exceptions import PotentialValidationError
from ..models.records import AuxSpectra
from ..potential.model import BoundaryCondition, Potential
from .eigenvalues import axis_roots, default_scan_step

logger = logging.getLogger(__name__)


def lambda_lower_bound(p: Potential, bc: BoundaryCondition) -> float:
    """A lambda below every eigenvalue of both auxiliary problems."""
    if p.has_samples:
        v_min = float(np.min(p.sample_vs))
    else:
        v_min = min([s.v for s in p.segments], default=0.0)
    negative_deltas = sum(-d.c for d in p.deltas if d.c < 0)
    cot = 0.0 if bc.is_dirichlet else abs(bc.cot_theta)
    return min(0.0, v_min) - 2.0 * (cot + negative_deltas + 1.0 / p.support_b) ** 2 - 1.0


def _upper_reach(p: Potential, n: int) -> float:
    if p.has_samples:
        v_max = float(np.max(p.sample_vs))
    else:
        v_max = max([s.v for s in p.segments], default=0.0)
    kicks = sum(abs(d.c) for d in p.deltas)
    return (n + 3) * np.pi / p.support_b + np.sqrt(max(0.0, v_max)) + kicks + 1.0


def aux_spectra(
    p: Potential,
    bc: BoundaryCondition,
    n: int,
    step: Optional[float] = None,
    method: str = 'auto'
) -> AuxSpectra:
    """
    First n zeros in lambda of phi(k, b) and of phi'(k, b).

    Both are even real-valued functions of k, so they are scanned as
    functions of lambda along k on the positive imaginary axis (lambda < 0)
    and on the positive real axis (lambda > 0).

    Args:
        p: Potential
        bc: Boundary condition fixing phi at the origin
        n: Number of zeros wanted from each problem
        step: k-step of the scan, pi/(8b) by default

    Returns:
        AuxSpectra, flagged partial when the scan window ran out first
    """
    if n < 1:
        raise PotentialValidationError("aux_spectra needs n >= 1")
    b = p.support_b
    h = step or default_scan_step(b)

    beta_low = np.sqrt(max(0.0, -lambda_lower_bound(p, bc)))
    if beta_low * b > OVERFLOW_GUARD:
        beta_low = OVERFLOW_GUARD / b
        logger.warning(f"Auxiliary scan below lambda=0 clamped at beta={beta_low:.4g}")
    betas = (np.arange(int(np.ceil(beta_low / h)) + 1) + 0.5) * h
    ks = (np.arange(int(np.ceil(_upper_reach(p, n) / h)) + 1) + 0.5) * h
    lam_grid = np.concatenate([-(betas[::-1] ** 2), ks ** 2])

    def boundary_values(lam):
        k = np.sqrt(np.asarray(lam, dtype=complex))
        return regular_data(p, bc, k, b, method)

    omega_sq = axis_roots(lambda lam: np.real(boundary_values(lam)[0]), lam_grid)[:n]
    eta_sq = axis_roots(lambda lam: np.real(boundary_values(lam)[1]), lam_grid)[:n]
    partial = len(omega_sq) < n or len(eta_sq) < n
    if partial:
        logger.warning(f"Auxiliary scan found {len(omega_sq)} and {len(eta_sq)} of {n} zeros")
    logger.info(f"Auxiliary spectra up to lambda={lam_grid[-1]:.4g} computed")
    return AuxSpectra(omega_sq=tuple(float(x) for x in omega_sq),
                      eta_sq=tuple(float(x) for x in eta_sq),
                      partial=partial)


def check_interlacing(omega_sq: Sequence[float], eta_sq: Sequence[float]) -> bool:
    """True when eta_1 < omega_1 < eta_2 < omega_2 < ... over the common range."""
    pairs = min(len(omega_sq), len(eta_sq))
    for j in range(pairs):
        if not eta_sq[j] < omega_sq[j]:
            return False
        if j + 1 < len(eta_sq) and not omega_sq[j] < eta_sq[j + 1]:
            return False
    return True

"""
Scattering data from a Jost function and the Marchenko kernel
Omega(y) = (1/2pi) int (S(k) - 1) e^{iky} dk + sum m_j^2 e^{-beta_j y}.

The Fourier integral is taken over S - S_0. The free part is known in closed
form: (1/2pi) int (S_0 - 1) e^{iky} dk = -2 cot(theta) e^{-cot(theta) y} for
cot(theta) > 0 and 0 otherwise, so the free datum gives Omega = 0 exactly.
"""

import logging
from typing import Callable, Optional

import numpy as np
from scipy.special import sici

from ..forward.key_quantity import free_scattering_matrix
from ..models.exceptions import AccuracyError, DatumInconsistencyError
from ..models.records import ScatteringData
from ..potential.model import BoundaryCondition
from ..spectra.bound_states import bound_states_from_jost
from ..spectra.eigenvalues import default_scan_step

logger = logging.getLogger(__name__)

UNITARITY_TOL = 1e-6
REAL_ZERO_TOL = 1e-10
REACH_TOL = 1e-2
BOUND_STATE_REACH = 20.0
CHUNK = 512


def scattering_from_F(
    Ffun: Callable,
    K_reach: float,
    h: float,
    cot_theta: float,
    W: float,
    support_b: float = 1.0,
    beta_max: Optional[float] = None
) -> ScatteringData:
    """
    S(k) = -F(-k)/F(k) on the half-offset grid k_j = (j + 1/2) h, |k_j| <= K_reach,
    plus the bound states of F.

    Args:
        Ffun: Vectorized Jost function
        K_reach: Grid reach
        h: Grid spacing
        cot_theta: Boundary parameter
        W: Large-k constant, kept for the Fourier tail
        support_b: Support length, sets the bound-state scan step
        beta_max: Upper end of the bound-state scan

    Returns:
        ScatteringData

    Raises:
        DatumInconsistencyError: F vanishes on the real grid, or |S| - 1 exceeds 1e-6 there
    """
    n = int(np.ceil(K_reach / h))
    positive = (np.arange(n) + 0.5) * h
    k_grid = np.concatenate([-positive[::-1], positive])
    F = np.asarray(Ffun(k_grid.astype(complex)), dtype=complex)
    scale = np.maximum(1.0, np.abs(k_grid))
    if np.any(np.abs(F) < REAL_ZERO_TOL * scale):
        bad = float(k_grid[np.argmin(np.abs(F) / scale)])
        raise DatumInconsistencyError(
            f"recovered F vanishes on the real axis near k={bad:.8g}",
            stage='scattering', details={'k': bad}
        )
    S = -F[::-1] / F
    deviation = np.abs(np.abs(S) - 1.0)
    if np.max(deviation) > UNITARITY_TOL:
        worst = int(np.argmax(deviation))
        raise DatumInconsistencyError(
            f"|S| deviates from 1 by {deviation[worst]:.3g} at k={k_grid[worst]:.8g}",
            stage='scattering', details={'k': float(k_grid[worst]), 'deviation': float(deviation[worst])}
        )

    bc = BoundaryCondition.non_dirichlet(cot_theta)
    reach = beta_max or BOUND_STATE_REACH / support_b
    states = bound_states_from_jost(Ffun, bc, reach, default_scan_step(support_b), support_b)
    logger.info(f"Scattering data on {k_grid.size} points up to K={positive[-1]:.4g}, "
                f"{len(states)} bound states")
    return ScatteringData(
        k_grid=k_grid,
        h=float(h),
        K_reach=float(positive[-1]),
        S_values=S,
        bound_states=tuple(states),
        W=float(W),
        cot_theta=float(cot_theta)
    )


def free_part(s: ScatteringData) -> np.ndarray:
    """S_0(k_j) for the boundary parameter of s."""
    return free_scattering_matrix(BoundaryCondition.non_dirichlet(s.cot_theta), s.k_grid)


def tail_amplitude(s: ScatteringData) -> float:
    """A = W, the coefficient in S - S_0 ~ -iA/k."""
    return s.W


def check_reach(s: ScatteringData, tol: float = REACH_TOL) -> float:
    """
    Estimate of the Fourier error left after the -iA/k tail correction.

    Raises:
        AccuracyError: the estimate exceeds tol
    """
    A = tail_amplitude(s)
    outer = np.abs(s.k_grid) >= 0.9 * s.K_reach
    k = s.k_grid[outer]
    remainder = np.max(np.abs(s.S_values[outer] - free_part(s)[outer] + 1j * A / k))
    estimate = float(remainder * s.K_reach / np.pi)
    if estimate > tol:
        raise AccuracyError(
            f"Fourier grid reach K={s.K_reach:.4g} too small: tail estimate {estimate:.3g}",
            stage='marchenko_kernel', details={'K_reach': s.K_reach, 'estimate': estimate}
        )
    return estimate


class MarchenkoKernel:
    """Vectorized Omega(y) for y >= 0 from scattering data."""

    def __init__(self, s: ScatteringData):
        self.s = s
        self.A = tail_amplitude(s)
        self.weights = (s.S_values - free_part(s)) * s.h / (2.0 * np.pi)

    def complex_values(self, y) -> np.ndarray:
        y = np.atleast_1d(np.asarray(y, dtype=float))
        out = np.empty(y.shape, dtype=complex)
        for start in range(0, y.size, CHUNK):
            block = y[start:start + CHUNK]
            phases = np.exp(1j * np.outer(block, self.s.k_grid))
            out[start:start + CHUNK] = phases @ self.weights
        si, _ = sici(self.s.K_reach * y)
        out += self.A * (0.5 - si / np.pi)
        c = self.s.cot_theta
        if c > 0.0:
            out -= 2.0 * c * np.exp(-c * y)
        for state in self.s.bound_states:
            out += state.norming_constant ** 2 * np.exp(-state.beta * y)
        return out

    def __call__(self, y) -> np.ndarray:
        return np.real(self.complex_values(y))

    def imag_residue(self, y) -> float:
        return float(np.max(np.abs(np.imag(self.complex_values(y)))))


def marchenko_kernel(s: ScatteringData, y):
    """
    Omega(y) for y >= 0.

    The trapezoid sum over the grid is completed by the closed-form Fourier
    integral of -iA/k beyond the reach, and the free and bound-state terms are added.
    """
    if np.any(np.asarray(y) < 0):
        raise DatumInconsistencyError("the Marchenko kernel is needed for y >= 0 only")
    kernel = MarchenkoKernel(s)
    values = kernel.complex_values(y)
    residue = float(np.max(np.abs(values.imag)))
    if residue > 1e-8 * max(1.0, float(np.max(np.abs(values.real)))):
        logger.warning(f"Marchenko kernel has imaginary residue {residue:.3g}")
    if np.ndim(y) == 0:
        return float(values.real[0])
    return values.real

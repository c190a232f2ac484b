"""
Bound states k = i*beta and their norming constants.

Zeros of F on the positive imaginary axis come from a sign scan of the real
combination iF(i*beta) (F(i*beta) itself in Dirichlet mode). Norming
constants come from the residue of S at i*beta, with direct quadrature of
f(i*beta, x)^2 available as an independent check.
"""

import logging
from typing import Callable, List, Optional

import numpy as np

from ..forward.propagation import OVERFLOW_GUARD, jost_function, jost_profile
from ..models.exceptions import DatumInconsistencyError, PotentialValidationError
from ..models.records import BoundState
from ..potential.model import BoundaryCondition, Potential, breakpoints
from .eigenvalues import axis_roots, default_scan_step

logger = logging.getLogger(__name__)

RESIDUE_NODES = 64
GAUSS_NODES = 16
FIRST_SCAN_POINT = 1e-4


def _axis_combination(Ffun: Callable, bc: BoundaryCondition) -> Callable:
    """Real-valued restriction of F to the positive imaginary axis."""
    if bc.is_dirichlet:
        return lambda beta: np.real(Ffun(1j * np.asarray(beta, dtype=float)))
    return lambda beta: np.real(1j * Ffun(1j * np.asarray(beta, dtype=float)))


def residue_of_S(Ffun: Callable, bc: BoundaryCondition, k0: complex, radius: float) -> complex:
    """Residue of S at k0 by the trapezoid rule on a circle."""
    theta = 2.0 * np.pi * np.arange(RESIDUE_NODES) / RESIDUE_NODES
    z = k0 + radius * np.exp(1j * theta)
    values = np.asarray(Ffun(np.concatenate([z, -z])), dtype=complex)
    F_plus, F_minus = values[:RESIDUE_NODES], values[RESIDUE_NODES:]
    S = F_minus / F_plus if bc.is_dirichlet else -F_minus / F_plus
    return complex(np.mean(S * (z - k0)))


def bound_states_from_jost(
    Ffun: Callable,
    bc: BoundaryCondition,
    beta_max: float,
    step: float,
    support_b: float = 1.0
) -> List[BoundState]:
    """
    Bound states of an evaluable Jost function.

    Args:
        Ffun: Vectorized F(k) (f(k,0) in Dirichlet mode)
        bc: Boundary condition
        beta_max: Upper end of the imaginary-axis scan
        step: Scan step
        support_b: Support length, used for the overflow clamp

    Returns:
        BoundState list in increasing beta

    Raises:
        DatumInconsistencyError: a residue gives a non-positive m^2
    """
    if beta_max * support_b > OVERFLOW_GUARD:
        beta_max = OVERFLOW_GUARD / support_b
        logger.warning(f"Bound-state scan clamped to beta={beta_max:.4g}")
    n = int(np.floor(beta_max / step - 0.5)) + 1
    grid = np.concatenate([[FIRST_SCAN_POINT], (np.arange(max(n, 0)) + 0.5) * step])
    grid = np.unique(grid[grid <= beta_max])
    betas = axis_roots(_axis_combination(Ffun, bc), grid)

    states = []
    for i, beta in enumerate(betas):
        gaps = [abs(beta - other) for j, other in enumerate(betas) if j != i]
        radius = min(beta / 4.0, min(gaps) / 4.0 if gaps else beta / 4.0)
        residue = residue_of_S(Ffun, bc, 1j * beta, radius)
        # m^2 = -i Res S, or +i Res S with S = f(-k,0)/f(k,0) in Dirichlet mode
        m_sq = (1j if bc.is_dirichlet else -1j) * residue
        if m_sq.real <= 0.0:
            raise DatumInconsistencyError(
                f"bound state at beta={beta:.10g} has non-positive m^2={m_sq.real:.6g}",
                details={'beta': beta, 'm_squared': [m_sq.real, m_sq.imag]}
            )
        if abs(m_sq.imag) > 1e-6 * abs(m_sq.real):
            logger.warning(f"Residue at beta={beta:.6g} has imaginary part {m_sq.imag:.3g}")
        states.append(BoundState(beta=float(beta), norming_constant=float(np.sqrt(m_sq.real))))
    logger.info(f"Found {len(states)} bound states for beta <= {beta_max:.4g}")
    return states


def bound_states(
    p: Potential,
    bc: BoundaryCondition,
    beta_max: float,
    step: Optional[float] = None,
    method: str = 'auto'
) -> List[BoundState]:
    """
    Bound states of the potential with beta in (0, beta_max].

    Norming constants use m^2 = -i Res(S, i*beta) (+i in Dirichlet mode).
    """
    if beta_max <= 0:
        raise PotentialValidationError("beta_max must be positive")

    def Ffun(k):
        return jost_function(p, bc, k, method)

    return bound_states_from_jost(Ffun, bc, beta_max, step or default_scan_step(p.support_b), p.support_b)


def norming_constant_direct(p: Potential, beta: float, method: str = 'auto') -> float:
    """
    m = 1 / sqrt(int_0^inf f(i*beta, x)^2 dx) with Gauss-Legendre panels
    over each breakpoint interval and the exact tail e^{-2 beta b}/(2 beta).
    """
    nodes, weights = np.polynomial.legendre.leggauss(GAUSS_NODES)
    points = breakpoints(p)
    panel = 0.05 * p.support_b
    xs, ws = [], []
    for s, t in zip(points[:-1], points[1:]):
        n_panels = max(1, int(np.ceil((t - s) / panel)))
        edges = np.linspace(s, t, n_panels + 1)
        for lo, hi in zip(edges[:-1], edges[1:]):
            half = 0.5 * (hi - lo)
            xs.append(lo + half * (nodes + 1.0))
            ws.append(half * weights)
    xs = np.concatenate(xs)
    ws = np.concatenate(ws)
    f = np.real(jost_profile(p, 1j * beta, xs, method))
    total = float(np.dot(ws, f * f)) + np.exp(-2.0 * beta * p.support_b) / (2.0 * beta)
    return float(1.0 / np.sqrt(total))

"""
Independent Jost-solution oracle by Neumann iteration of the Volterra
equations

    f(k,x)  = e^{ikx} + (1/k) int_x^b sin k(y-x) V(y) f(k,y) dy
    f'(k,x) = ik e^{ikx} - int_x^b cos k(y-x) V(y) f(k,y) dy

on a fine grid with trapezoid quadrature.
"""

import logging
from typing import List, Optional, Tuple

import numpy as np
from scipy.integrate import cumulative_trapezoid

from ..models.exceptions import PotentialValidationError, UnsupportedInputError
from ..models.records import JostEval
from ..potential.model import BoundaryCondition, Potential, breakpoints, evaluate_many, potential_l1_norm
from .propagation import check_range, jost_function_value

logger = logging.getLogger(__name__)

NODES_PER_UNIT = 20000


def _region_grids(p: Potential, nodes_per_unit: int) -> List[Tuple[np.ndarray, np.ndarray]]:
    """Uniform nodes per breakpoint interval with one-sided V values."""
    points = breakpoints(p)
    if p.has_samples:
        points = np.array([0.0, p.support_b])
    grids = []
    for s, t in zip(points[:-1], points[1:]):
        n = max(8, int(np.ceil((t - s) * nodes_per_unit)))
        xs = np.linspace(s, t, n + 1)
        if p.has_samples:
            vs = np.interp(xs, p.sample_xs, p.sample_vs)
        else:
            vs = np.full_like(xs, evaluate_many(p, np.array([0.5 * (s + t)]))[0])
        grids.append((xs, vs))
    return grids


def _tail_integrals(xs, integrand):
    """int_x^t integrand for every node x of one region."""
    forward = cumulative_trapezoid(integrand, xs, initial=0.0)
    return forward[-1] - forward


def jost_series_oracle(
    p: Potential,
    k: complex,
    iterations: int,
    bc: Optional[BoundaryCondition] = None,
    nodes_per_unit: int = NODES_PER_UNIT
) -> JostEval:
    """
    Jost data at the origin after a fixed number of Neumann sweeps.

    Args:
        p: Class-A potential (no deltas)
        k: Complex wavenumber, k = 0 included
        iterations: Number of fixed-point sweeps, at least 1
        bc: Boundary condition for F; Dirichlet form when omitted
        nodes_per_unit: Quadrature nodes per unit length

    Returns:
        JostEval built from the final iterate
    """
    if p.deltas:
        raise UnsupportedInputError("the series oracle does not accept delta potentials")
    if iterations < 1:
        raise PotentialValidationError("iterations must be at least 1")
    k = complex(k)
    check_range(p, [k])
    bc = bc or BoundaryCondition.dirichlet()
    strength = potential_l1_norm(p) / max(abs(k), 1.0 / p.support_b)
    if strength > 1.0:
        logger.warning(f"||V||_1/max(|k|, 1/b) = {strength:.3g} at k={k}; the series may need many more sweeps")

    grids = _region_grids(p, nodes_per_unit)
    free = [np.exp(1j * k * xs) for xs, _ in grids]
    f = [fx.copy() for fx in free]
    carry_c = 0j
    for _ in range(iterations):
        # sin k(y-x)/k = s(y)cos(kx) - cos(ky)s(x) with s(x) = sin(kx)/k, which is x at k = 0
        carry_s = 0j
        carry_c = 0j
        updated = [None] * len(grids)
        for idx in range(len(grids) - 1, -1, -1):
            xs, vs = grids[idx]
            g = vs * f[idx]
            sin_over_k = xs * np.sinc(k * xs / np.pi)
            int_s = _tail_integrals(xs, sin_over_k * g) + carry_s
            int_c = _tail_integrals(xs, np.cos(k * xs) * g) + carry_c
            updated[idx] = free[idx] + np.cos(k * xs) * int_s - sin_over_k * int_c
            carry_s, carry_c = int_s[0], int_c[0]
        f = updated
    logger.debug(f"Neumann oracle finished {iterations} sweeps at k={k}")

    # carry_c now holds int_0^b cos(ky) V f dy for the iterate inside the last sweep
    f0 = complex(f[0][0])
    fp0 = complex(1j * k - carry_c)
    return JostEval(k=k, f0=f0, fp0=fp0, F=complex(jost_function_value(bc, f0, fp0)))

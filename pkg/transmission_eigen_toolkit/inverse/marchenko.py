"""
Nyström solution of the Marchenko equation

    K(x, y) + Omega(x + y) + int_x^inf K(x, z) Omega(z + y) dz = 0,   y > x,

one x at a time on [x, x + y_reach], and V(x) = -2 d/dx K(x, x).
"""

import logging
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.linalg import lapack, lu_factor, lu_solve

from ..models.exceptions import MarchenkoSolveError, PotentialValidationError
from ..models.records import MarchenkoSolution
from ..utils.parallel import parallel_map

logger = logging.getLogger(__name__)

RULES = ('trapezoid', 'gauss')
CONDITION_LIMIT = 1e12
CONDITION_WARN = 1e6
GAUSS_PANEL_NODES = 16
TABLE_REFINEMENT = 4

# 4th-order one-sided first-derivative stencils at the ends
EDGE_STENCIL = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / 12.0
NEAR_EDGE_STENCIL = np.array([-3.0, -10.0, 18.0, -6.0, 1.0]) / 12.0


def default_y_reach(betas: Sequence[float], b: float, cap_factor: float = 4.0) -> float:
    """max(40/min beta, 20b), capped at cap_factor*b and never below 2b."""
    reach = 20.0 * b
    if len(betas):
        reach = max(reach, 40.0 / min(betas))
    return max(2.0 * b, min(reach, cap_factor * b))


def nystrom_rule(y_reach: float, n_nodes: int, rule: str = 'trapezoid'):
    """Offsets s in [0, y_reach] and weights of the quadrature rule."""
    if rule not in RULES:
        raise PotentialValidationError(f"unknown Nyström rule '{rule}'", details={'rules': list(RULES)})
    if rule == 'trapezoid':
        s = np.linspace(0.0, y_reach, n_nodes + 1)
        w = np.full(s.shape, y_reach / n_nodes)
        w[0] *= 0.5
        w[-1] *= 0.5
        return s, w
    nodes, weights = np.polynomial.legendre.leggauss(GAUSS_PANEL_NODES)
    panels = max(1, n_nodes // GAUSS_PANEL_NODES)
    edges = np.linspace(0.0, y_reach, panels + 1)
    half = 0.5 * np.diff(edges)
    s = (edges[:-1, None] + half[:, None] * (nodes[None, :] + 1.0)).ravel()
    w = (half[:, None] * weights[None, :]).ravel()
    return s, w


def derivative_4th_order(values: np.ndarray, dx: float) -> np.ndarray:
    """First derivative on a uniform grid, 4th order throughout."""
    n = len(values)
    if n < 5:
        return np.gradient(values, dx)
    out = np.empty(n)
    out[2:-2] = (values[:-4] - 8.0 * values[1:-3] + 8.0 * values[3:-1] - values[4:]) / (12.0 * dx)
    out[0] = np.dot(EDGE_STENCIL, values[:5]) / dx
    out[1] = np.dot(NEAR_EDGE_STENCIL, values[:5]) / dx
    out[-1] = -np.dot(EDGE_STENCIL, values[-5:][::-1]) / dx
    out[-2] = -np.dot(NEAR_EDGE_STENCIL, values[-5:][::-1]) / dx
    return out


def _tabulate(omega: Callable, y_max: float, spacing: float) -> Callable:
    """Cubic-spline table of Omega on [0, y_max]."""
    n = int(np.ceil(y_max / spacing)) + 1
    ys = np.linspace(0.0, y_max, n)
    table = CubicSpline(ys, np.asarray(omega(ys), dtype=float))
    logger.info(f"Tabulated the Marchenko kernel at {n} points on [0, {y_max:.4g}]")
    return table


def _solve_one(x: float, omega: Callable, s: np.ndarray, w: np.ndarray, uniform: bool):
    n = len(s)
    if uniform:
        # s_i + s_j = (i + j) ds: a Hankel matrix needs only 2n - 1 kernel values
        ds = s[1] - s[0]
        samples = omega(2.0 * x + ds * np.arange(2 * n - 1))
        kernel_matrix = samples[np.add.outer(np.arange(n), np.arange(n))]
    else:
        kernel_matrix = omega(2.0 * x + s[:, None] + s[None, :])
    matrix = np.eye(n) + kernel_matrix * w[None, :]
    rhs = -omega(2.0 * x + s)
    lu, piv = lu_factor(matrix)
    rcond, _ = lapack.dgecon(lu, np.linalg.norm(matrix, 1), norm='1')
    condition = np.inf if rcond == 0.0 else 1.0 / rcond
    if condition > CONDITION_LIMIT:
        raise MarchenkoSolveError(
            f"Nyström matrix at x={x:.6g} is ill-conditioned (cond ~ {condition:.3g})",
            stage='solve_marchenko', details={'x': x, 'condition': condition}
        )
    u = lu_solve((lu, piv), rhs)
    # Nyström interpolation at y = x
    diagonal = -omega(np.array([2.0 * x]))[0] - np.dot(w * u, omega(2.0 * x + s))
    return u, float(diagonal), float(condition)


def solve_marchenko(
    omega: Callable,
    x_grid,
    y_reach: float,
    n_nodes: int = 1024,
    rule: str = 'trapezoid',
    tabulate: bool = True
) -> MarchenkoSolution:
    """
    Solve the Marchenko equation on a uniform x-grid.

    Args:
        omega: Vectorized real Omega(y), y >= 0
        x_grid: Uniform increasing x-points, at least 5
        y_reach: Length of the y-interval [x, x + y_reach]
        n_nodes: Nyström node count
        rule: 'trapezoid' or 'gauss'
        tabulate: Evaluate Omega through a cubic-spline table

    Returns:
        MarchenkoSolution with K(x, x + s_j), K(x, x) and V(x)

    Raises:
        MarchenkoSolveError: a Nyström matrix is numerically singular
    """
    x_grid = np.asarray(x_grid, dtype=float)
    if x_grid.ndim != 1 or len(x_grid) < 5:
        raise PotentialValidationError("x_grid needs at least 5 points")
    steps = np.diff(x_grid)
    dx = float(steps[0])
    if dx <= 0 or np.max(np.abs(steps - dx)) > 1e-9 * max(1.0, abs(dx)):
        raise PotentialValidationError("x_grid must be uniform and increasing")
    if y_reach <= 0:
        raise PotentialValidationError("y_reach must be positive")

    s, w = nystrom_rule(y_reach, n_nodes, rule)
    kernel = omega
    if tabulate:
        spacing = min(y_reach / n_nodes, dx) / TABLE_REFINEMENT
        kernel = _tabulate(omega, 2.0 * (x_grid[-1] + y_reach), spacing)

    logger.info(f"Solving {len(x_grid)} Marchenko systems of size {len(s)} ({rule} rule)")
    results = parallel_map(lambda x: _solve_one(float(x), kernel, s, w, rule == "trapezoid"), list(x_grid))
    K_values = np.array([r[0] for r in results])
    K_diagonal = np.array([r[1] for r in results])
    conditions = np.array([r[2] for r in results])
    if np.max(conditions) > CONDITION_WARN:
        logger.warning(f"Largest Nyström condition number {np.max(conditions):.3g}")

    V = -2.0 * derivative_4th_order(K_diagonal, dx)
    return MarchenkoSolution(
        x_grid=x_grid,
        y_grid=s,
        K_values=K_values,
        K_diagonal=K_diagonal,
        V_recovered=V,
        condition_numbers=conditions
    )

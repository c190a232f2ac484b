"""
Solution propagation for -psi'' + V psi = k^2 psi.

Across constant pieces the 2x2 transfer matrix is applied exactly,
vectorized over arrays of k. Sampled potentials go through an adaptive
RK45 integration between breakpoints. Deltas act as jumps of psi' by
c * psi.
"""

import logging
from typing import Sequence, Tuple

import numpy as np
from scipy.integrate import solve_ivp

from ..models.exceptions import AccuracyError, PotentialValidationError, RangeGuardError, UnsupportedInputError
from ..models.records import JostEval, RegularEval
from ..potential.model import BoundaryCondition, Potential, breakpoints, delta_strength_at, evaluate
from ..utils.parallel import parallel_map

logger = logging.getLogger(__name__)

OVERFLOW_GUARD = 700.0
SERIES_THRESHOLD = 1e-4
DEFAULT_RTOL = 1e-10
DEFAULT_ATOL = 1e-10

METHODS = ('auto', 'transfer', 'ode')


def check_range(p: Potential, k) -> None:
    """Raise RangeGuardError when |Im k|·b would overflow e^{2|Im k| b}."""
    worst = float(np.max(np.abs(np.imag(np.asarray(k, dtype=complex))))) * p.support_b
    if worst > OVERFLOW_GUARD:
        raise RangeGuardError(
            f"|Im k|*b = {worst:.1f} exceeds the overflow guard {OVERFLOW_GUARD}",
            details={'im_k_times_b': worst, 'guard': OVERFLOW_GUARD}
        )


def cos_sinc(omega_sq: np.ndarray, h: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    cos(omega h) and sin(omega h)/omega as functions of omega^2.

    Both are even in omega, so the square-root branch does not matter.
    Small arguments use the Taylor series.
    """
    omega_sq = np.asarray(omega_sq, dtype=complex)
    if omega_sq.ndim == 0:
        c, s = cos_sinc(omega_sq.reshape(1), h)
        return c[0], s[0]
    omega = np.sqrt(omega_sq)
    z = omega * h
    z2 = omega_sq * h * h
    small = np.abs(z) < SERIES_THRESHOLD
    cos_part = np.empty_like(omega_sq)
    sinc_part = np.empty_like(omega_sq)
    cos_part[small] = 1.0 - z2[small] / 2.0 + z2[small] ** 2 / 24.0
    sinc_part[small] = h * (1.0 - z2[small] / 6.0 + z2[small] ** 2 / 120.0)
    big = ~small
    cos_part[big] = np.cos(z[big])
    sinc_part[big] = np.sin(z[big]) / omega[big]
    return cos_part, sinc_part


def _transfer_step(y, yp, omega_sq, h):
    c, s = cos_sinc(omega_sq, h)
    return c * y + s * yp, -omega_sq * s * y + c * yp


def _resolve_method(p: Potential, method: str) -> str:
    if method not in METHODS:
        raise PotentialValidationError(f"unknown propagation method '{method}'")
    if method == 'auto':
        return 'transfer' if p.is_piecewise_constant else 'ode'
    if method == 'transfer' and not p.is_piecewise_constant:
        raise UnsupportedInputError("transfer matrices need a piecewise-constant potential")
    return method


def _ode_leg(p: Potential, k: complex, s: float, t: float, y: complex, yp: complex,
             rtol: float, atol: float) -> Tuple[complex, complex]:
    k2 = k * k

    def rhs(x, u):
        return [u[1], (evaluate(p, x) - k2) * u[0]]

    sol = solve_ivp(rhs, (s, t), np.array([y, yp], dtype=complex), method='RK45', rtol=rtol, atol=atol)
    if not sol.success:
        raise AccuracyError(
            f"RK45 failed between x={s} and x={t} for k={k}: {sol.message}",
            details={'status': int(sol.status), 'reached_x': float(sol.t[-1]), 'k': [k.real, k.imag]}
        )
    return complex(sol.y[0, -1]), complex(sol.y[1, -1])


def _transport(p, k, s, t, y, yp, method, rtol, atol):
    if s == t:
        return y, yp
    if method == 'transfer':
        v = evaluate(p, 0.5 * (s + t))
        return _transfer_step(y, yp, k * k - v, t - s)

    def one(idx):
        return _ode_leg(p, complex(k[idx]), s, t, complex(y[idx]), complex(yp[idx]), rtol, atol)

    pairs = parallel_map(one, range(len(k)))
    return (np.array([pair[0] for pair in pairs], dtype=complex),
            np.array([pair[1] for pair in pairs], dtype=complex))


def walk(
    p: Potential,
    k: np.ndarray,
    x_start: float,
    x_targets: Sequence[float],
    y: np.ndarray,
    yp: np.ndarray,
    method: str = 'auto',
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Carry (psi, psi') from x_start through monotone targets.

    Values stored at a target are the limits approached from the direction
    of travel; a delta sitting on a target is applied after storing.

    Args:
        p: Potential
        k: Wavenumbers, shape (n,)
        x_start: Starting point with data (y, yp)
        x_targets: Monotone targets moving away from x_start
        y: psi at x_start, shape (n,)
        yp: psi' at x_start, shape (n,)

    Returns:
        Arrays of shape (len(x_targets), n) for psi and psi'
    """
    method = _resolve_method(p, method)
    k = np.atleast_1d(np.asarray(k, dtype=complex))
    y = np.broadcast_to(np.asarray(y, dtype=complex), k.shape).copy()
    yp = np.broadcast_to(np.asarray(yp, dtype=complex), k.shape).copy()
    targets = [float(x) for x in x_targets]
    if not targets:
        return np.empty((0, len(k)), dtype=complex), np.empty((0, len(k)), dtype=complex)

    descending = targets[-1] < x_start
    lo, hi = min(x_start, targets[-1]), max(x_start, targets[-1])
    inner = {float(x) for x in breakpoints(p) if lo < x < hi}
    nodes = sorted(inner.union(targets).difference({x_start}), reverse=descending)
    sign = -1.0 if descending else 1.0

    stored = {}
    if x_start in targets:
        stored[x_start] = (y.copy(), yp.copy())
    position = x_start
    for node in nodes:
        y, yp = _transport(p, k, position, node, y, yp, method, rtol, atol)
        if node in targets:
            stored[node] = (y.copy(), yp.copy())
        c = delta_strength_at(p, node)
        if c:
            yp = yp + sign * c * y
        position = node

    psi = np.array([stored[x][0] for x in targets])
    dpsi = np.array([stored[x][1] for x in targets])
    return psi, dpsi


def jost_function_value(bc: BoundaryCondition, f0, fp0):
    """F = -i[f'(k,0) + cot(theta) f(k,0)], or f(k,0) in Dirichlet mode."""
    if bc.is_dirichlet:
        return f0
    return -1j * (fp0 + bc.cot_theta * f0)


def jost_data(
    p: Potential,
    k,
    method: str = 'auto',
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL
) -> Tuple[np.ndarray, np.ndarray]:
    """Vectorized f(k,0), f'(k,0) from f(k,b) = e^{ikb}."""
    k = np.atleast_1d(np.asarray(k, dtype=complex))
    check_range(p, k)
    b = p.support_b
    e = np.exp(1j * k * b)
    psi, dpsi = walk(p, k, b, [0.0], e, 1j * k * e, method, rtol, atol)
    return psi[0], dpsi[0]


def jost_at_origin(
    p: Potential,
    bc: BoundaryCondition,
    k: complex,
    method: str = 'auto',
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL
) -> JostEval:
    """
    Evaluate the Jost solution at the origin and the Jost function.

    Args:
        p: Potential
        bc: Boundary condition deciding the form of F
        k: Complex wavenumber
        method: 'auto', 'transfer' or 'ode'

    Returns:
        JostEval(k, f(k,0), f'(k,0), F(k))
    """
    f0, fp0 = jost_data(p, [k], method, rtol, atol)
    f0, fp0 = complex(f0[0]), complex(fp0[0])
    return JostEval(k=complex(k), f0=f0, fp0=fp0, F=complex(jost_function_value(bc, f0, fp0)))


def jost_function(p: Potential, bc: BoundaryCondition, k, method: str = 'auto') -> np.ndarray:
    """Vectorized Jost function F(k)."""
    f0, fp0 = jost_data(p, k, method)
    return jost_function_value(bc, f0, fp0)


def jost_profile(p: Potential, k: complex, xs, method: str = 'auto') -> np.ndarray:
    """f(k, x) at arbitrary points; e^{ikx} for x >= b."""
    xs = np.asarray(xs, dtype=float)
    check_range(p, [k])
    out = np.exp(1j * k * xs).astype(complex)
    inside = xs < p.support_b
    if not np.any(inside):
        return out
    if np.any(xs < 0):
        raise PotentialValidationError("jost_profile is defined for x >= 0")
    b = p.support_b
    targets = sorted(set(xs[inside].tolist()), reverse=True)
    e = np.exp(1j * k * b)
    psi, _ = walk(p, [k], b, targets, [e], [1j * k * e], method)
    lookup = {x: psi[i, 0] for i, x in enumerate(targets)}
    out[inside] = [lookup[x] for x in xs[inside]]
    return out


def regular_initial(bc: BoundaryCondition) -> Tuple[float, float]:
    """(phi(0), phi'(0)) for the boundary condition."""
    if bc.is_dirichlet:
        return 0.0, 1.0
    return 1.0, -bc.cot_theta


def regular_data(
    p: Potential,
    bc: BoundaryCondition,
    k,
    x: float,
    method: str = 'auto'
) -> Tuple[np.ndarray, np.ndarray]:
    """Vectorized phi(k,x), phi'(k,x)."""
    if not (0.0 <= x <= p.support_b):
        raise PotentialValidationError(f"regular solution requested at x={x} outside [0, {p.support_b}]")
    k = np.atleast_1d(np.asarray(k, dtype=complex))
    check_range(p, k)
    phi0, dphi0 = regular_initial(bc)
    psi, dpsi = walk(p, k, 0.0, [x], np.full(k.shape, phi0, complex), np.full(k.shape, dphi0, complex), method)
    return psi[0], dpsi[0]


def regular_solution(
    p: Potential,
    bc: BoundaryCondition,
    k: complex,
    x: float,
    method: str = 'auto'
) -> RegularEval:
    """
    Regular solution phi(k,x) from the boundary-condition data at 0.

    Args:
        p: Potential
        bc: Boundary condition
        k: Complex wavenumber
        x: Point in [0, b]

    Returns:
        RegularEval at (k, x)
    """
    phi, dphi = regular_data(p, bc, [k], x, method)
    return RegularEval(k=complex(k), x=float(x), phi=complex(phi[0]), phip=complex(dphi[0]))


def free_regular_solution(bc: BoundaryCondition, k, x: float) -> Tuple[np.ndarray, np.ndarray]:
    """phi_0(k,x) and phi_0'(k,x) for V = 0."""
    k = np.asarray(k, dtype=complex)
    phi0, dphi0 = regular_initial(bc)
    c, s = cos_sinc(k * k, x)
    return c * phi0 + s * dphi0, -k * k * s * phi0 + c * dphi0

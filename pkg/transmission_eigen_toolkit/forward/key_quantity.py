"""
The key quantity D(k), scattering matrices and large-k residuals.
"""

import logging
from typing import Callable, Iterable

import numpy as np
import pandas as pd

from ..models.exceptions import PoleError
from ..potential.model import BoundaryCondition, Potential, moment_W
from .propagation import (
    free_regular_solution,
    jost_data,
    jost_function,
    jost_function_value,
    regular_data,
)

logger = logging.getLogger(__name__)

# Below this |k| the k -> 0 limit is taken by central differencing at FD_STEP.
K_SMALL = 1e-5
FD_STEP = 1e-5
POLE_THRESHOLD = 1e-12

JostCallable = Callable[[np.ndarray], np.ndarray]


def free_jost_function(bc: BoundaryCondition, k):
    """F_0(k) = k - i cot(theta); f_0(k,0) = 1 in Dirichlet mode."""
    k = np.asarray(k, dtype=complex)
    if bc.is_dirichlet:
        return np.ones_like(k)
    return k - 1j * bc.cot_theta


def free_scattering_matrix(bc: BoundaryCondition, k):
    """S_0(k) = (k + i cot(theta)) / (k - i cot(theta)); identically 1 for Dirichlet."""
    k = np.asarray(k, dtype=complex)
    if bc.is_dirichlet:
        return np.ones_like(k)
    return (k + 1j * bc.cot_theta) / (k - 1j * bc.cot_theta)


def key_quantity_from_jost(jost: JostCallable, bc: BoundaryCondition, k):
    """
    D(k) from a vectorized Jost function.

    Non-Dirichlet: D = [F(k)+F(-k)]/(2i) + (cot/2k)[F(k)-F(-k)].
    Dirichlet: D = [f(k,0) - f(-k,0)]/(2ik).
    For |k| < K_SMALL the same expressions are evaluated at k = FD_STEP,
    which is the central-difference form of D(0) = -iF(0) + cot * F'(0).

    Args:
        jost: F(k) (or f(k,0) in Dirichlet mode) on arrays
        bc: Boundary condition
        k: Scalar or array of wavenumbers

    Returns:
        D with the shape of k
    """
    k_arr = np.asarray(k, dtype=complex)
    flat = k_arr.ravel()
    n = flat.size
    scale = np.maximum(1.0, np.abs(flat))
    kk = np.where(np.abs(flat) < K_SMALL * scale, FD_STEP, flat)
    values = np.asarray(jost(np.concatenate([kk, -kk])), dtype=complex)
    plus, minus = values[:n], values[n:]
    if bc.is_dirichlet:
        D = (plus - minus) / (2j * kk)
    else:
        D = (plus + minus) / 2j + bc.cot_theta / (2.0 * kk) * (plus - minus)
    if k_arr.ndim == 0:
        return complex(D[0])
    return D.reshape(k_arr.shape)


def make_key_quantity(p: Potential, bc: BoundaryCondition, method: str = 'auto') -> Callable:
    """Vectorized k -> D(k) for a potential."""

    def jost(kk):
        return jost_function(p, bc, kk, method)

    def D(k):
        return key_quantity_from_jost(jost, bc, k)

    return D


def D_eval(p: Potential, bc: BoundaryCondition, k, method: str = 'auto'):
    """
    Evaluate the key quantity D(k).

    Args:
        p: Potential
        bc: Boundary condition
        k: Complex wavenumber or array of them
        method: Propagation method, 'auto', 'transfer' or 'ode'

    Returns:
        D(k), complex or array
    """
    return make_key_quantity(p, bc, method)(k)


def D_determinant(p: Potential, bc: BoundaryCondition, k, method: str = 'auto'):
    """D as the determinant of (phi_0, phi) boundary data at x = b."""
    k_arr = np.atleast_1d(np.asarray(k, dtype=complex))
    b = p.support_b
    phi, dphi = regular_data(p, bc, k_arr, b, method)
    phi0, dphi0 = free_regular_solution(bc, k_arr, b)
    D = phi0 * dphi - dphi0 * phi
    return complex(D[0]) if np.ndim(k) == 0 else D


def D_factorized(p: Potential, bc: BoundaryCondition, k, method: str = 'auto'):
    """
    D from [F_0(k)F(-k) - F_0(-k)F(k)]/(2ik), or f(k,0)(S_0 - S)/(2ik)
    in Dirichlet mode. Not defined at k = 0.
    """
    k_arr = np.atleast_1d(np.asarray(k, dtype=complex))
    F = jost_function(p, bc, np.concatenate([k_arr, -k_arr]), method)
    n = k_arr.size
    Fp, Fm = F[:n], F[n:]
    if bc.is_dirichlet:
        S = Fm / Fp
        D = Fp * (1.0 - S) / (2j * k_arr)
    else:
        D = (free_jost_function(bc, k_arr) * Fm - free_jost_function(bc, -k_arr) * Fp) / (2j * k_arr)
    return complex(D[0]) if np.ndim(k) == 0 else D


def scattering_matrix(p: Potential, bc: BoundaryCondition, k: complex, method: str = 'auto') -> complex:
    """
    S(k) = -F(-k)/F(k), or f(-k,0)/f(k,0) in Dirichlet mode.

    Raises:
        PoleError: |F(k)| below the pole threshold
    """
    F = jost_function(p, bc, np.array([k, -k], dtype=complex), method)
    if abs(F[0]) < POLE_THRESHOLD * max(1.0, abs(k)):
        raise PoleError(
            f"Jost function vanishes at k={k}; S has a pole there",
            details={'k': [complex(k).real, complex(k).imag], 'abs_F': float(abs(F[0]))}
        )
    if bc.is_dirichlet:
        return complex(F[1] / F[0])
    return complex(-F[1] / F[0])


def asymptotics_check(p: Potential, bc: BoundaryCondition, k_list: Iterable[complex]) -> pd.DataFrame:
    """
    Large-k residuals for trend assertions.

    Returns:
        DataFrame with columns k_re, k_im, f_residual, F_residual, D_residual
        where f_residual = |f(k,0) - 1 + W/(2ik)|·|k|,
        F_residual = |F(k) - k - i(W/2 - cot)| (NaN in Dirichlet mode),
        D_residual = |D(k) - W/2|.
    """
    ks = np.asarray(list(k_list), dtype=complex)
    W = moment_W(p)
    f0, fp0 = jost_data(p, ks)
    F = jost_function_value(bc, f0, fp0)
    D = D_eval(p, bc, ks)
    f_res = np.abs(f0 - 1.0 + W / (2j * ks)) * np.abs(ks)
    if bc.is_dirichlet:
        F_res = np.full(ks.shape, np.nan)
    else:
        F_res = np.abs(F - ks - 1j * (W / 2.0 - bc.cot_theta))
    D_res = np.abs(D - W / 2.0)
    logger.debug(f"Asymptotic residuals computed at {len(ks)} points")
    return pd.DataFrame({
        'k_re': ks.real,
        'k_im': ks.imag,
        'f_residual': f_res,
        'F_residual': F_res,
        'D_residual': D_res
    })

"""
Hadamard data (gamma, d, zeros) of the key quantity and the truncated product.
"""

import json
import logging
from math import comb, factorial
from pathlib import Path
from typing import Callable, List, Optional, Union

import numpy as np

from ..models.exceptions import AccuracyError, PotentialValidationError
from ..models.records import EigenvalueRecord, HadamardData

logger = logging.getLogger(__name__)

RICHARDSON_LEVELS = 4
RICHARDSON_TOL = 1e-4
BASE_STEP = 0.4


def taylor_coefficient_at_origin(Dfun: Callable, order: int, h0: float = BASE_STEP,
                                 levels: int = RICHARDSON_LEVELS) -> float:
    """
    D^{(order)}(0)/order! for an even order, by central differences on the
    real axis with Richardson extrapolation in h^2.

    Raises:
        AccuracyError: the last two extrapolants differ by more than RICHARDSON_TOL relative
    """
    if order == 0:
        return float(np.real(Dfun(np.array([0.0 + 0j]))[0]))
    half = order // 2
    weights = np.array([(-1) ** i * comb(order, i) for i in range(order + 1)], dtype=float)
    offsets = np.array([half - i for i in range(order + 1)], dtype=float)

    table: List[List[float]] = []
    for j in range(levels):
        h = h0 / 2 ** j
        vals = np.real(Dfun((offsets * h).astype(complex)))
        row = [float(np.dot(weights, vals)) / (h ** order * factorial(order))]
        for m in range(1, j + 1):
            factor = 4.0 ** m
            row.append((factor * row[m - 1] - table[j - 1][m - 1]) / (factor - 1.0))
        table.append(row)

    best, previous = table[-1][-1], table[-2][-2]
    spread = abs(best - previous)
    if spread > RICHARDSON_TOL * abs(best):
        raise AccuracyError(
            f"Taylor coefficient of order {order} unstable: extrapolants {previous:.10g} and {best:.10g}",
            details={'order': order, 'extrapolants': [previous, best], 'h0': h0}
        )
    logger.debug(f"Order-{order} Taylor coefficient {best:.12g} (spread {spread:.2g})")
    return best


def hadamard_extract(
    Dfun: Callable,
    eigs: List[EigenvalueRecord],
    h0: Optional[float] = None,
    support_b: float = 1.0
) -> HadamardData:
    """
    Hadamard parameters from an eigenvalue list.

    d is the lambda-multiplicity of the zero eigenvalue (0 when absent) and
    gamma = D^{(2d)}(0)/(2d)!.

    Args:
        Dfun: Vectorized D(k)
        eigs: Eigenvalue records, the zero record fixes d
        h0: First difference step; defaults to BASE_STEP / max(1, b) and is
            kept below a quarter of the smallest nonzero |k|
        support_b: Support length setting the default step

    Returns:
        HadamardData with the nonzero records as zeros
    """
    d = 0
    zeros = []
    for r in eigs:
        if r.kind == 'zero':
            d = r.multiplicity
        else:
            zeros.append((r.k, r.multiplicity))
    if h0 is None:
        h0 = BASE_STEP / max(1.0, support_b)
        if zeros:
            h0 = min(h0, 0.25 * min(abs(k) for k, _ in zeros))
    gamma = taylor_coefficient_at_origin(Dfun, 2 * d, h0)
    logger.info(f"Hadamard data: d={d}, gamma={gamma:.10g}, {len(zeros)} zeros retained")
    return HadamardData(gamma=gamma, d=d, zeros=tuple(zeros))


def hadamard_eval(h: HadamardData, k):
    """
    Truncated product gamma k^{2d} prod (1 - k^2/k_j^2) over retained zeros,
    including the images -k_j and +-conj(k_j) for off-axis zeros.

    This is an approximation; the neglected tail grows with |k|.
    """
    k = np.asarray(k, dtype=complex)
    k2 = k * k
    out = h.gamma * k2 ** h.d
    for k_j, mult in h.zeros:
        factor = 1.0 - k2 / (k_j * k_j)
        if k_j.real != 0.0 and k_j.imag != 0.0:
            # conj(k_j)^2 carries the mirrored pair
            factor = factor * (1.0 - k2 / (k_j.conjugate() ** 2))
        out = out * factor ** mult
    return out


def hadamard_to_dict(h: HadamardData, support_b: Optional[float] = None) -> dict:
    """JSON form {"gamma", "d", "zeros": [{"k_re", "k_im", "mult"}]}."""
    data = {
        'gamma': float(h.gamma),
        'd': int(h.d),
        'zeros': [{'k_re': float(k.real), 'k_im': float(k.imag), 'mult': int(m)} for k, m in h.zeros]
    }
    if support_b is not None:
        data['b'] = float(support_b)
    return data


def hadamard_from_dict(data: dict) -> HadamardData:
    """Inverse of hadamard_to_dict."""
    try:
        zeros = tuple((complex(z['k_re'], z.get('k_im', 0.0)), int(z.get('mult', 1))) for z in data.get('zeros', []))
        return HadamardData(gamma=float(data['gamma']), d=int(data.get('d', 0)), zeros=zeros)
    except (KeyError, TypeError, ValueError) as exc:
        raise PotentialValidationError(f"malformed Hadamard data: {exc}") from exc


def save_hadamard(h: HadamardData, path: Union[str, Path], support_b: Optional[float] = None) -> None:
    with open(path, 'w') as f:
        json.dump(hadamard_to_dict(h, support_b), f, indent=2)


def taylor_coefficients(Dfun: Callable, n_max: int, radius: float = 0.5, nodes: int = 64) -> np.ndarray:
    """
    Taylor coefficients a_0..a_{n_max} of D at the origin from the Cauchy
    integral on |k| = radius (trapezoid rule, exponentially accurate for
    entire functions).
    """
    theta = 2.0 * np.pi * np.arange(nodes) / nodes
    values = np.asarray(Dfun(radius * np.exp(1j * theta)), dtype=complex)
    coeffs = np.fft.fft(values) / nodes
    return np.real(coeffs[: n_max + 1] / radius ** np.arange(n_max + 1))

"""
Jost function recovered from the datum:

    F(k) = [k^2 + ik(W/2 + M(k)) - cot (W/2 - cot + M(-i cot))] / (k + i cot)

so that F(0) = i(W/2 - cot + M(-i cot)) for cot != 0.
"""

import logging
from typing import Optional

import numpy as np

from .cauchy import CauchyTransform
from .datum import DSource, limit_W

logger = logging.getLogger(__name__)

REMOVABLE_RADIUS = 1e-4


class RecoveredJost:
    """Vectorized F(k) built from a Cauchy transform."""

    def __init__(self, transform: CauchyTransform, cot_theta: float):
        self.transform = transform
        self.cot = float(cot_theta)
        self.W = transform.W
        self.M_pole = transform.M(-1j * self.cot) if self.cot != 0.0 else 0j
        logger.info(f"Recovered F(0) = {self.F0:.10g}")

    @property
    def F0(self) -> complex:
        if self.cot == 0.0:
            return complex(1j * (0.5 * self.W + self.transform.M(0j)))
        return complex(1j * (0.5 * self.W - self.cot + self.M_pole))

    def _direct(self, k: np.ndarray) -> np.ndarray:
        half_W = 0.5 * self.W
        M = np.atleast_1d(self.transform.M(k))
        if self.cot == 0.0:
            return k + 1j * (half_W + M)
        numerator = k * k + 1j * k * (half_W + M) - self.cot * (half_W - self.cot + self.M_pole)
        return numerator / (k + 1j * self.cot)

    def __call__(self, k):
        k_arr = np.atleast_1d(np.asarray(k, dtype=complex))
        out = np.empty(k_arr.shape, dtype=complex)
        pole = -1j * self.cot
        h = REMOVABLE_RADIUS * max(1.0, abs(self.cot))
        near = (self.cot != 0.0) & (np.abs(k_arr - pole) < h)
        if np.any(~near):
            out[~near] = self._direct(k_arr[~near])
        for i in np.nonzero(near)[0]:
            # removable point: average over a symmetric pair around it
            out[i] = 0.5 * np.sum(self._direct(np.array([pole + h, pole - h])))
        if np.ndim(k) == 0:
            return complex(out[0])
        return out


def recover_F(d: DSource, cot_theta: float, k, W: Optional[float] = None,
              transform: Optional[CauchyTransform] = None):
    """
    Recover F(k) from the datum.

    Args:
        d: Datum
        cot_theta: Boundary parameter
        k: Complex point or array
        W: Large-k constant; extracted with limit_W when omitted
        transform: Prebuilt Cauchy transform to reuse

    Returns:
        F(k)
    """
    if transform is None:
        if W is None:
            W = limit_W(d)
        transform = CauchyTransform(d, W)
    return RecoveredJost(transform, cot_theta)(k)

"""
The half-plane function M(k) built from the datum by a Cauchy transform of
g(t) = D(t) - W/2 over the real line.

    I(k) = int_{-R}^{R} g(t)/(t - k) dt = int_0^R g(t) 2k/(t^2 - k^2) dt
    M(k) = I(k)/(pi i)                        Im k >= 0 (boundary value from above)
    Q(k) = M(k) - g(k) on the real axis,      Q = M for Im k > 0
    M(k) = 2D(k) - W - M(-k)                  Im k < 0

Near the real axis the integral is split by subtracting g(k), which leaves
smooth integrands plus logarithms taken on the correct side of the cut.
"""

import logging
from typing import Dict, Optional, Tuple

import numpy as np

from ..models.exceptions import AccuracyError
from .datum import DSource

logger = logging.getLogger(__name__)

PANEL_NODES = 16
PANEL_WIDTH = 0.5
BASE_REACH = 400.0
MAX_DOUBLINGS = 4
TAIL_TOL = 1e-8
DIRECT_IM = 0.25
COINCIDENT = 1e-8
DERIV_STEP = 1e-6


def _log_above(z: float, side: float) -> complex:
    """log of a real z approached from side*i0."""
    if z < 0.0:
        return complex(np.log(-z), side * np.pi)
    return complex(np.log(z), 0.0)


class CauchyTransform:
    """
    Evaluates M(k) and Q(k) for a datum with known W.

    Quadrature nodes and g-values are cached per truncation radius, so
    repeated evaluation over a k-grid reuses the datum samples.
    """

    def __init__(
        self,
        d: DSource,
        W: float,
        R: Optional[float] = None,
        fixed_R: bool = False,
        tail_tol: float = TAIL_TOL
    ):
        """
        Initialize the transform.

        Args:
            d: Datum
            W: Large-k limit constant
            R: Starting truncation radius, BASE_REACH/b by default
            fixed_R: Never grow R (the tail check still raises)
            tail_tol: Allowed tail estimate relative to max(1, |k|)
        """
        self.d = d
        self.W = float(W)
        self.b = d.support_b
        self.R0 = float(R or BASE_REACH / self.b)
        self.fixed_R = fixed_R
        self.tail_tol = tail_tol
        self._grids: Dict[float, Tuple[np.ndarray, np.ndarray, np.ndarray]] = {}

    def g(self, k):
        """D(k) - W/2."""
        return np.asarray(self.d(np.asarray(k, dtype=complex)), dtype=complex) - 0.5 * self.W

    def _grid(self, R: float):
        if R not in self._grids:
            nodes, weights = np.polynomial.legendre.leggauss(PANEL_NODES)
            width = PANEL_WIDTH / self.b
            n_panels = int(np.ceil(R / width))
            edges = np.linspace(0.0, R, n_panels + 1)
            half = 0.5 * np.diff(edges)
            t = (edges[:-1, None] + half[:, None] * (nodes[None, :] + 1.0)).ravel()
            w = (half[:, None] * weights[None, :]).ravel()
            gt = np.real(self.g(t))
            self._grids[R] = (t, w, gt)
            logger.debug(f"Cauchy grid with R={R:.4g}: {t.size} nodes")
        return self._grids[R]

    def _integral(self, k: complex, R: float) -> Tuple[complex, complex]:
        """I(k) and the size of its contribution from [R/2, R]."""
        t, w, gt = self._grid(R)
        upper = t >= 0.5 * R
        if k.imag >= DIRECT_IM / self.b:
            integrand = gt * 2.0 * k / (t * t - k * k)
            return complex(np.dot(w, integrand)), complex(np.dot(w[upper], integrand[upper]))

        gk = complex(self.g(k))
        minus, plus = t - k, t + k
        q1 = np.empty_like(minus)
        q2 = (gt - gk) / plus
        near = np.abs(minus) < COINCIDENT * max(1.0, abs(k))
        far = ~near
        q1[far] = (gt[far] - gk) / minus[far]
        if np.any(near):
            h = DERIV_STEP * max(1.0, abs(k))
            q1[near] = np.real(self.g(t[near] + h) - self.g(t[near] - h)) / (2.0 * h)
        if k.imag == 0.0:
            kr = k.real
            L1 = _log_above(R - kr, -1.0) - _log_above(-kr, -1.0)
            L2 = _log_above(R + kr, 1.0) - _log_above(kr, 1.0)
        else:
            L1 = np.log(R - k) - np.log(-k)
            L2 = np.log(R + k) - np.log(k)
        total = np.dot(w, q1 - q2) + gk * (L1 - L2)
        tail = np.dot(w[upper], gt[upper] * 2.0 * k / (t[upper] ** 2 - k * k))
        return complex(total), complex(tail)

    def _upper(self, k: complex) -> complex:
        """M(k) for Im k >= 0."""
        if k == 0:
            return complex(self.g(0j))
        R = max(self.R0, 2.0 * abs(k) + 50.0 / self.b)
        doublings = 0 if self.fixed_R else MAX_DOUBLINGS
        for attempt in range(doublings + 1):
            value, tail = self._integral(k, R)
            if abs(tail) <= self.tail_tol * max(1.0, abs(k)):
                return value / (np.pi * 1j)
            if attempt < doublings:
                logger.info(f"Cauchy tail {abs(tail):.2g} at k={k:.6g}; growing R to {2 * R:.4g}")
                R *= 2.0
        raise AccuracyError(
            f"Cauchy transform tail {abs(tail):.3g} above tolerance at k={k}",
            stage='M_eval', details={'R': R, 'suggested_R': 2.0 * R, 'k': [k.real, k.imag]}
        )

    def M(self, k):
        """M(k) on scalars or arrays, any half plane."""
        k_arr = np.asarray(k, dtype=complex)
        out = np.empty(k_arr.size, dtype=complex)
        for i, kk in enumerate(k_arr.ravel()):
            kk = complex(kk)
            if kk.imag >= 0.0:
                out[i] = self._upper(kk)
            else:
                out[i] = 2.0 * complex(self.g(kk)) - self._upper(-kk)
        if k_arr.ndim == 0:
            return complex(out[0])
        return out.reshape(k_arr.shape)

    def Q(self, k):
        """Q(k) = M(k) - (D(k) - W/2) on the real axis, M(k) above it."""
        k_arr = np.asarray(k, dtype=complex)
        M = np.atleast_1d(self.M(k_arr))
        jump = np.where(np.atleast_1d(k_arr).imag == 0.0, np.atleast_1d(self.g(k_arr)), 0.0)
        Q = M - jump
        if k_arr.ndim == 0:
            return complex(Q[0])
        return Q.reshape(k_arr.shape)


def M_eval(d: DSource, W: float, k, R: Optional[float] = None):
    """
    Evaluate the half-plane function M at k.

    Args:
        d: Datum
        W: Large-k limit constant
        k: Complex point or array
        R: Starting truncation radius

    Returns:
        M(k)
    """
    return CauchyTransform(d, W, R).M(k)


def Q_eval(d: DSource, W: float, k, R: Optional[float] = None):
    """Evaluate Q(k), the principal-value transform on the real axis."""
    return CauchyTransform(d, W, R).Q(k)

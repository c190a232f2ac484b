"""
Argument-principle zero counting on rectangles and circles.

The phase of the function is tracked along the contour with adaptive
bisection so that no step turns the phase by pi/2 or more.
"""

import logging
from typing import Callable, Tuple

import numpy as np

from ..models.exceptions import AmbiguityError, ContourError

logger = logging.getLogger(__name__)

PHASE_STEP_LIMIT = 0.5 * np.pi
ZERO_TOLERANCE = 1e-10
MAX_NUDGES = 5
MAX_REFINEMENTS = 40

Rect = Tuple[float, float, float, float]


class _BoundaryZero(Exception):
    """A zero sits on (or numerically next to) the contour."""


def _phase_change(fn: Callable, path: Callable, n_initial: int) -> float:
    """Total phase change of fn along path(t), t from 0 to 1."""
    t = np.linspace(0.0, 1.0, n_initial + 1)
    vals = np.asarray(fn(path(t)), dtype=complex)
    for _ in range(MAX_REFINEMENTS):
        if not np.all(np.isfinite(vals)):
            raise ContourError("non-finite function values on the contour")
        mags = np.abs(vals)
        # compare against neighbours: |D| may grow exponentially along an edge
        neighbours = np.maximum(np.concatenate([mags[1:], mags[-1:]]), np.concatenate([mags[:1], mags[:-1]]))
        if np.any(mags <= ZERO_TOLERANCE * neighbours) or np.any(mags == 0.0):
            raise _BoundaryZero()
        dphi = np.angle(vals[1:] / vals[:-1])
        bad = np.nonzero(np.abs(dphi) >= PHASE_STEP_LIMIT)[0]
        if bad.size == 0:
            return float(np.sum(dphi))
        if np.min(t[bad + 1] - t[bad]) < 1e-13:
            raise _BoundaryZero()
        mids = 0.5 * (t[bad] + t[bad + 1])
        new_vals = np.asarray(fn(path(mids)), dtype=complex)
        t = np.insert(t, bad + 1, mids)
        vals = np.insert(vals, bad + 1, new_vals)
    raise ContourError("phase tracking did not resolve within the refinement limit")


def _to_count(total_phase: float) -> int:
    winding = total_phase / (2.0 * np.pi)
    count = int(round(winding))
    if abs(winding - count) > 1e-3:
        raise ContourError(f"winding number {winding:.6f} is not an integer")
    return count


def _rect_winding(fn: Callable, rect: Rect) -> int:
    re0, re1, im0, im1 = rect
    corners = [complex(re0, im0), complex(re1, im0), complex(re1, im1), complex(re0, im1)]
    total = 0.0
    for z0, z1 in zip(corners, corners[1:] + corners[:1]):
        n = max(64, int(32 * abs(z1 - z0)))
        total += _phase_change(fn, lambda t, a=z0, b=z1: a + (b - a) * t, n)
    return _to_count(total)


def count_zeros_rect(Dfun: Callable, rect: Rect) -> int:
    """
    Number of zeros of Dfun inside an axis-aligned rectangle.

    Args:
        Dfun: Vectorized analytic function
        rect: (re0, re1, im0, im1)

    Returns:
        Zeros inside, counted with multiplicity

    Raises:
        ContourError: a zero stays on the boundary after MAX_NUDGES nudges
    """
    re0, re1, im0, im1 = rect
    size = max(re1 - re0, im1 - im0)
    current = rect
    for attempt in range(MAX_NUDGES + 1):
        try:
            return _rect_winding(Dfun, current)
        except _BoundaryZero:
            delta = 0.6180339887e-3 * (attempt + 1) * size
            current = (re0 - delta, re1 + delta, im0 - delta, im1 + delta)
            logger.debug(f"Zero on rectangle boundary, nudging outward by {delta:.3g}")
    raise ContourError(f"zero on the boundary of {rect} after {MAX_NUDGES} nudges",
                       details={'rect': list(rect)})


def count_zeros_disk(Dfun: Callable, center: complex, radius: float) -> int:
    """Number of zeros of Dfun inside the circle |k - center| < radius."""
    r = radius
    for attempt in range(MAX_NUDGES + 1):
        try:
            total = _phase_change(
                Dfun, lambda t, rr=r: center + rr * np.exp(2j * np.pi * t), 128
            )
            return _to_count(total)
        except _BoundaryZero:
            r = radius * (1.0 - 0.0618 * (attempt + 1))
    raise ContourError(f"zero on the circle of radius {radius} around {center}")


def zero_order_at(Dfun: Callable, k0: complex, radius: float = 1e-3, max_halvings: int = 8) -> int:
    """
    Order in k of the zero of Dfun at k0.

    The circle shrinks until two consecutive radii give the same count.

    Raises:
        AmbiguityError: the count never stabilises
    """
    r = radius
    counts = [count_zeros_disk(Dfun, k0, r)]
    for _ in range(max_halvings):
        r *= 0.5
        counts.append(count_zeros_disk(Dfun, k0, r))
        if counts[-1] == counts[-2]:
            return counts[-1]
    raise AmbiguityError(
        f"multiplicity at k={k0} did not stabilise",
        details={'counts': counts, 'radius': radius}
    )


def multiplicity_at(Dfun: Callable, k0: complex, radius: float = 1e-3) -> int:
    """
    Lambda-multiplicity of a zero at k0.

    Args:
        Dfun: Vectorized D(k)
        k0: Location of the zero
        radius: Starting circle radius

    Returns:
        m for k0 != 0 and m/2 at the origin, m being the order in k
    """
    m = zero_order_at(Dfun, k0, radius)
    if k0 == 0:
        return m // 2
    return m

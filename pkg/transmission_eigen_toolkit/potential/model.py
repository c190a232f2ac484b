"""
Compactly supported potentials and the boundary condition at the origin.
"""

import logging
import math
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import trapezoid

from ..models.exceptions import PotentialValidationError
from ..models.records import ValidationReport

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Segment:
    """Constant height v on (x0, x1)."""

    x0: float
    x1: float
    v: float


@dataclass(frozen=True)
class Delta:
    """Dirac spike of strength c at x = a."""

    a: float
    c: float


@dataclass(frozen=True, eq=False)
class Potential:
    """
    Real potential vanishing outside (0, support_b).

    A potential is built from piecewise-constant segments or from a uniform
    sample grid (linearly interpolated), optionally combined with delta
    spikes. Deltas never enter pointwise evaluation; the integrators apply
    them as jumps of f'.
    """

    support_b: float
    segments: Tuple[Segment, ...] = ()
    deltas: Tuple[Delta, ...] = ()
    sample_xs: Optional[np.ndarray] = None
    sample_vs: Optional[np.ndarray] = None

    @property
    def has_samples(self) -> bool:
        return self.sample_xs is not None and len(self.sample_xs) > 0

    @property
    def is_piecewise_constant(self) -> bool:
        """True when exact transfer matrices apply everywhere."""
        return not self.has_samples

    @classmethod
    def zero(cls, b: float = 1.0) -> "Potential":
        return cls(support_b=float(b))

    @classmethod
    def square_well(cls, v: float, b: float = 1.0) -> "Potential":
        return cls(support_b=float(b), segments=(Segment(0.0, float(b), float(v)),))

    @classmethod
    def two_step(cls, v: float, b: float = 1.0) -> "Potential":
        """Height v on (0, b/2) and -v on (b/2, b)."""
        half = 0.5 * float(b)
        return cls(
            support_b=float(b),
            segments=(Segment(0.0, half, float(v)), Segment(half, float(b), -float(v)))
        )

    @classmethod
    def piecewise(cls, b: float, segments: Iterable[Sequence[float]]) -> "Potential":
        segs = tuple(Segment(float(x0), float(x1), float(v)) for x0, x1, v in segments)
        return cls(support_b=float(b), segments=segs)

    @classmethod
    def delta(cls, a: float, c: float, b: float = 1.0) -> "Potential":
        return cls(support_b=float(b), deltas=(Delta(float(a), float(c)),))

    @classmethod
    def tabulated(cls, xs: Sequence[float], vs: Sequence[float]) -> "Potential":
        """Linearly interpolated samples; the support ends at the last node."""
        xs = np.asarray(xs, dtype=float)
        vs = np.asarray(vs, dtype=float)
        if xs.ndim != 1 or xs.shape != vs.shape or len(xs) < 2:
            raise PotentialValidationError("samples need matching 1-d xs and vs with >= 2 nodes")
        return cls(support_b=float(xs[-1]), sample_xs=xs, sample_vs=vs)


@dataclass(frozen=True)
class BoundaryCondition:
    """
    Selfadjoint boundary condition at x = 0.

    cot_theta set: psi'(0) + cot_theta * psi(0) = 0.
    cot_theta None: Dirichlet, psi(0) = 0.
    """

    cot_theta: Optional[float] = 0.0

    def __post_init__(self):
        if self.cot_theta is not None and not math.isfinite(self.cot_theta):
            raise PotentialValidationError("cot_theta must be finite")

    @property
    def is_dirichlet(self) -> bool:
        return self.cot_theta is None

    @classmethod
    def non_dirichlet(cls, cot_theta: float) -> "BoundaryCondition":
        return cls(cot_theta=float(cot_theta))

    @classmethod
    def dirichlet(cls) -> "BoundaryCondition":
        return cls(cot_theta=None)

    def describe(self) -> str:
        if self.is_dirichlet:
            return "Dirichlet"
        return f"cot(theta)={self.cot_theta:g}"


def validate(p: Potential) -> ValidationReport:
    """
    Check the potential invariants.

    Args:
        p: Potential to check

    Returns:
        ValidationReport; delta potentials pass with is_class_A False

    Raises:
        PotentialValidationError: overlapping segments, out-of-range
            deltas, non-finite values or a malformed sample grid
    """
    messages: List[str] = []
    b = p.support_b
    if not (math.isfinite(b) and b > 0):
        raise PotentialValidationError(f"support_b must be positive and finite, got {b}")

    if p.segments and p.has_samples:
        raise PotentialValidationError("segments and samples cannot be combined")

    ordered = sorted(p.segments, key=lambda s: (s.x0, s.x1))
    for seg in ordered:
        if not all(math.isfinite(val) for val in (seg.x0, seg.x1, seg.v)):
            raise PotentialValidationError(f"non-finite segment {seg}")
        if not (0.0 <= seg.x0 < seg.x1 <= b):
            raise PotentialValidationError(f"segment ({seg.x0}, {seg.x1}) outside [0, {b}]")
    for left, right in zip(ordered, ordered[1:]):
        if right.x0 < left.x1:
            raise PotentialValidationError(
                f"overlapping segments ({left.x0}, {left.x1}) and ({right.x0}, {right.x1})",
                details={'left': [left.x0, left.x1], 'right': [right.x0, right.x1]}
            )

    for spike in p.deltas:
        if not (math.isfinite(spike.a) and math.isfinite(spike.c)):
            raise PotentialValidationError(f"non-finite delta {spike}")
        if not (0.0 < spike.a < b):
            raise PotentialValidationError(f"delta location {spike.a} outside (0, {b})")

    if p.has_samples:
        xs, vs = p.sample_xs, p.sample_vs
        if vs is None or xs.shape != vs.shape:
            raise PotentialValidationError("sample xs and vs differ in length")
        if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(vs))):
            raise PotentialValidationError("non-finite sample values")
        steps = np.diff(xs)
        if xs[0] != 0.0 or abs(xs[-1] - b) > 1e-12 * b or np.any(steps <= 0):
            raise PotentialValidationError("samples must increase from 0 to support_b")
        if np.max(np.abs(steps - steps.mean())) > 1e-9 * b:
            raise PotentialValidationError("sample grid must be uniform")

    has_deltas = bool(p.deltas)
    if has_deltas:
        messages.append("delta potential is not in class A; handled by jump conditions")
        logger.warning(messages[-1])
    return ValidationReport(is_class_A=not has_deltas, has_deltas=has_deltas, messages=tuple(messages))


def evaluate(p: Potential, x: float) -> float:
    """Pointwise V(x) without delta contributions."""
    if not (0.0 < x < p.support_b):
        return 0.0
    if p.has_samples:
        return float(np.interp(x, p.sample_xs, p.sample_vs))
    for seg in p.segments:
        if seg.x0 <= x < seg.x1:
            return seg.v
    return 0.0


def evaluate_many(p: Potential, xs: np.ndarray) -> np.ndarray:
    """Vectorized evaluate."""
    xs = np.asarray(xs, dtype=float)
    out = np.zeros_like(xs)
    inside = (xs > 0.0) & (xs < p.support_b)
    if p.has_samples:
        out[inside] = np.interp(xs[inside], p.sample_xs, p.sample_vs)
        return out
    for seg in p.segments:
        mask = inside & (xs >= seg.x0) & (xs < seg.x1)
        out[mask] = seg.v
    return out


def moment_W(p: Potential) -> float:
    """W = integral of V over (0, b) plus the delta strengths."""
    total = sum((seg.x1 - seg.x0) * seg.v for seg in p.segments)
    if p.has_samples:
        total += float(trapezoid(p.sample_vs, p.sample_xs))
    total += sum(spike.c for spike in p.deltas)
    return float(total)


def potential_l1_norm(p: Potential) -> float:
    """L1 norm of V, counting |c| for every delta."""
    total = sum((seg.x1 - seg.x0) * abs(seg.v) for seg in p.segments)
    if p.has_samples:
        total += float(trapezoid(np.abs(p.sample_vs), p.sample_xs))
    total += sum(abs(spike.c) for spike in p.deltas)
    return float(total)


def breakpoints(p: Potential) -> np.ndarray:
    """Sorted points in [0, b] where V jumps or a delta sits."""
    points = {0.0, p.support_b}
    for seg in p.segments:
        points.update((seg.x0, seg.x1))
    for spike in p.deltas:
        points.add(spike.a)
    return np.array(sorted(points))


def delta_strength_at(p: Potential, x: float) -> float:
    """Total delta strength located exactly at x."""
    return sum(spike.c for spike in p.deltas if spike.a == x)

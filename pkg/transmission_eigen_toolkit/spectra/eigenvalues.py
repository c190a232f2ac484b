"""
Transmission eigenvalue search in the closed first quadrant.

The real and imaginary axes are scanned on a uniform grid for sign changes
(and touching zeros) of the real-valued restriction of D. The open quadrant
is searched by recursive rectangle subdivision driven by the argument
principle, with Newton polishing once a box isolates a zero.
"""

import logging
from dataclasses import replace
from typing import Callable, List, Optional, Tuple

import numpy as np
import pandas as pd
from scipy.optimize import brentq, minimize_scalar

from ..forward.key_quantity import free_scattering_matrix, make_key_quantity
from ..forward.propagation import OVERFLOW_GUARD, jost_function
from ..models.exceptions import (
    AccuracyError,
    AmbiguityError,
    ContourError,
    PoleError,
    PotentialValidationError,
    UnsupportedInputError,
)
from ..models.records import EigenvalueRecord, SearchParams, sort_records
from ..potential.model import BoundaryCondition, Potential
from .contour import count_zeros_rect, multiplicity_at, zero_order_at
from .hadamard import hadamard_extract

logger = logging.getLogger(__name__)

TOUCH_RATIO = 1e-8
NEWTON_MAX_ITER = 60
DEDUPE_TOL = 1e-7


def default_scan_step(b: float) -> float:
    """Axis scan step pi/(8b), an eighth of the asymptotic zero spacing."""
    return np.pi / (8.0 * b)


def _scalar(fn: Callable) -> Callable[[float], float]:
    return lambda x: float(fn(np.array([x]))[0])


def axis_roots(g: Callable, grid: np.ndarray) -> List[float]:
    """
    Roots of a real function on a grid: sign changes refined by brentq,
    plus touching zeros found as tiny local minima of |g|.

    Args:
        g: Vectorized real function
        grid: Increasing sample points

    Returns:
        Sorted root locations
    """
    vals = np.asarray(g(grid), dtype=float)
    gs = _scalar(g)
    roots = []
    for i in range(len(grid) - 1):
        a, b = vals[i], vals[i + 1]
        if a == 0.0:
            roots.append(float(grid[i]))
        elif a * b < 0.0:
            roots.append(brentq(gs, grid[i], grid[i + 1], xtol=1e-14, rtol=4 * np.finfo(float).eps, maxiter=200))
    if len(vals) and vals[-1] == 0.0:
        roots.append(float(grid[-1]))

    for i in range(1, len(grid) - 1):
        left, mid, right = vals[i - 1], vals[i], vals[i + 1]
        if not (abs(mid) < abs(left) and abs(mid) < abs(right)):
            continue
        if np.sign(left) != np.sign(mid) or np.sign(mid) != np.sign(right) or mid == 0.0:
            continue
        res = minimize_scalar(lambda x: abs(gs(x)), bounds=(grid[i - 1], grid[i + 1]),
                              method='bounded', options={'xatol': 1e-13})
        if abs(gs(res.x)) <= TOUCH_RATIO * max(abs(left), abs(right)):
            logger.debug(f"Touching zero found near {res.x:.10g}")
            roots.append(float(res.x))
    return sorted(roots)


def local_scale(Dfun: Callable, k: complex) -> float:
    """max(1, |D|) sampled around k; refinement residuals are measured against it."""
    delta = 1e-2 * max(1.0, abs(k))
    probes = k + delta * np.array([1, -1, 1j, -1j])
    return max(1.0, float(np.max(np.abs(Dfun(probes)))))


def _newton(Dfun: Callable, k0: complex) -> Tuple[complex, bool]:
    k = complex(k0)
    for _ in range(NEWTON_MAX_ITER):
        h = 1e-7 * max(1.0, abs(k))
        vals = Dfun(np.array([k, k + h, k - h]))
        slope = (vals[1] - vals[2]) / (2.0 * h)
        if slope == 0 or not np.isfinite(slope):
            return k, False
        step = vals[0] / slope
        k = k - step
        if abs(step) < 1e-13 * max(1.0, abs(k)):
            return k, True
    return k, False


def _inside(rect, k: complex, pad: float = 0.0) -> bool:
    re0, re1, im0, im1 = rect
    return re0 - pad <= k.real <= re1 + pad and im0 - pad <= k.imag <= im1 + pad


def _split(rect):
    re0, re1, im0, im1 = rect
    if re1 - re0 >= im1 - im0:
        mid = 0.5 * (re0 + re1)
        return (re0, mid, im0, im1), (mid, re1, im0, im1)
    mid = 0.5 * (im0 + im1)
    return (re0, re1, im0, mid), (re0, re1, mid, im1)


def isolate_quadrant_zeros(Dfun: Callable, rect, min_box: float) -> List[Tuple[complex, int, bool]]:
    """
    Locate the zeros of Dfun inside rect by subdivision.

    Returns:
        (k, multiplicity, converged) per zero or zero cluster
    """
    found = []
    total = count_zeros_rect(Dfun, rect)
    logger.info(f"Quadrant rectangle {rect} holds {total} zeros")
    stack = [(rect, total)]
    boxes = 0
    while stack:
        box, count = stack.pop()
        if count <= 0:
            continue
        boxes += 1
        re0, re1, im0, im1 = box
        center = complex(0.5 * (re0 + re1), 0.5 * (im0 + im1))
        diameter = float(np.hypot(re1 - re0, im1 - im0))
        if count == 1:
            k, ok = _newton(Dfun, center)
            if ok and _inside(box, k):
                found.append((k, 1, True))
                continue
        if diameter < min_box:
            k, ok = _newton(Dfun, center)
            if not (ok and _inside(box, k, pad=diameter)):
                k, ok = center, False
            found.append((k, count, ok))
            continue
        first, second = _split(box)
        n_first = count_zeros_rect(Dfun, first)
        n_second = count_zeros_rect(Dfun, second)
        if n_first + n_second != count:
            logger.warning(f"Subdivision of {box} counted {n_first}+{n_second} zeros, expected {count}")
        stack.append((second, n_second))
        stack.append((first, n_first))
    logger.info(f"Quadrant search visited {boxes} boxes")

    unique: List[Tuple[complex, int, bool]] = []
    for k, mult, ok in found:
        if any(abs(k - u[0]) < DEDUPE_TOL * max(1.0, abs(k)) for u in unique):
            continue
        unique.append((k, mult, ok))
    return unique


def _safe_multiplicity(Dfun: Callable, k: complex, radius: float) -> int:
    try:
        return multiplicity_at(Dfun, k, radius)
    except (AmbiguityError, ContourError) as exc:
        logger.warning(f"Multiplicity at k={k} undetermined ({exc}); recording 1")
        return 1


def transmission_eigenvalues(
    p: Potential,
    bc: BoundaryCondition,
    search: Optional[SearchParams] = None,
    Dfun: Optional[Callable] = None
) -> List[EigenvalueRecord]:
    """
    Transmission eigenvalues lambda = k^2 with k in the closed first quadrant.

    Args:
        p: Potential, supplies the support b for the scan step and D when
            Dfun is omitted
        bc: Boundary condition
        search: Search region and tolerances
        Dfun: Optional vectorized D(k) overriding the computed one

    Returns:
        Records sorted by |lambda|
    """
    search = search or SearchParams()
    D = Dfun or make_key_quantity(p, bc)
    b = p.support_b
    step = search.scan_step or default_scan_step(b)
    r0 = search.origin_radius
    records: List[EigenvalueRecord] = []

    probe = np.abs(D(np.array([0.37, 1.3 + 0.4j, 2.9j]) / b))
    if np.all(probe == 0.0):
        raise UnsupportedInputError("D vanishes identically; every lambda is a transmission eigenvalue")

    m0 = zero_order_at(D, 0j, r0)
    if m0 > 0:
        logger.info(f"lambda = 0 is a transmission eigenvalue of k-order {m0}")
        records.append(EigenvalueRecord.from_k(0j, max(1, m0 // 2), abs(D(0j)), True))

    n_real = int(np.floor(search.k_max / step - 0.5)) + 1
    real_grid = np.concatenate([[2.0 * r0], (np.arange(max(n_real, 0)) + 0.5) * step])
    real_grid = np.unique(real_grid[real_grid <= search.k_max])
    real_roots = axis_roots(lambda x: np.real(D(x.astype(complex))), real_grid)
    logger.info(f"Real-axis scan to k={search.k_max} found {len(real_roots)} zeros")

    beta_max = search.beta_max
    if beta_max * b > OVERFLOW_GUARD:
        beta_max = OVERFLOW_GUARD / b
        logger.warning(f"beta_max clamped to {beta_max:.4g} by the overflow guard")
    n_imag = int(np.floor(beta_max / step - 0.5)) + 1
    imag_grid = np.concatenate([[2.0 * r0], (np.arange(max(n_imag, 0)) + 0.5) * step])
    imag_grid = np.unique(imag_grid[imag_grid <= beta_max])
    imag_roots = axis_roots(lambda x: np.real(D(1j * x)), imag_grid)
    logger.info(f"Imaginary-axis scan to beta={beta_max:.4g} found {len(imag_roots)} zeros")

    axis_points = [complex(x, 0.0) for x in real_roots] + [complex(0.0, x) for x in imag_roots]
    for k in axis_points:
        if abs(k) <= r0:
            continue
        radius = min(step / 4.0, 0.5 * abs(k))
        mult = _safe_multiplicity(D, k, radius)
        residual = float(abs(D(k)))
        scale = local_scale(D, k)
        refined = residual <= search.tol * scale
        if not refined:
            logger.warning(f"Axis zero at k={k} has residual {residual:.3g}")
        records.append(EigenvalueRecord.from_k(k, max(1, mult), residual, refined, scale))

    if search.quadrant:
        rect = search.rect or (search.axis_offset, search.k_max, search.axis_offset, beta_max)
        for k, mult, ok in isolate_quadrant_zeros(D, rect, search.min_box):
            residual = float(abs(D(k)))
            scale = local_scale(D, k)
            refined = ok and residual <= search.tol * scale
            if not refined:
                logger.warning(f"Complex zero near k={k} unrefined, residual {residual:.3g}")
            records.append(EigenvalueRecord.from_k(k, mult, residual, refined, scale))

    return with_gamma_scale(D, sort_records(records), search.tol, b)


def with_gamma_scale(
    Dfun: Callable,
    records: List[EigenvalueRecord],
    tol: float,
    support_b: float = 1.0
) -> List[EigenvalueRecord]:
    """
    Attach max(1, |gamma|) to every record and log the refined zeros whose
    residual exceeds tol times that scale.

    Records are returned unchanged when gamma cannot be extracted.
    """
    try:
        gamma = hadamard_extract(Dfun, records, support_b=support_b).gamma
    except (AccuracyError, PotentialValidationError) as e:
        logger.warning(f"No gamma scale for the residual check: {e}")
        return records
    scale = max(1.0, abs(gamma))
    loose = [r for r in records if r.refined and r.residual > tol * scale]
    if loose:
        logger.warning(f"{len(loose)} refined zeros have |D| above {tol * scale:.3g} = tol*max(1, |gamma|)")
    return [replace(r, gamma_scale=scale) for r in records]


def full_zero_set(records: List[EigenvalueRecord]) -> List[Tuple[complex, int]]:
    """
    All zeros of D in C from first-quadrant records, via k -> {k, -k, k*, -k*}.

    The origin carries k-order 2 * multiplicity.
    """
    zeros = []
    for r in records:
        if r.kind == 'zero':
            zeros.append((0j, 2 * r.multiplicity))
            continue
        images = {r.k, -r.k, r.k.conjugate(), -r.k.conjugate()}
        for z in sorted(images, key=lambda z: (z.real, z.imag)):
            zeros.append((z, r.multiplicity))
    return zeros


def theorem_checks(
    p: Potential,
    bc: BoundaryCondition,
    records: List[EigenvalueRecord]
) -> pd.DataFrame:
    """
    Per-record |S(k) - S_0(k)| and |F(k)| table.

    S_0 = S holds at every eigenvalue away from 0 and +-i cot(theta), and F
    does not vanish there. Rows at excluded points carry NaN.
    """
    rows = []
    for r in records:
        k = r.k
        excluded = r.kind == 'zero'
        if not bc.is_dirichlet and r.kind == "negative" and abs(k.imag - bc.cot_theta) < 1e-9 * max(1.0, abs(k)):
            excluded = True
        F = jost_function(p, bc, np.array([k, -k]))
        s_gap = np.nan
        if not excluded:
            try:
                if abs(F[0]) < 1e-12 * max(1.0, abs(k)):
                    raise PoleError(f"F vanishes at k={k}")
                S = -F[1] / F[0] if not bc.is_dirichlet else F[1] / F[0]
                s_gap = float(abs(S - free_scattering_matrix(bc, k)))
            except PoleError:
                logger.warning(f"S has a pole at eigenvalue k={k}")
        rows.append({
            'k_re': k.real,
            'k_im': k.imag,
            'kind': r.kind,
            'S_gap': s_gap,
            'abs_F': float(abs(F[0])),
            'excluded': excluded
        })
    return pd.DataFrame(rows, columns=['k_re', 'k_im', 'kind', 'S_gap', 'abs_F', 'excluded'])


EIGENVALUE_COLUMNS = ['lambda_re', 'lambda_im', 'k_re', 'k_im', 'multiplicity', 'kind', 'residual']


def records_to_frame(records: List[EigenvalueRecord]) -> pd.DataFrame:
    """Eigenvalue records as a DataFrame with the CSV column layout."""
    rows = [{
        'lambda_re': r.lam.real,
        'lambda_im': r.lam.imag,
        'k_re': r.k.real,
        'k_im': r.k.imag,
        'multiplicity': r.multiplicity,
        'kind': r.kind,
        'residual': r.residual
    } for r in records]
    return pd.DataFrame(rows, columns=EIGENVALUE_COLUMNS)


def write_eigenvalues(path, records: List[EigenvalueRecord]) -> None:
    """Eigenvalue CSV with full-precision floats."""
    records_to_frame(records).to_csv(path, index=False, float_format='%.17g')
    logger.info(f"Wrote {len(records)} eigenvalues to {path}")

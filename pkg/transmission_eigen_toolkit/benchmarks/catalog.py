"""
Regression fixtures with published reference values.

Each fixture names a potential, a boundary condition and the reference
numbers it must reproduce; run_benchmark computes them and returns a
reference-vs-computed table.
"""

import logging
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
from scipy.optimize import fsolve

from ..forward.closed_forms import delta_key_quantity, square_well_key_quantity
from ..forward.key_quantity import make_key_quantity
from ..forward.propagation import jost_function
from ..models.exceptions import AccuracyError, PotentialValidationError
from ..models.records import EigenvalueRecord, SearchParams
from ..potential.model import BoundaryCondition, Potential
from ..spectra.contour import zero_order_at
from ..spectra.eigenvalues import transmission_eigenvalues
from ..spectra.hadamard import hadamard_extract, taylor_coefficients

logger = logging.getLogger(__name__)

REL_TOL = 1e-3
RESIDUAL_TOL = 1e-8
CLOSED_FORM_TOL = 1e-10
TREND_INDICES = tuple(range(10, 15))
EARLY_TREND_INDICES = tuple(range(5, 10))

REPORT_COLUMNS = ['quantity', 'reference', 'computed', 'abs_deviation', 'rel_deviation', 'tolerance', 'passed']


@dataclass(frozen=True, eq=False)
class Benchmark:
    """
    A regression fixture.

    Attributes:
        id: Catalogue key
        description: One-line summary
        potential: Potential of the fixture
        bc: Boundary condition
        reference: Reference values by quantity name
        decimals: Printed decimals of the reference values; the last printed
            digit carries a +-1 uncertainty
        check: Which comparison to run
        search: Eigenvalue search settings
        params: Extra numbers the check needs
    """

    id: str
    description: str
    potential: Potential
    bc: BoundaryCondition
    reference: Dict[str, float]
    check: str
    decimals: Dict[str, int] = field(default_factory=dict)
    search: SearchParams = field(default_factory=SearchParams)
    params: Dict[str, Any] = field(default_factory=dict)

    def tolerance(self, quantity: str) -> float:
        """Pass band: relative REL_TOL widened to one unit in the last printed place."""
        value = self.reference[quantity]
        band = REL_TOL * abs(value)
        if quantity in self.decimals:
            band = max(band, 10.0 ** (-self.decimals[quantity]))
        return band


@dataclass(frozen=True, eq=False)
class BenchmarkReport:
    """Reference-vs-computed table of one fixture and its summary."""

    table: pd.DataFrame
    summary: Dict[str, Any]

    @property
    def passed(self) -> bool:
        return bool(self.summary['passed'])

    def to_dict(self) -> Dict[str, Any]:
        return {'summary': self.summary, 'rows': self.table.to_dict(orient='records')}


def _row(quantity: str, reference: float, computed: float, tolerance: float,
         passed: Optional[bool] = None) -> Dict[str, Any]:
    deviation = abs(computed - reference)
    rel = deviation / abs(reference) if reference != 0 else float('nan')
    return {
        'quantity': quantity,
        'reference': float(reference),
        'computed': float(computed),
        'abs_deviation': float(deviation),
        'rel_deviation': float(rel),
        'tolerance': float(tolerance),
        'passed': bool(deviation <= tolerance) if passed is None else bool(passed)
    }


def _positive_records(records: List[EigenvalueRecord]) -> List[EigenvalueRecord]:
    return sorted((r for r in records if r.kind == 'positive'), key=lambda r: r.k.real)


def refine_double_origin(cot_theta: float, v: float, b: float = 1.0) -> Tuple[float, float]:
    """
    Square-well parameters (cot, v) with D_0 = D_2 = 0, started from rounded values.

    Raises:
        AccuracyError: the 2x2 solve does not converge
    """
    def residual(params):
        c, vv = params
        coeffs = taylor_coefficients(lambda k: square_well_key_quantity(k, vv, b, c), 2)
        return [coeffs[0], coeffs[2]]

    solution, info, status, message = fsolve(residual, [cot_theta, v], full_output=True, xtol=1e-13)
    if status != 1:
        raise AccuracyError(f"double-zero refinement failed: {message}",
                            details={'start': [cot_theta, v]})
    logger.info(f"Refined double-zero parameters cot={solution[0]:.12g}, v={solution[1]:.12g}")
    return float(solution[0]), float(solution[1])


def _check_origin(bm: Benchmark) -> List[Dict[str, Any]]:
    rows = []
    p, bc = bm.potential, bm.bc
    if 'cot_theta' in bm.reference:
        c, v = refine_double_origin(bm.reference['cot_theta'], bm.reference['v'], p.support_b)
        rows.append(_row('cot_theta', bm.reference['cot_theta'], c, bm.tolerance('cot_theta')))
        rows.append(_row('v', bm.reference['v'], v, bm.tolerance('v')))
        p = Potential.square_well(v, p.support_b)
        bc = BoundaryCondition.non_dirichlet(c)
    D = make_key_quantity(p, bc)
    if 'D0' in bm.reference:
        rows.append(_row('D0', bm.reference['D0'], float(np.real(D(0j))), RESIDUAL_TOL))
    order = zero_order_at(D, 0j, bm.search.origin_radius)
    rows.append(_row('lambda0_multiplicity', bm.reference['lambda0_multiplicity'], order // 2, 0.0))
    return rows


def _check_spectrum(bm: Benchmark) -> List[Dict[str, Any]]:
    records = transmission_eigenvalues(bm.potential, bm.bc, bm.search)
    positives = _positive_records(records)
    negatives = [r for r in records if r.kind == 'negative']
    expected = [q for q in bm.reference if q.startswith('lambda_')]
    rows = [_row('positive_count', len(expected), len(positives), 0.0),
            _row('negative_count', 0, len(negatives), 0.0)]
    for q, r in zip(expected, positives):
        rows.append(_row(q, bm.reference[q], r.lam.real, bm.tolerance(q)))
    return rows


def trend_deviations(positives: List[EigenvalueRecord], indices) -> Dict[int, float]:
    """|lambda_j - j^2 pi^2| / lambda_j with j counted from 0 along the positive zeros."""
    out = {}
    for j in indices:
        if j < len(positives):
            lam = positives[j].lam.real
            out[j] = abs(lam - (j * np.pi) ** 2) / lam
    return out


def _check_trend(bm: Benchmark) -> List[Dict[str, Any]]:
    records = transmission_eigenvalues(bm.potential, bm.bc, bm.search)
    positives = _positive_records(records)
    expected = [q for q in bm.reference if q.startswith('k_')]
    rows = []
    for q, r in zip(expected, positives):
        rows.append(_row(q, bm.reference[q], r.k.real, bm.tolerance(q)))
    if len(positives) < len(expected):
        rows.append(_row('positive_count', len(expected), len(positives), 0.0))

    late = trend_deviations(positives, TREND_INDICES)
    early = trend_deviations(positives, EARLY_TREND_INDICES)
    # simple and cubic-type zeros alternate, so the decrease holds per parity
    trend_ok = len(late) == len(TREND_INDICES) and all(
        late[j + 2] < late[j] for j in TREND_INDICES if j + 2 in late
    )
    if early:
        trend_ok = trend_ok and max(late.values()) < max(early.values())
    for j, dev in late.items():
        row = _row(f'trend_{j}', (j * np.pi) ** 2, positives[j].lam.real, float('nan'), trend_ok)
        row['rel_deviation'] = dev
        rows.append(row)
    return rows


def _check_coincidence(bm: Benchmark) -> List[Dict[str, Any]]:
    cot = bm.bc.cot_theta
    b = bm.potential.support_b
    point = np.array([1j * cot])
    rows = []
    for n in bm.params['modes']:
        p = Potential.square_well(-cot * cot - (n * np.pi / b) ** 2, b)
        F = complex(jost_function(p, bm.bc, point)[0])
        D = complex(make_key_quantity(p, bm.bc)(point)[0])
        rows.append(_row(f'abs_F_n{n}', 0.0, abs(F), RESIDUAL_TOL))
        rows.append(_row(f'abs_D_n{n}', 0.0, abs(D), RESIDUAL_TOL))
    return rows


def _check_gamma(bm: Benchmark) -> List[Dict[str, Any]]:
    a, c = bm.params['a'], bm.params['c']
    p = bm.potential
    rows = []
    grid = np.linspace(0.1, 20.0, 200).astype(complex)
    for label, cot in (('generic', bm.params['generic_cot']), ('double', 1.0 / a)):
        bc = BoundaryCondition.non_dirichlet(cot)
        D = make_key_quantity(p, bc)
        gap = np.abs(D(grid) - delta_key_quantity(grid, a, c, cot)) / np.maximum(1.0, np.abs(D(grid)))
        rows.append(_row(f'closed_form_gap_{label}', 0.0, float(np.max(gap)), CLOSED_FORM_TOL))
        order = zero_order_at(D, 0j, bm.search.origin_radius)
        mult = order // 2
        eigs = [EigenvalueRecord.from_k(0j, mult)] if mult else []
        gamma = hadamard_extract(D, eigs, support_b=p.support_b).gamma
        rows.append(_row(f'gamma_{label}', bm.reference[f'gamma_{label}'], gamma, RESIDUAL_TOL))
        if label == 'double':
            rows.append(_row('lambda0_multiplicity', bm.reference['lambda0_multiplicity'], mult, 0.0))
    return rows


CHECKS: Dict[str, Callable[[Benchmark], List[Dict[str, Any]]]] = {
    'origin': _check_origin,
    'spectrum': _check_spectrum,
    'trend': _check_trend,
    'coincidence': _check_coincidence,
    'gamma': _check_gamma,
}


def _build_catalog() -> Dict[str, Benchmark]:
    delta_a, delta_c = 0.5, 2.0
    lambdas = [6.00966, 30.411, 78.4704, 180.238, 246.74, 717.049]
    lambda_decimals = [5, 3, 4, 3, 2, 3]
    ks = [0.558488, 3.2639, 6.68385, 9.4647, 12.8942]
    k_decimals = [6, 4, 5, 4, 4]
    fixtures = [
        Benchmark(
            id='6.1a',
            description='square well v=1, cot=0: D(0) = sinh 1 and lambda=0 is no eigenvalue',
            potential=Potential.square_well(1.0),
            bc=BoundaryCondition.non_dirichlet(0.0),
            reference={'D0': float(np.sinh(1.0)), 'lambda0_multiplicity': 0},
            check='origin'
        ),
        Benchmark(
            id='6.1b',
            description='square well v=-pi^2, cot=0: lambda=0 is simple',
            potential=Potential.square_well(-np.pi ** 2),
            bc=BoundaryCondition.non_dirichlet(0.0),
            reference={'D0': 0.0, 'lambda0_multiplicity': 1},
            check='origin'
        ),
        Benchmark(
            id='6.1c',
            description='square well with cot=1.88182, v=5.86092: lambda=0 is double',
            potential=Potential.square_well(5.86092),
            bc=BoundaryCondition.non_dirichlet(1.88182),
            reference={'cot_theta': 1.88182, 'v': 5.86092, 'lambda0_multiplicity': 2},
            decimals={'cot_theta': 5, 'v': 5},
            check='origin',
            search=SearchParams(origin_radius=0.05)
        ),
        Benchmark(
            id='6.1d',
            description='square well v=16 pi^2, cot=-2: six positive eigenvalues',
            potential=Potential.square_well(16.0 * np.pi ** 2),
            bc=BoundaryCondition.non_dirichlet(-2.0),
            reference={f'lambda_{i + 1}': lam for i, lam in enumerate(lambdas)},
            decimals={f'lambda_{i + 1}': dec for i, dec in enumerate(lambda_decimals)},
            check='spectrum',
            search=SearchParams(k_max=30.0, beta_max=20.0, quadrant=False)
        ),
        Benchmark(
            id='6.2',
            description='square wells v=-cot^2-n^2 pi^2: F and D vanish at k = i cot',
            potential=Potential.square_well(-1.0 - np.pi ** 2),
            bc=BoundaryCondition.non_dirichlet(1.0),
            reference={},
            check='coincidence',
            params={'modes': (1, 2, 3)}
        ),
        Benchmark(
            id='6.3',
            description='two-step potential with W=0: real zeros and the j^2 pi^2 trend',
            potential=Potential.two_step(1.0),
            bc=BoundaryCondition.non_dirichlet(0.0),
            reference={f'k_{i + 1}': k for i, k in enumerate(ks)},
            decimals={f'k_{i + 1}': dec for i, dec in enumerate(k_decimals)},
            check='trend',
            search=SearchParams(k_max=15.0 * np.pi, beta_max=20.0, quadrant=False)
        ),
        Benchmark(
            id='6.4',
            description='delta spike a=0.5, c=2: gamma in both branches, lambda=0 double at cot=1/a',
            potential=Potential.delta(delta_a, delta_c, 1.0),
            bc=BoundaryCondition.non_dirichlet(0.0),
            reference={
                'gamma_generic': delta_c * (delta_a * 0.0 - 1.0) ** 2,
                'gamma_double': delta_c * delta_a ** 4 / 9.0,
                'lambda0_multiplicity': 2
            },
            check='gamma',
            search=SearchParams(origin_radius=0.1),
            params={'a': delta_a, 'c': delta_c, 'generic_cot': 0.0}
        ),
    ]
    return {bm.id: bm for bm in fixtures}


CATALOG: Dict[str, Benchmark] = _build_catalog()


def get_benchmark(benchmark_id: str) -> Benchmark:
    try:
        return CATALOG[benchmark_id]
    except KeyError:
        raise PotentialValidationError(
            f"unknown example '{benchmark_id}'", details={'available': sorted(CATALOG)}
        ) from None


def run_benchmark(benchmark_id: str) -> BenchmarkReport:
    """
    Run one fixture.

    Args:
        benchmark_id: Catalogue key, e.g. '6.1d'

    Returns:
        BenchmarkReport with one row per compared quantity
    """
    bm = get_benchmark(benchmark_id)
    logger.info(f"Running example {bm.id}: {bm.description}")
    start = time.perf_counter()
    rows = CHECKS[bm.check](bm)
    table = pd.DataFrame(rows, columns=REPORT_COLUMNS)
    rel = table['rel_deviation'][~table['quantity'].str.startswith('trend_')].dropna()
    summary = {
        'id': bm.id,
        'description': bm.description,
        'passed': bool(table['passed'].all()),
        'max_rel_deviation': float(rel.max()) if len(rel) else 0.0,
        'rows': int(len(table))
    }
    logger.info(f"Example {bm.id} {'passed' if summary['passed'] else 'FAILED'} "
                f"in {time.perf_counter() - start:.2f} s")
    return BenchmarkReport(table=table, summary=summary)

"""
Reports for example fixtures and forward-inverse round trips.
"""

import logging
from typing import Any, Dict, Optional

import numpy as np

from ..benchmarks.catalog import BenchmarkReport
from ..forward.key_quantity import make_key_quantity
from ..forward.propagation import jost_function
from ..inverse.pipeline import ReconstructionResult, reconstruction_error
from ..potential.io import potential_to_dict
from ..potential.model import BoundaryCondition, Potential, breakpoints, evaluate_many, moment_W
from .data_collector import ResultCollector

logger = logging.getLogger(__name__)

ROUNDTRIP_L1_LIMIT = 0.05
CHECK_POINTS = 64


class ToolkitReporter:
    """Turns command results into report files and one-line summaries."""

    def __init__(self, collector: ResultCollector, config: Optional[dict] = None):
        """
        Initialize the reporter.

        Args:
            collector: Writer for the report files
            config: The 'output' config section
        """
        self.collector = collector
        self.config = config or {}
        self.l1_limit = float(self.config.get('roundtrip_l1_limit', ROUNDTRIP_L1_LIMIT))

    def benchmark_report(self, report: BenchmarkReport) -> str:
        """Save the reference-vs-computed table; return the stdout summary line."""
        self.collector.save_frame(report.table)
        s = report.summary
        line = (f"example {s['id']}: {'PASS' if s['passed'] else 'FAIL'} "
                f"({s['rows']} checks, max relative deviation {s['max_rel_deviation']:.3g})")
        logger.info(line)
        return line

    def roundtrip_report(
        self,
        p: Potential,
        bc: BoundaryCondition,
        result: ReconstructionResult
    ) -> Dict[str, Any]:
        """
        Compare a reconstruction against the potential it came from.

        Args:
            p: Original potential
            bc: Boundary condition of the forward run
            result: Output of the inverse pipeline

        Returns:
            The saved report dict
        """
        W_exact = moment_W(p)
        report: Dict[str, Any] = {
            'potential': potential_to_dict(p),
            'cot_theta': bc.cot_theta,
            'W_exact': W_exact,
            'W_recovered': result.W,
            'W_error': abs(result.W - W_exact),
            'F0': [result.F0.real, result.F0.imag],
            'bound_states': [{'beta': s.beta, 'm': s.norming_constant} for s in result.bound_states],
            'l1_relative_error': reconstruction_error(result.solution, p),
            'pointwise_error': self.statistical_analysis(result, p),
            'max_condition': float(np.max(result.solution.condition_numbers)),
        }
        if result.jost is not None:
            report.update(self.intermediate_checks(p, bc, result))
        report['l1_limit'] = self.l1_limit
        report['passed'] = bool(report['l1_relative_error'] <= self.l1_limit)
        self.collector.save_json(report)
        logger.info(f"Round trip: relative L1 error {report['l1_relative_error']:.4g}, "
                    f"|W error| {report['W_error']:.3g}")
        return report

    def intermediate_checks(self, p: Potential, bc: BoundaryCondition,
                            result: ReconstructionResult) -> Dict[str, float]:
        """Recovered F against the forward F, and the reflection identity of M."""
        b = p.support_b
        ks = np.linspace(0.1 / b, 20.0 / b, CHECK_POINTS).astype(complex)
        F_forward = jost_function(p, bc, ks)
        F_recovered = result.jost(ks)
        F_error = float(np.max(np.abs(F_recovered - F_forward) / np.abs(F_forward)))

        transform = result.jost.transform
        probe = ks[::4]
        D = make_key_quantity(p, bc)
        reflection = transform.M(probe) + transform.M(-probe) - (2.0 * D(probe) - result.W)
        return {
            'F_relative_error': F_error,
            'reflection_residual': float(np.max(np.abs(reflection)))
        }

    def statistical_analysis(self, result: ReconstructionResult, p: Potential) -> Dict[str, float]:
        """Pointwise |V_rec - V| statistics away from the jumps of V."""
        xs = result.solution.x_grid
        dx = xs[1] - xs[0]
        mask = np.ones(xs.shape, dtype=bool)
        for x_jump in breakpoints(p):
            mask &= np.abs(xs - x_jump) > 2 * dx
        error = np.abs(result.solution.V_recovered - evaluate_many(p, xs))[mask]
        if error.size == 0:
            return {'mean': 0.0, 'max': 0.0, 'std': 0.0}
        return {
            'mean': float(np.mean(error)),
            'max': float(np.max(error)),
            'std': float(np.std(error))
        }

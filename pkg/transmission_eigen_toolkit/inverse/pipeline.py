"""
End-to-end reconstruction of the potential from the datum D and cot(theta).

Stages: probe -> limit_W -> recover_F -> scattering_from_F ->
marchenko_kernel -> solve_marchenko.
"""

import logging
from dataclasses import dataclass
from typing import Any, Callable, Dict, Optional, Tuple

import numpy as np
import pandas as pd

from ..models.exceptions import ToolkitError, UnsupportedInputError
from ..models.records import BoundState, MarchenkoSolution, ScatteringData
from ..potential.model import Potential, breakpoints, evaluate_many
from .cauchy import CauchyTransform
from .datum import DSource, limit_W
from .jost_recovery import RecoveredJost
from .marchenko import default_y_reach, solve_marchenko
from .scattering import MarchenkoKernel, check_reach, scattering_from_F

logger = logging.getLogger(__name__)

DEFAULT_SETTINGS: Dict[str, Any] = {
    'limit_K0_factor': 50.0,
    'limit_levels': 5,
    'limit_tol': 1e-3,
    'cauchy_reach_factor': 400.0,
    'fourier_reach_factor': 200.0,
    'fourier_step': 0.05,
    'beta_max_factor': 20.0,
    'reach_tol': 1e-2,
    'y_reach': None,
    'y_reach_cap_factor': 4.0,
    'nystrom_nodes': 1024,
    'nystrom_rule': 'trapezoid',
    'x_max_factor': 2.0,
    'dx': 0.01,
}


@dataclass(frozen=True, eq=False)
class ReconstructionResult:
    """Recovered potential plus the intermediate quantities of every stage."""

    W: float
    F0: complex
    bound_states: Tuple[BoundState, ...]
    scattering: ScatteringData
    solution: MarchenkoSolution
    kernel_imag_residue: float = 0.0
    jost: Optional[RecoveredJost] = None

    def as_dict(self) -> Dict[str, Any]:
        """The reconstruction JSON layout."""
        return {
            'W': float(self.W),
            'F0': [float(self.F0.real), float(self.F0.imag)],
            'bound_states': [{'beta': s.beta, 'm': s.norming_constant} for s in self.bound_states],
            'V': self.solution.as_dict()
        }

    def diagnostics(self) -> pd.DataFrame:
        """One row per recovered scalar, for the diagnostics CSV."""
        rows = [
            {'quantity': 'W', 'value': self.W},
            {'quantity': 'F0_re', 'value': self.F0.real},
            {'quantity': 'F0_im', 'value': self.F0.imag},
            {'quantity': 'kernel_imag_residue', 'value': self.kernel_imag_residue},
            {'quantity': 'max_condition', 'value': float(np.max(self.solution.condition_numbers))},
        ]
        for i, s in enumerate(self.bound_states):
            rows.append({'quantity': f'beta_{i + 1}', 'value': s.beta})
            rows.append({'quantity': f'm_{i + 1}', 'value': s.norming_constant})
        return pd.DataFrame(rows, columns=['quantity', 'value'])


def _stage(name: str, fn: Callable, *args, **kwargs):
    logger.info(f"Reconstruction stage: {name}")
    try:
        return fn(*args, **kwargs)
    except ToolkitError as e:
        raise e.with_stage(name)


class ReconstructionPipeline:
    """
    Config-driven inverse pipeline.
    """

    def __init__(self, config: Optional[dict] = None):
        """
        Initialize the pipeline.

        Args:
            config: Full toolkit configuration; only the 'inverse' section is read
        """
        self.config = config or {}
        self.settings = {**DEFAULT_SETTINGS, **self.config.get('inverse', {})}

    def run(self, d: DSource, cot_theta: Optional[float]) -> ReconstructionResult:
        """
        Reconstruct the potential.

        Args:
            d: Datum
            cot_theta: Boundary parameter; None (Dirichlet) is rejected

        Returns:
            ReconstructionResult
        """
        if cot_theta is None:
            raise UnsupportedInputError(
                "the inverse pipeline needs a non-Dirichlet boundary condition", stage='reconstruct'
            )
        st = self.settings
        b = d.support_b

        _stage('probe', d.probe)
        W = _stage('limit_W', limit_W, d, st['limit_K0_factor'] / b, int(st['limit_levels']), st['limit_tol'])

        def build_jost():
            transform = CauchyTransform(d, W, st['cauchy_reach_factor'] / b)
            return RecoveredJost(transform, cot_theta)

        jost = _stage('recover_F', build_jost)
        scattering = _stage(
            'scattering_from_F', scattering_from_F, jost, st['fourier_reach_factor'] / b,
            st['fourier_step'], cot_theta, W, b, st['beta_max_factor'] / b
        )

        def build_kernel():
            check_reach(scattering, st['reach_tol'])
            return MarchenkoKernel(scattering)

        kernel = _stage('marchenko_kernel', build_kernel)
        x_grid = np.arange(0.0, st['x_max_factor'] * b + 0.5 * st['dx'], st['dx'])
        y_reach = st['y_reach'] or default_y_reach(
            [s.beta for s in scattering.bound_states], b, st['y_reach_cap_factor']
        )
        residue = kernel.imag_residue(np.linspace(0.0, 2.0 * (x_grid[-1] + y_reach), 64))
        if residue > 1e-8:
            logger.warning(f"Marchenko kernel imaginary residue {residue:.3g}")

        solution = _stage(
            'solve_marchenko', solve_marchenko, kernel, x_grid, y_reach,
            int(st['nystrom_nodes']), st['nystrom_rule']
        )
        logger.info(f"Reconstruction finished: W={W:.8g}, {len(scattering.bound_states)} bound states")
        return ReconstructionResult(
            W=W,
            F0=jost.F0,
            bound_states=scattering.bound_states,
            scattering=scattering,
            solution=solution,
            kernel_imag_residue=residue,
            jost=jost
        )


def reconstruct(d: DSource, cot_theta: Optional[float], cfg: Optional[dict] = None) -> ReconstructionResult:
    """Run the full inverse pipeline with the given configuration."""
    return ReconstructionPipeline(cfg).run(d, cot_theta)


def reconstruction_error(sol: MarchenkoSolution, p: Potential, exclude_cells: int = 2) -> float:
    """
    Relative L1 error of the recovered potential, skipping exclude_cells grid
    cells on each side of every jump of V.
    """
    xs = sol.x_grid
    dx = xs[1] - xs[0]
    exact = evaluate_many(p, xs)
    mask = np.ones(xs.shape, dtype=bool)
    for x_jump in breakpoints(p):
        mask &= np.abs(xs - x_jump) > exclude_cells * dx
    reference = np.sum(np.abs(exact[mask])) * dx
    error = np.sum(np.abs(sol.V_recovered[mask] - exact[mask])) * dx
    if reference == 0.0:
        return float(error)
    return float(error / reference)

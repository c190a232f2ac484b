"""Reconstruction of the potential from the key quantity D and cot(theta)."""

from .datum import DSource, datum_from_dict, limit_W, load_inverse_input
from .cauchy import CauchyTransform, M_eval, Q_eval
from .jost_recovery import RecoveredJost, recover_F
from .scattering import MarchenkoKernel, check_reach, marchenko_kernel, scattering_from_F
from .marchenko import default_y_reach, solve_marchenko
from .pipeline import ReconstructionPipeline, ReconstructionResult, reconstruct, reconstruction_error

__all__ = [
    'DSource', 'datum_from_dict', 'limit_W', 'load_inverse_input',
    'CauchyTransform', 'M_eval', 'Q_eval', 'RecoveredJost', 'recover_F',
    'MarchenkoKernel', 'check_reach', 'marchenko_kernel', 'scattering_from_F',
    'default_y_reach', 'solve_marchenko', 'ReconstructionPipeline',
    'ReconstructionResult', 'reconstruct', 'reconstruction_error',
]

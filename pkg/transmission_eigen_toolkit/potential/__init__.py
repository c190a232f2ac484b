"""Potentials, boundary conditions and their file formats."""

from .model import (
    BoundaryCondition,
    Delta,
    Potential,
    Segment,
    breakpoints,
    evaluate,
    evaluate_many,
    moment_W,
    potential_l1_norm,
    validate,
)
from .io import (
    boundary_from_dict,
    boundary_to_dict,
    load_potential,
    potential_from_dict,
    potential_to_dict,
    save_potential,
)

__all__ = [
    'BoundaryCondition', 'Delta', 'Potential', 'Segment', 'breakpoints',
    'evaluate', 'evaluate_many', 'moment_W', 'potential_l1_norm', 'validate',
    'boundary_from_dict', 'boundary_to_dict', 'load_potential',
    'potential_from_dict', 'potential_to_dict', 'save_potential',
]

"""Transmission eigenvalues, bound states, Hadamard data and auxiliary spectra."""

from .contour import count_zeros_disk, count_zeros_rect, multiplicity_at, zero_order_at
from .eigenvalues import (
    full_zero_set,
    records_to_frame,
    theorem_checks,
    transmission_eigenvalues,
    write_eigenvalues,
)
from .hadamard import (
    hadamard_eval,
    hadamard_extract,
    hadamard_from_dict,
    hadamard_to_dict,
    save_hadamard,
)
from .bound_states import bound_states, norming_constant_direct
from .auxiliary import aux_spectra, check_interlacing

__all__ = [
    'count_zeros_disk', 'count_zeros_rect', 'multiplicity_at', 'zero_order_at',
    'full_zero_set', 'records_to_frame', 'theorem_checks',
    'transmission_eigenvalues', 'write_eigenvalues', 'hadamard_eval',
    'hadamard_extract', 'hadamard_from_dict', 'hadamard_to_dict',
    'save_hadamard', 'bound_states', 'norming_constant_direct', 'aux_spectra',
    'check_interlacing',
]

"""Forward problem: Jost and regular solutions, D(k) and S(k)."""

from .propagation import (
    jost_at_origin,
    jost_data,
    jost_function,
    jost_profile,
    regular_solution,
    free_regular_solution,
)
from .key_quantity import (
    D_determinant,
    D_eval,
    D_factorized,
    asymptotics_check,
    free_jost_function,
    free_scattering_matrix,
    key_quantity_from_jost,
    make_key_quantity,
    scattering_matrix,
)
from .oracle import jost_series_oracle

__all__ = [
    'jost_at_origin', 'jost_data', 'jost_function', 'jost_profile',
    'regular_solution', 'free_regular_solution', 'D_determinant', 'D_eval',
    'D_factorized', 'asymptotics_check', 'free_jost_function',
    'free_scattering_matrix', 'key_quantity_from_jost', 'make_key_quantity',
    'scattering_matrix', 'jost_series_oracle',
]

"""Population-inversion dynamics."""

from .core import (
    BACKENDS,
    HO_CLOSED_FORM,
    QUADRATURE,
    SERIES,
    Backend,
    InversionSolution,
    NuOperators,
    ParticularResult,
    build_nu,
    expanded_y1F11,
    expanded_z1F11,
    forcing_matrix,
    forcing_matrix_rewritten,
    homogeneous_solution,
    inversion_expectation,
    particular_solution,
    sigma3_of_t,
    solve_inversion,
)
from .kernels import (
    KINDS,
    SeriesValue,
    aux_G,
    kernel_C,
    kernel_C_rational,
    kernel_S,
    kernel_S_rational,
    series_FXY,
)

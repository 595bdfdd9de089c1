"""Generalized intensity-dependent Jaynes-Cummings dynamics on shape-invariant ladders."""

from . import errors
from .algebra import (
    JCParams,
    LadderSpectrum,
    OperatorBundle,
    ShapeInvariantModel,
    basis_state,
    block_indices,
    build_operators,
    build_spectrum,
    interior_indices,
    sigma_matrices,
    spectral_function,
)
from .evolution import (
    EvolutionMatrix,
    FrequencyOperators,
    build_frequencies,
    evolution_matrix,
    fidelity_vs_oracle,
    resonant_evolution,
    unitarity_defect,
)
from .inversion import (
    Backend,
    InversionSolution,
    NuOperators,
    aux_G,
    build_nu,
    forcing_matrix,
    inversion_expectation,
    particular_solution,
    series_FXY,
    sigma3_of_t,
    solve_inversion,
)
from .oracle import (
    ComparisonReport,
    compare,
    exact_propagator,
    heisenberg_sigma3,
    integrate_matrix_function,
)
from .spectrum import (
    DressedPair,
    HOLimitData,
    dressed_coefficients,
    dressed_eigenvalues,
    dressed_pair,
    dressed_state,
    ground_singlet,
    ho_limit_eigensystem,
    interaction_eigenvalues,
)

__version__ = "0.1.0"

"""Correlation- and entanglement-induced geometric phases of two-qubit states."""

from .errors import ContractViolation, DomainError, InvariantBreach, ParseError, UndefinedPhaseError
from .geophase import (
    BlochLoop,
    GeometricPhaseResult,
    PhaseDistribution,
    base_loop_phase,
    correlation_induced_phase,
    entanglement_induced_phase,
    first_moment_phase,
    loop_constant_latitude,
    mems_gamma_analytic,
    phase_distribution,
    pure_relative_phase,
)
from .states import (
    concurrence,
    density_matrix,
    entanglement_of_formation,
    mems_spectral,
    mems_state,
    parse_density_matrix,
    spectral_decomposition,
)
from .wootters import intermediate_decomposition, mems_optimal_decomposition, optimal_decomposition

__version__ = "0.1.0"

"""Effective Hamiltonians and factorizations for linear quantum-optical networks."""

from .blochmessiah import (
    DegeneracyUnresolvedError,
    FactorizationG,
    FactorizationG0,
    InvariantViolationError,
    factorize_g,
    factorize_g0,
    reconstruct,
)
from .core import (
    DEFAULT_TOL,
    Generator,
    InvalidMatrixError,
    NotQuasiUnitaryError,
    ScatteringMatrix,
    ValidationReport,
    compose,
    direct_sum,
    inverse_scattering,
    metric,
    random_generator,
    validate_generator,
    validate_scattering,
)
from .hamiltonian import (
    HamiltonianMatrix,
    effective_hamiltonian,
    generator_from_hamiltonian,
    scattering_at_time,
)
from .logm import LogResult, eig_log, expm, hamiltonian_log, jordan_log

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_TOL", "DegeneracyUnresolvedError", "FactorizationG", "FactorizationG0",
    "Generator", "HamiltonianMatrix", "InvalidMatrixError", "InvariantViolationError",
    "LogResult", "NotQuasiUnitaryError", "ScatteringMatrix", "ValidationReport",
    "compose", "direct_sum", "effective_hamiltonian", "eig_log", "expm", "factorize_g",
    "factorize_g0", "generator_from_hamiltonian", "hamiltonian_log", "inverse_scattering",
    "jordan_log", "metric", "random_generator", "reconstruct", "scattering_at_time",
    "validate_generator", "validate_scattering",
]

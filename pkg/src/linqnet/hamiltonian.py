"""Effective Hamiltonian coefficient matrices ``H = -i G K`` and the fictitious-time flow."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import (
    DEFAULT_TOL,
    Generator,
    ScatteringMatrix,
    as_complex_matrix,
    fro,
    metric,
)
from .logm import expm


class LieConditionError(ValueError):
    def __init__(self, residual: float):
        self.residual = residual
        super().__init__(f"generator fails K G + G K^+ = 0 (residual {residual:.3e})")


class NotHermitianError(ValueError):
    pass


@dataclass(frozen=True)
class HamiltonianMatrix:
    """
    Hermitian 2n x 2n coefficient matrix of the quadratic form
    ``1/2 (a^+, a) H (a; a^+)``, with hbar = 1.
    """

    matrix: np.ndarray
    tol: float = DEFAULT_TOL
    n: int = field(init=False)

    def __post_init__(self):
        H = as_complex_matrix(self.matrix)
        if H.shape[0] != H.shape[1] or H.shape[0] % 2:
            raise ValueError(f"Hamiltonian matrix must be 2n x 2n, got {H.shape}")
        herm = fro(H - H.conj().T)
        if herm > self.tol * max(1.0, fro(H)):
            raise NotHermitianError(f"H - H^+ has Frobenius norm {herm:.3e}")
        H = np.array(H)
        H.setflags(write=False)
        object.__setattr__(self, "matrix", H)
        object.__setattr__(self, "n", H.shape[0] // 2)

    @property
    def hermiticity_residual(self) -> float:
        return fro(self.matrix - self.matrix.conj().T)


def _as_generator(K) -> Generator:
    return K if isinstance(K, Generator) else Generator(K)


def effective_hamiltonian(K: Generator) -> HamiltonianMatrix:
    """
    Coefficient matrix ``H = -i G K`` of the effective Hamiltonian.

    Raises
    ------
    LieConditionError
        if ``K`` is not in the quasi-unitary algebra; H would not be Hermitian.
    """
    K = _as_generator(K)
    if not K.is_valid:
        from .core import lie_residual
        raise LieConditionError(lie_residual(K.matrix))
    G = metric(K.n)
    return HamiltonianMatrix(-1j * G @ K.matrix, tol=K.tol)


def generator_from_hamiltonian(H: HamiltonianMatrix) -> Generator:
    """Invert ``H = -i G K`` using ``G^2 = 1``: ``K = i G H``."""
    if not isinstance(H, HamiltonianMatrix):
        H = HamiltonianMatrix(H)
    G = metric(H.n)
    return Generator(1j * G @ H.matrix, tol=H.tol)


def scattering_at_time(K: Generator, tau: float) -> ScatteringMatrix:
    """Classical matrix ``expm(tau K)`` reached after fictitious time ``tau``."""
    K = _as_generator(K)
    if not np.isfinite(tau):
        raise ValueError("tau must be finite")
    group = "G" if K.form_class == "L" else "G0"
    return ScatteringMatrix(expm(tau * K.matrix), tol=max(K.tol, 1e-9), group=group)

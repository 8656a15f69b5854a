"""
Truncated Fock-space realization of the effective Hamiltonian.

Each mode keeps photon numbers ``0 .. cutoff``; the multimode space is the
tensor product with mode 0 as the slowest-varying index.  Operators are dense.

Heisenberg relation checked here: for ``S_hat = expm(-i H_hat)`` with
``H = -i G K``, conjugation ``S_hat v S_hat^+`` maps the operator vector
``v = (a; a^+)`` to ``expm(K) v``.  The adjoint conjugation
``S_hat^+ v S_hat`` gives ``expm(-K) v`` and is reported alongside as
``adjoint_residual``.  With this convention the operator of a product
``expm(K1) ... expm(Km)`` is ``S_hat_Km ... S_hat_K1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.linalg

from .core import Generator, fro
from .hamiltonian import HamiltonianMatrix, effective_hamiltonian

DEFAULT_BUDGET = 4096


class BudgetExceededError(ValueError):
    pass


class GuardBandError(ValueError):
    pass


@dataclass(frozen=True)
class FockSpace:
    n: int
    cutoff: int
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        if self.n < 1 or self.cutoff < 1:
            raise ValueError("need n >= 1 and cutoff >= 1")
        if self.dim > self.budget:
            raise BudgetExceededError(
                f"dimension {self.dim} = ({self.cutoff}+1)^{self.n} exceeds budget {self.budget}")

    @property
    def dim(self) -> int:
        return (self.cutoff + 1) ** self.n

    @cached_property
    def occupations(self) -> np.ndarray:
        """(dim, n) array of photon numbers per basis state."""
        grids = np.indices((self.cutoff + 1,) * self.n).reshape(self.n, -1)
        return grids.T

    @cached_property
    def total_photons(self) -> np.ndarray:
        return self.occupations.sum(axis=1)

    def index(self, *occ: int) -> int:
        """Basis index of the state with the given photon numbers."""
        idx = 0
        for m in occ:
            idx = idx * (self.cutoff + 1) + m
        return idx


@dataclass(frozen=True)
class FockOperator:
    space: FockSpace
    matrix: np.ndarray

    def __post_init__(self):
        if self.matrix.shape != (self.space.dim, self.space.dim):
            raise ValueError("operator shape does not match the space")

    def __matmul__(self, other: "FockOperator") -> "FockOperator":
        return FockOperator(self.space, self.matrix @ other.matrix)

    @property
    def dag(self) -> "FockOperator":
        return FockOperator(self.space, self.matrix.conj().T)


def annihilation_op(space: FockSpace, mode: int) -> FockOperator:
    """Ladder operator with sqrt(m) on the superdiagonal of factor ``mode``."""
    if not 0 <= mode < space.n:
        raise IndexError(f"mode {mode} out of range for {space.n} modes")
    d = space.cutoff + 1
    a = np.diag(np.sqrt(np.arange(1, d)), 1).astype(np.complex128)
    out = np.ones((1, 1), dtype=np.complex128)
    for k in range(space.n):
        out = np.kron(out, a if k == mode else np.eye(d))
    return FockOperator(space, out)


def number_op(space: FockSpace) -> FockOperator:
    return FockOperator(space, np.diag(space.total_photons).astype(np.complex128))


def _mode_vector(space: FockSpace) -> list[np.ndarray]:
    """Operators (a_1 .. a_n, a_1^+ .. a_n^+) as dense matrices."""
    ann = [annihilation_op(space, k).matrix for k in range(space.n)]
    return ann + [a.conj().T for a in ann]


def hamiltonian_operator(H: HamiltonianMatrix, space: FockSpace) -> FockOperator:
    """
    ``1/2 (a^+, a) H (a; a^+)`` expanded term by term without reordering.

    The a_j a_k^+ products are kept as written, so no constant is dropped
    or added relative to the symmetric form.
    """
    if not isinstance(H, HamiltonianMatrix):
        H = HamiltonianMatrix(H)
    if H.n != space.n:
        raise ValueError(f"Hamiltonian has {H.n} modes, space has {space.n}")
    v = _mode_vector(space)
    row = [op.conj().T for op in v]  # (a^+, a)
    out = np.zeros((space.dim, space.dim), dtype=np.complex128)
    Hm = H.matrix
    for i in range(2 * space.n):
        for j in range(2 * space.n):
            if Hm[i, j] != 0:
                out += Hm[i, j] * (row[i] @ v[j])
    return FockOperator(space, out / 2)


def scattering_operator(K: Generator, space: FockSpace) -> FockOperator:
    """``expm(-i H_hat)`` for ``H = -i G K``."""
    H = effective_hamiltonian(K)
    Hop = hamiltonian_operator(H, space).matrix
    return FockOperator(space, scipy.linalg.expm(-1j * Hop))


def product_operator(Ks, space: FockSpace) -> FockOperator:
    """
    Operator realizing ``expm(K1) expm(K2) ... expm(Km)``.

    The factors are applied in reverse: ``S_hat_Km ... S_hat_K1``, i.e. the
    operator of the last matrix factor ``Km`` sits leftmost.
    """
    out = np.eye(space.dim, dtype=np.complex128)
    for K in Ks:
        out = scattering_operator(K, space).matrix @ out
    return FockOperator(space, out)


def forward_product_operator(Ks, space: FockSpace) -> FockOperator:
    """``S_hat_K1 ... S_hat_Km``; the wrong order, kept for ordering checks."""
    return product_operator(list(Ks)[::-1], space)


@dataclass(frozen=True)
class HeisenbergReport:
    residual: float
    adjoint_residual: float
    max_photons: int
    cutoff: int

    def to_dict(self) -> dict:
        return {
            "residual": self.residual,
            "adjoint_residual": self.adjoint_residual,
            "max_photons": self.max_photons,
            "cutoff": self.cutoff,
        }


def heisenberg_residual(S, U: FockOperator, max_photons: int) -> HeisenbergReport:
    """
    Compare ``S v`` with ``U v U^+`` on states with at most ``max_photons`` photons.

    ``S`` is the classical 2n x 2n matrix and ``U`` the scattering operator.
    """
    space = U.space
    if max_photons > space.cutoff - 2:
        raise GuardBandError(
            f"max_photons={max_photons} leaves no 2-photon guard band below cutoff {space.cutoff}")
    S = np.asarray(S, dtype=np.complex128)
    v = _mode_vector(space)
    keep = np.flatnonzero(space.total_photons <= max_photons)
    sub = np.ix_(keep, keep)
    Um = U.matrix
    worst = worst_adj = 0.0
    for i in range(2 * space.n):
        lhs = sum(S[i, j] * v[j] for j in range(2 * space.n))
        rhs = Um @ v[i] @ Um.conj().T
        adj = Um.conj().T @ v[i] @ Um
        worst = max(worst, float(np.max(np.abs((lhs - rhs)[sub]))))
        worst_adj = max(worst_adj, float(np.max(np.abs((lhs - adj)[sub]))))
    return HeisenbergReport(worst, worst_adj, max_photons, space.cutoff)


def heisenberg_check(K: Generator, space: FockSpace, max_photons: int) -> HeisenbergReport:
    """Heisenberg residual of ``scattering_operator(K)`` against ``expm(K)``."""
    if not isinstance(K, Generator):
        K = Generator(K)
    if max_photons > space.cutoff - 2:
        raise GuardBandError(
            f"max_photons={max_photons} leaves no 2-photon guard band below cutoff {space.cutoff}")
    S = scipy.linalg.expm(np.asarray(K.matrix))
    return heisenberg_residual(S, scattering_operator(K, space), max_photons)


def unitarity_residual(U: FockOperator, max_photons: int) -> float:
    """``||(U^+ U - 1) P||_F`` with P projecting onto at most ``max_photons`` photons."""
    space = U.space
    keep = np.flatnonzero(space.total_photons <= max_photons)
    dev = U.matrix.conj().T @ U.matrix - np.eye(space.dim)
    return fro(dev[:, keep])


def convergence_study(K: Generator, n: int, max_photons: int, cutoffs, budget: int = DEFAULT_BUDGET):
    """Heisenberg residuals over increasing cutoffs (active networks have no exact truncation)."""
    out = []
    for c in cutoffs:
        space = FockSpace(n, c, budget)
        out.append((c, heisenberg_check(K, space, max_photons).residual))
    return out

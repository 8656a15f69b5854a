"""
Three-factor decomposition: passive x real squeezing x passive.

Every quasi-unitary ``S`` splits as::

    S = diag(U1, U2) [[C, S], [S, C]] diag(V1^+, V2^+),   C = sqrt(1 + S^2)

with unitary ``U1, U2, V1, V2`` obtained from the singular value
decomposition of the off-diagonal block ``S12``.  For structured
(block-conjugate) input the outer factors become ``diag(U, conj U)`` and the
middle factor ``expm([[0, D], [D, 0]])`` with real diagonal ``D``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .core import (
    DEFAULT_TOL,
    Generator,
    ScatteringMatrix,
    blocks,
    fro,
    random_generator,
)
from .logm import expm

RECONSTRUCTION_TOL = 1e-8
DEGENERACY_TOL = 1e-7
EPSILON_LADDER = (1e-7, 1e-9, 1e-11)
UNITARY_TOL = 1e-8
_PERTURBATION_SEED = 12345


class InvariantViolationError(ValueError):
    """The input is not quasi-unitary to working precision."""


class DegeneracyUnresolvedError(ArithmeticError):
    def __init__(self, best_residual: float):
        self.best_residual = best_residual
        super().__init__(f"degenerate singular values not resolved (best residual {best_residual:.3e})")


def unitary_log(U, tol: float = UNITARY_TOL) -> np.ndarray:
    """
    Antihermitian ``K = i Q Phi Q^+`` with ``expm(K) = U``.

    The complex Schur form of a unitary matrix is diagonal, which gives the
    spectral factorization directly; phases are taken in (-pi, pi].

    Parameters
    ----------
    U : array_like
        unitary matrix
    tol : float
        allowed ``||U U^+ - 1||_F``

    Returns
    -------
    array(complex)
        antihermitian logarithm
    """
    U = np.asarray(U, dtype=np.complex128)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {U.shape}")
    dev = fro(U @ U.conj().T - np.eye(U.shape[0]))
    if dev > tol:
        raise ValueError(f"matrix is not unitary (||U U^+ - 1||_F = {dev:.3e})")
    T, Z = scipy.linalg.schur(U, output="complex")
    phases = np.angle(np.diag(T))
    phases[phases <= -np.pi + 1e-15] = np.pi
    K = (Z * (1j * phases)) @ Z.conj().T
    return (K - K.conj().T) / 2


def _block_diag(X, Y):
    return scipy.linalg.block_diag(X, Y)


@dataclass(frozen=True)
class FactorizationG0:
    """``S = expm(K1) expm(K2) expm(K3)`` with block-diagonal K1, K3 and K2 = [[0, D], [D, 0]]."""

    K1: Generator
    K2: Generator
    K3: Generator
    D: np.ndarray
    reconstruction_residual: float
    certificates: dict = field(default_factory=dict)
    variant: str = "g0"

    @property
    def factors(self) -> tuple[Generator, Generator, Generator]:
        return (self.K1, self.K2, self.K3)


@dataclass(frozen=True)
class FactorizationG:
    """
    Structured factorization: K1 = diag(A1, conj A1), K3 = diag(A3, conj A3),
    K2 = [[0, D], [D, 0]] with real diagonal D and sign matrix Q.
    """

    K1: Generator
    K2: Generator
    K3: Generator
    D: np.ndarray
    Q: np.ndarray
    reconstruction_residual: float
    resolution: str = "distinct"
    certificates: dict = field(default_factory=dict)
    variant: str = "g"

    @property
    def factors(self) -> tuple[Generator, Generator, Generator]:
        return (self.K1, self.K2, self.K3)


@dataclass
class _SVDStage:
    U1: np.ndarray
    U2: np.ndarray
    V1: np.ndarray
    V2: np.ndarray
    s: np.ndarray
    C: np.ndarray
    certificates: dict


def _fix_phases(U1, V2):
    """Make the first non-negligible entry of each left singular vector real positive."""
    U1, V2 = U1.copy(), V2.copy()
    for k in range(U1.shape[1]):
        col = U1[:, k]
        j = int(np.argmax(np.abs(col) > 1e-12 * np.max(np.abs(col))))
        p = np.conj(col[j]) / abs(col[j])
        U1[:, k] *= p
        V2[:, k] *= p
    return U1, V2


def _svd_stage(M: np.ndarray) -> _SVDStage:
    S11, S12, S21, S22 = blocks(M)
    n = S11.shape[0]
    smin11 = np.linalg.svd(S11, compute_uv=False)[-1]
    # ||S11^+ x||^2 = ||S12^+ x||^2 + ||x||^2 forces sigma_min(S11) >= 1
    if smin11 < 0.5:
        raise InvariantViolationError(
            f"S11 is numerically singular (sigma_min {smin11:.3e}); input is not quasi-unitary")
    U1, s, V2h = np.linalg.svd(S12)
    U1, V2 = _fix_phases(U1, V2h.conj().T)
    C = np.sqrt(s**2 + 1.0)
    V1 = np.linalg.solve(S11, U1 * C)
    U2 = (S22 @ V2) / C
    I = np.eye(n)
    certificates = {
        "V1_unitarity": fro(V1.conj().T @ V1 - I),
        "U2_unitarity": fro(U2.conj().T @ U2 - I),
        "S21_residual": fro(S21 - (U2 * s) @ V1.conj().T),
        "C2_minus_S2": float(np.max(np.abs(C**2 - s**2 - 1.0))),
    }
    return _SVDStage(U1, U2, V1, V2, s, C, certificates)


def _as_g0(S) -> ScatteringMatrix:
    if isinstance(S, ScatteringMatrix):
        return S
    return ScatteringMatrix(S, group="G0")


def factorize_g0(S) -> FactorizationG0:
    """
    Decompose any quasi-unitary S (block-conjugate layout not required).

    Raises
    ------
    InvariantViolationError
        if ``S11`` is numerically singular, which cannot happen for a
        quasi-unitary input.
    """
    S = _as_g0(S)
    st = _svd_stage(S.matrix)
    n = S.n
    K1 = _block_diag(unitary_log(st.U1), unitary_log(st.U2))
    K3 = _block_diag(unitary_log(st.V1.conj().T), unitary_log(st.V2.conj().T))
    D = np.log(st.C + st.s)
    K2 = np.zeros((2 * n, 2 * n), dtype=np.complex128)
    K2[:n, n:] = np.diag(D)
    K2[n:, :n] = np.diag(D)
    gens = tuple(Generator(K) for K in (K1, K2, K3))
    resid = fro(expm(K1) @ expm(K2) @ expm(K3) - S.matrix)
    return FactorizationG0(*gens, D=D, reconstruction_residual=resid, certificates=st.certificates)


def singular_clusters(s: np.ndarray, threshold: float) -> list[list[int]]:
    """Groups of consecutive (descending) singular values closer than ``threshold``."""
    groups: list[list[int]] = []
    for j, v in enumerate(s):
        if groups and abs(s[groups[-1][-1]] - v) <= threshold:
            groups[-1].append(j)
        else:
            groups.append([j])
    return groups


def _balance(U1, V1, S12, s, groups, zero_cut):
    """
    Rephase U1 -> U1 Phi, V1 -> V1 Phi within each cluster so that
    ``U1^+ S12 conj(V1)`` becomes the real diagonal of singular values.

    On a cluster the block is ``s * W`` with W symmetric unitary; the
    principal square root ``Phi`` of W is symmetric, so ``W = Phi Phi^T``.
    """
    U1, V1 = U1.copy(), V1.copy()
    M = U1.conj().T @ S12 @ V1.conj()
    for g in groups:
        sc = float(np.mean(s[g]))
        if sc <= zero_cut:
            continue
        W = M[np.ix_(g, g)] / sc
        W = (W + W.T) / 2
        if len(g) == 1:
            q = W[0, 0]
            Phi = np.array([[np.sqrt(q / abs(q))]])
        else:
            Phi = expm(unitary_log(W, tol=1e-6) / 2)
        U1[:, g] = U1[:, g] @ Phi
        V1[:, g] = V1[:, g] @ Phi
    return U1, V1


def _assemble_g(M: np.ndarray, U1: np.ndarray, V1: np.ndarray, s: np.ndarray, C: np.ndarray):
    n = U1.shape[0]
    _, S12, _, _ = blocks(M)
    # sign fit: after balancing, U1^+ S12 conj(V1) = Q S with Q = +-1
    Q = np.sign(np.real(np.diag(U1.conj().T @ S12 @ V1.conj())))
    Q[Q == 0] = 1.0
    D = Q * np.log(C + s)
    A1 = unitary_log(U1)
    A3 = unitary_log(V1.conj().T)
    K1 = _block_diag(A1, A1.conj())
    K3 = _block_diag(A3, A3.conj())
    K2 = np.zeros((2 * n, 2 * n), dtype=np.complex128)
    K2[:n, n:] = np.diag(D)
    K2[n:, :n] = np.diag(D)
    rel36 = fro(S12 - (U1 * (Q * s)) @ V1.T)
    return K1, K2, K3, D, Q, rel36


def _reconstruct_arrays(K1, K2, K3, D=None):
    n = K1.shape[0] // 2
    E1 = expm(K1[:n, :n])
    E3 = expm(K3[:n, :n])
    if D is None:
        return expm(K1) @ expm(K2) @ expm(K3)
    mid = np.block([[np.diag(np.cosh(D)), np.diag(np.sinh(D))],
                    [np.diag(np.sinh(D)), np.diag(np.cosh(D))]])
    return _block_diag(E1, E1.conj()) @ mid @ _block_diag(E3, E3.conj())


def _factor_distinct(M, zero_cut):
    st = _svd_stage(M)
    _, S12, _, _ = blocks(M)
    groups = [[j] for j in range(len(st.s))]
    U1, V1 = _balance(st.U1, st.V1, S12, st.s, groups, zero_cut)
    return U1, _assemble_g(M, U1, V1, st.s, st.C)


def _limit_factor(M, st, groups, U1_pert, zero_cut):
    """
    Factor the unperturbed M in the singular basis selected by a perturbation.

    Inside each degenerate cluster the perturbed left singular vectors are
    projected onto the exact singular subspace of M and re-orthonormalized;
    this is the eps -> 0 limit of the perturbed factorizations.
    """
    S11, S12, _, _ = blocks(M)
    U1 = st.U1.copy()
    for g in groups:
        if len(g) < 2:
            continue
        Uc = st.U1[:, g]
        u, _, vh = np.linalg.svd(Uc.conj().T @ U1_pert[:, g])
        U1[:, g] = Uc @ (u @ vh)
    V1 = np.linalg.solve(S11, U1 * st.C)
    U1, V1 = _balance(U1, V1, S12, st.s, groups, zero_cut)
    return _assemble_g(M, U1, V1, st.s, st.C)


def factorize_g(S) -> FactorizationG:
    """
    Structured decomposition with all three factors in the physical algebra.

    With distinct singular values of ``S12`` the singular vectors are fixed up
    to phases, and the phases are balanced so that the middle factor is real.

    Degenerate singular values (consecutive values within
    ``DEGENERACY_TOL * ||S||_F``) leave a unitary freedom inside each
    degenerate subspace.  ``S`` is then moved inside the group by
    ``expm(eps ||S|| Kp)`` for a fixed generator ``Kp``, which splits the
    degeneracy and picks a basis; that basis is carried back to the
    unperturbed subspaces and the factors of the ORIGINAL ``S`` are
    certified.  Smaller ``eps`` is tried when certification fails.

    Raises
    ------
    DegeneracyUnresolvedError
        if no rung of the ladder reconstructs S within tolerance.
    """
    S = S if isinstance(S, ScatteringMatrix) else ScatteringMatrix(S)
    if S.group != "G":
        raise ValueError("factorize_g needs the block-conjugate layout; use factorize_g0")
    M = S.matrix
    norm = fro(M)
    limit = RECONSTRUCTION_TOL * max(1.0, norm)
    zero_cut = 1e-14 * max(1.0, norm)

    st = _svd_stage(M)
    groups = singular_clusters(st.s, DEGENERACY_TOL * norm)
    degenerate = any(len(g) > 1 and st.s[g[0]] > zero_cut for g in groups)

    def certify(parts, resolution, extra):
        K1, K2, K3, D, Q, rel = parts
        resid = fro(_reconstruct_arrays(K1, K2, K3, D) - M)
        cert = dict(st.certificates)
        cert["sign_relation_residual"] = rel
        cert.update(extra)
        return FactorizationG(Generator(K1), Generator(K2), Generator(K3), D=D, Q=Q,
                              reconstruction_residual=resid, resolution=resolution,
                              certificates=cert)

    if not degenerate:
        _, parts = _factor_distinct(M, zero_cut)
        out = certify(parts, "distinct", {})
        if out.reconstruction_residual <= limit:
            return out
        raise DegeneracyUnresolvedError(out.reconstruction_residual)

    Kp = random_generator(S.n, 1.0, rng=_PERTURBATION_SEED)
    best = np.inf
    for eps in EPSILON_LADDER:
        Mp = M @ expm(eps * norm * Kp)
        try:
            U1_pert, _ = _factor_distinct(Mp, zero_cut)
            parts = _limit_factor(M, st, groups, U1_pert, zero_cut)
        except (ValueError, np.linalg.LinAlgError):
            continue
        out = certify(parts, f"perturbation eps={eps:g}", {"epsilon": eps})
        best = min(best, out.reconstruction_residual)
        if out.reconstruction_residual <= limit:
            return out
    raise DegeneracyUnresolvedError(best)


def reconstruct(f: FactorizationG0 | FactorizationG) -> ScatteringMatrix:
    """Product ``expm(K1) expm(K2) expm(K3)``; the structured middle factor uses cosh/sinh."""
    K1, K2, K3 = (np.array(k.matrix) for k in f.factors)
    if isinstance(f, FactorizationG):
        return ScatteringMatrix(_reconstruct_arrays(K1, K2, K3, np.asarray(f.D)), tol=1e-9)
    return ScatteringMatrix(_reconstruct_arrays(K1, K2, K3), tol=1e-9, group="G0")


def middle_factor(D) -> np.ndarray:
    """Closed form of ``expm([[0, D], [D, 0]])`` for real diagonal D."""
    D = np.asarray(D, dtype=float)
    ch, sh = np.diag(np.cosh(D)), np.diag(np.sinh(D))
    return np.block([[ch, sh], [sh, ch]]).astype(np.complex128)


__all__ = [
    "DEFAULT_TOL", "DegeneracyUnresolvedError", "FactorizationG", "FactorizationG0",
    "InvariantViolationError", "factorize_g", "factorize_g0", "middle_factor",
    "reconstruct", "singular_clusters", "unitary_log",
]

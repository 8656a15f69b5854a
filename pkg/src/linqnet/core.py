"""
Quasi-unitary matrices and their Lie algebra.

Basis ordering is fixed throughout the package: for an ``n``-mode network the
first ``n`` components of the operator vector are the annihilators
``a_1 .. a_n`` and the last ``n`` are the creators ``a_1^+ .. a_n^+``.  A
scattering matrix therefore has the block layout::

    S = [[A,       B      ],
         [conj(B), conj(A)]]

and the metric is ``G = diag(1_n, -1_n)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

DEFAULT_TOL = 1e-10

FormClass = Literal["L", "L0", "none"]
Group = Literal["G", "G0"]


class InvalidMatrixError(ValueError):
    """Malformed input: wrong rank, empty, or non-finite entries."""


class NotQuasiUnitaryError(ValueError):
    """Raised when a matrix fails the scattering-matrix invariants."""

    def __init__(self, report: "ValidationReport"):
        self.report = report
        super().__init__(f"not a valid scattering matrix: {report.summary()}")


def as_complex_matrix(M) -> np.ndarray:
    """Coerce ``M`` to a finite 2-D complex128 array."""
    arr = np.array(M, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InvalidMatrixError(f"expected a non-empty 2-D matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidMatrixError("matrix contains NaN or Inf entries")
    return arr


def fro(M: np.ndarray) -> float:
    return float(np.linalg.norm(M, "fro"))


def metric(n: int) -> np.ndarray:
    """
    Commutator metric ``G = diag(1_n, -1_n)``.

    Parameters
    ----------
    n : int
        number of modes

    Returns
    -------
    array(complex)
        the 2n x 2n metric
    """
    if int(n) != n or n < 1:
        raise ValueError(f"mode count must be a positive integer, got {n}")
    n = int(n)
    return np.diag(np.concatenate([np.ones(n), -np.ones(n)])).astype(np.complex128)


def blocks(M: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Split a 2n x 2n matrix into its four n x n blocks."""
    n = M.shape[0] // 2
    return M[:n, :n], M[:n, n:], M[n:, :n], M[n:, n:]


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=np.complex128, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ValidationReport:
    """Diagnostics from :func:`validate_scattering` or :func:`validate_generator`."""

    passed: bool
    n: int
    residuals: dict[str, float]
    thresholds: dict[str, float]
    flags: tuple[str, ...] = ()
    form_class: FormClass | None = None

    def summary(self) -> str:
        parts = [f"{k}={v:.3e} (<= {self.thresholds.get(k, float('nan')):.1e})"
                 for k, v in self.residuals.items()]
        if self.flags:
            parts.append("flags=" + ",".join(self.flags))
        return "; ".join(parts)

    def to_dict(self) -> dict:
        out = {
            "passed": self.passed,
            "n": self.n,
            "residuals": dict(self.residuals),
            "thresholds": dict(self.thresholds),
            "flags": list(self.flags),
        }
        if self.form_class is not None:
            out["form_class"] = self.form_class
        return out


def _dimension(M: np.ndarray) -> int:
    rows, cols = M.shape
    if rows != cols or rows % 2:
        return 0
    return rows // 2


def block_residual(M: np.ndarray) -> float:
    """Deviation from the ``[[A, B], [conj B, conj A]]`` layout."""
    A, B, Bt, At = blocks(M)
    return float(np.hypot(fro(Bt - B.conj()), fro(At - A.conj())))


def quasi_unitarity_residual(M: np.ndarray) -> float:
    G = metric(M.shape[0] // 2)
    return fro(M @ G @ M.conj().T - G)


def lie_residual(K: np.ndarray) -> float:
    G = metric(K.shape[0] // 2)
    return fro(K @ G + G @ K.conj().T)


def form_residual(K: np.ndarray) -> float:
    """Deviation of ``K`` from ``[[A, D], [conj D, conj A]]`` with A antihermitian, D symmetric."""
    A, D, Dt, At = blocks(K)
    return float(np.linalg.norm([
        fro(A + A.conj().T),
        fro(D - D.T),
        fro(Dt - D.conj()),
        fro(At - A.conj()),
    ]))


def validate_scattering(M, tol: float = DEFAULT_TOL, structured: bool = True) -> ValidationReport:
    """
    Check that ``M`` is a valid classical scattering matrix.

    Mathematical failures are reported, never raised.  Only malformed input
    (non-finite entries, wrong rank) raises :class:`InvalidMatrixError`.

    Parameters
    ----------
    M : array_like
        candidate 2n x 2n matrix
    tol : float
        relative tolerance; the quasi-unitarity residual is compared with
        ``tol * max(1, ||M||_F**2)`` and the block residual with
        ``tol * max(1, ||M||_F)``
    structured : bool
        require the block-conjugate layout (group G).  With ``False`` only
        quasi-unitarity is checked (group G0).
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    M = as_complex_matrix(M)
    n = _dimension(M)
    if n == 0:
        return ValidationReport(False, 0, {}, {}, flags=("dimension",))
    norm = fro(M)
    residuals = {"quasi_unitarity": quasi_unitarity_residual(M)}
    thresholds = {"quasi_unitarity": tol * max(1.0, norm**2)}
    if structured:
        residuals["block_structure"] = block_residual(M)
        thresholds["block_structure"] = tol * max(1.0, norm)
    flags = tuple(k for k in residuals if residuals[k] > thresholds[k])
    return ValidationReport(not flags, n, residuals, thresholds, flags)


def validate_generator(K, tol: float = DEFAULT_TOL) -> ValidationReport:
    """
    Classify ``K`` as a member of the quasi-unitary algebra.

    ``form_class`` is ``"L"`` when ``K G + G K^+ = 0`` and the blocks have the
    physical layout, ``"L0"`` when only the Lie condition holds, and
    ``"none"`` otherwise.  ``passed`` is true for ``L`` and ``L0``.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    K = as_complex_matrix(K)
    n = _dimension(K)
    if n == 0:
        return ValidationReport(False, 0, {}, {}, flags=("dimension",), form_class="none")
    threshold = tol * max(1.0, fro(K))
    residuals = {"lie": lie_residual(K), "form": form_residual(K)}
    thresholds = {"lie": threshold, "form": threshold}
    if residuals["lie"] > threshold:
        form_class: FormClass = "none"
    elif residuals["form"] > threshold:
        form_class = "L0"
    else:
        form_class = "L"
    flags = ("lie",) if form_class == "none" else ()
    return ValidationReport(form_class != "none", n, residuals, thresholds, flags, form_class)


@dataclass(frozen=True)
class ScatteringMatrix:
    """
    A validated 2n x 2n scattering matrix.

    Construction raises :class:`NotQuasiUnitaryError` when the matrix fails
    quasi-unitarity or, for ``group="G"``, the block-conjugate layout.
    """

    matrix: np.ndarray
    tol: float = DEFAULT_TOL
    group: Group = "G"
    n: int = field(init=False)

    def __post_init__(self):
        M = as_complex_matrix(self.matrix)
        report = validate_scattering(M, self.tol, structured=self.group == "G")
        if not report.passed:
            raise NotQuasiUnitaryError(report)
        object.__setattr__(self, "matrix", _readonly(M))
        object.__setattr__(self, "n", report.n)

    def __array__(self, dtype=None, copy=None):
        return np.array(self.matrix, dtype=dtype)

    @property
    def blocks(self):
        return blocks(self.matrix)

    @classmethod
    def identity(cls, n: int) -> "ScatteringMatrix":
        return cls(np.eye(2 * n))


@dataclass(frozen=True)
class Generator:
    """
    An element ``K`` of the quasi-unitary Lie algebra candidate set.

    ``form_class`` is computed at construction; generators that fail the
    Lie condition are representable (``form_class == "none"``) so that
    diagnostics can carry them.
    """

    matrix: np.ndarray
    tol: float = DEFAULT_TOL
    n: int = field(init=False)
    form_class: FormClass = field(init=False)

    def __post_init__(self):
        K = as_complex_matrix(self.matrix)
        report = validate_generator(K, self.tol)
        if report.n == 0:
            raise InvalidMatrixError(f"generator must be 2n x 2n, got {K.shape}")
        object.__setattr__(self, "matrix", _readonly(K))
        object.__setattr__(self, "n", report.n)
        object.__setattr__(self, "form_class", report.form_class)

    def __array__(self, dtype=None, copy=None):
        return np.array(self.matrix, dtype=dtype)

    @property
    def is_valid(self) -> bool:
        return self.form_class in ("L", "L0")


def _as_scattering(S) -> ScatteringMatrix:
    return S if isinstance(S, ScatteringMatrix) else ScatteringMatrix(S)


def inverse_scattering(S: ScatteringMatrix) -> ScatteringMatrix:
    """Group inverse ``G S^+ G``; no linear solve needed."""
    S = _as_scattering(S)
    G = metric(S.n)
    return ScatteringMatrix(G @ S.matrix.conj().T @ G, tol=S.tol, group=S.group)


def compose(S1: ScatteringMatrix, S2: ScatteringMatrix) -> ScatteringMatrix:
    """Matrix product ``S1 @ S2`` (apply ``S2`` first), revalidated."""
    S1, S2 = _as_scattering(S1), _as_scattering(S2)
    if S1.n != S2.n:
        raise ValueError(f"mode count mismatch: {S1.n} vs {S2.n}")
    group: Group = "G" if S1.group == S2.group == "G" else "G0"
    return ScatteringMatrix(S1.matrix @ S2.matrix, tol=max(S1.tol, S2.tol), group=group)


def direct_sum(S1: ScatteringMatrix, S2: ScatteringMatrix) -> ScatteringMatrix:
    """
    Place two networks side by side as an (n1 + n2)-mode network.

    Each input's four blocks go into the matching blocks of the output so the
    annihilators-then-creators ordering is kept.
    """
    S1, S2 = _as_scattering(S1), _as_scattering(S2)
    n1, n2 = S1.n, S2.n
    n = n1 + n2
    out = np.zeros((2 * n, 2 * n), dtype=np.complex128)
    for S, lo, m in ((S1, 0, n1), (S2, n1, n2)):
        for (r, c), blk in zip(((0, 0), (0, 1), (1, 0), (1, 1)), blocks(S.matrix)):
            out[r * n + lo:r * n + lo + m, c * n + lo:c * n + lo + m] = blk
    group: Group = "G" if S1.group == S2.group == "G" else "G0"
    return ScatteringMatrix(out, tol=max(S1.tol, S2.tol), group=group)


def quadrature_basis(n: int) -> np.ndarray:
    """
    Change of basis ``C`` from real quadrature coordinates to mode coordinates.

    For S in group G the matrix ``C^-1 S C`` is real symplectic with respect to
    ``[[0, 1], [-1, 0]]``, and ``C^-1 K C`` is real Hamiltonian for K in L.
    """
    I = np.eye(n)
    return np.block([[I, 1j * I], [I, -1j * I]])


def random_generator(n: int, scale: float = 1.0, rng=None) -> np.ndarray:
    """
    Random element of the physical algebra ``[[A, D], [conj D, conj A]]``.

    The result is normalized to Frobenius norm ``scale``.
    """
    rng = np.random.default_rng(rng)
    X = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    Y = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    A = (X - X.conj().T) / 2
    D = (Y + Y.T) / 2
    K = np.block([[A, D], [D.conj(), A.conj()]])
    return K * (scale / fro(K))

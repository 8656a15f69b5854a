"""
Matrix logarithms of scattering matrices.

Three routes, tried in this order by :func:`hamiltonian_log`:

1. principal logarithm through the eigendecomposition ``S = X diag(w) X^-1``;
2. a Schur-based Jordan route for defective matrices or spectra touching the
   negative real axis: eigenvalues are clustered, clusters are decoupled by
   Sylvester equations, and on each cluster ``S = mu * (1 + N)`` with the
   terminating Mercator series for ``log(1 + N)``;
3. paired +/- i*pi branches for negative real eigenvalues, built in real
   quadrature coordinates so that the result stays in the physical algebra.

When none of them lands in the algebra the result is a
``NoSingleHamiltonian`` value, not an exception.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
import scipy.linalg

from .core import (
    DEFAULT_TOL,
    Generator,
    ScatteringMatrix,
    _as_scattering,
    as_complex_matrix,
    fro,
    lie_residual,
    quadrature_basis,
)

EIGVEC_COND_CUTOFF = 1e8
CLUSTER_RADIUS = 1e-6
DEFECT_SIGMA = 1e-6
RECONSTRUCTION_TOL = 1e-8
MAX_BRANCH_SHIFT = 2
_SHIFT_ORDER = (0, -1, 1, -2)

Outcome = Literal["GeneratorFound", "NoSingleHamiltonian"]


def expm(K) -> np.ndarray:
    """Matrix exponential (scaling and squaring with a Pade approximant)."""
    return scipy.linalg.expm(as_complex_matrix(K))


@dataclass(frozen=True)
class LogResult:
    outcome: Outcome
    generator: Generator | None
    reconstruction_residual: float
    branch_note: str
    path: str
    diagnostics: dict = field(default_factory=dict)

    @property
    def found(self) -> bool:
        return self.outcome == "GeneratorFound"

    @property
    def K(self) -> np.ndarray | None:
        return None if self.generator is None else np.array(self.generator.matrix)

    def to_dict(self) -> dict:
        out = {
            "outcome": self.outcome,
            "path": self.path,
            "branch_note": self.branch_note,
            "reconstruction_residual": self.reconstruction_residual,
            "diagnostics": self.diagnostics,
        }
        if self.generator is not None:
            out["form_class"] = self.generator.form_class
            out["K"] = np.array(self.generator.matrix)
        return out


def _principal_log(w):
    """Elementwise principal log with imaginary part in (-pi, pi]."""
    w = np.asarray(w, dtype=np.complex128)
    out = np.log(w)
    # log(-r - 0j) returns -i*pi; fold onto the +pi side of the cut
    on_cut = (w.real < 0) & (np.abs(w.imag) <= 1e-15 * np.abs(w))
    out[on_cut] = np.log(np.abs(w[on_cut])) + 1j * np.pi
    return out


def _is_negative_real(z, scale: float) -> bool:
    return z.real < 0 and abs(z.imag) <= scale


def cluster_eigenvalues(w, radius: float) -> list[list[int]]:
    """Single-linkage clusters of eigenvalues; deterministic order by first index."""
    w = np.asarray(w)
    m = len(w)
    parent = list(range(m))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(m):
        for j in range(i + 1, m):
            if abs(w[i] - w[j]) <= radius:
                parent[find(j)] = find(i)
    groups: dict[int, list[int]] = {}
    for i in range(m):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values(), key=lambda g: g[0])


def _defect_reason(w, X, radius: float) -> str | None:
    cond = np.linalg.cond(X)
    if not np.isfinite(cond) or cond > EIGVEC_COND_CUTOFF:
        return f"eigenvector condition {cond:.3e} above {EIGVEC_COND_CUTOFF:.0e}"
    for group in cluster_eigenvalues(w, radius):
        if len(group) < 2:
            continue
        block = X[:, group] / np.linalg.norm(X[:, group], axis=0)
        smin = np.linalg.svd(block, compute_uv=False)[-1]
        if smin < DEFECT_SIGMA:
            return f"eigenvectors of a clustered eigenvalue are dependent (sigma_min {smin:.3e})"
    return None


def _admissible(S: ScatteringMatrix, gen: Generator) -> bool:
    # for structured S only the physical form yields a Hamiltonian that
    # reproduces S; i*pi*1 passes the bare Lie test yet acts trivially
    return gen.form_class == "L" if S.group == "G" else gen.is_valid


def _result(S: ScatteringMatrix, K: np.ndarray, tol: float, path: str, note: str,
            diagnostics: dict) -> LogResult:
    gen = Generator(K, tol)
    resid = fro(expm(K) - S.matrix)
    diagnostics = dict(diagnostics)
    diagnostics["lie_residual"] = lie_residual(K)
    ok = _admissible(S, gen) and resid <= RECONSTRUCTION_TOL * max(1.0, fro(S.matrix))
    if ok:
        return LogResult("GeneratorFound", gen, resid, note, path, diagnostics)
    return LogResult("NoSingleHamiltonian", gen, resid, note, path, diagnostics)


def eig_log(S: ScatteringMatrix, tol: float = DEFAULT_TOL) -> LogResult:
    """
    Principal logarithm ``X diag(log w) X^-1`` of a diagonalizable matrix.

    Defers to :func:`jordan_log` when an eigenvalue sits on the closed
    negative real axis or the eigenvector matrix is numerically singular.
    """
    S = _as_scattering(S)
    M = S.matrix
    w, X = np.linalg.eig(M)
    scale = fro(M)
    radius = CLUSTER_RADIUS * scale
    if any(_is_negative_real(z, radius) for z in w):
        out = jordan_log(S, tol)
        return _annotate(out, "eigenvalue on the negative real axis; used Jordan route")
    reason = _defect_reason(w, X, radius)
    if reason is not None:
        out = jordan_log(S, tol)
        return _annotate(out, f"not diagonalizable: {reason}; used Jordan route", defective=True)
    logs = _principal_log(w)
    K = (X * logs) @ np.linalg.inv(X)
    return _result(S, K, tol, "eig", "principal branch on every eigenvalue",
                   {"eigenvector_condition": float(np.linalg.cond(X))})


def _annotate(r: LogResult, note: str, defective: bool = False) -> LogResult:
    diag = dict(r.diagnostics)
    diag["deferred"] = note
    if defective:
        diag["defective"] = True
    return LogResult(r.outcome, r.generator, r.reconstruction_residual,
                     r.branch_note, r.path, diag)


def _mercator(N: np.ndarray, max_terms: int = 400) -> np.ndarray:
    """``log(1 + N)`` for (nearly) nilpotent N; terminates once powers vanish."""
    total = np.zeros_like(N)
    term = N.copy()
    for k in range(1, max_terms + 1):
        total += ((-1) ** (k + 1) / k) * term
        size = fro(term)
        if size == 0.0 or size <= 1e-18 * max(1.0, fro(total)):
            return total
        term = term @ N
    raise ArithmeticError("Mercator series did not terminate; cluster is not unipotent")


def _cluster_log(T: np.ndarray) -> np.ndarray:
    m = T.shape[0]
    mu = np.trace(T) / m
    if abs(mu) == 0.0:
        raise ValueError("zero eigenvalue: matrix is singular")
    N = T / mu - np.eye(m)
    return _principal_log([mu])[0] * np.eye(m) + _mercator(N)


def _clustered_log(M: np.ndarray, radius: float) -> tuple[np.ndarray, int]:
    w = scipy.linalg.eigvals(M)
    if np.min(np.abs(w)) <= 1e-14 * max(1.0, fro(M)):
        raise ValueError("eigenvalue at zero: input is not invertible")
    groups = cluster_eigenvalues(w, radius)
    if len(groups) == 1:
        return _cluster_log(M), 1
    first = w[groups[0]]
    rest = np.delete(w, groups[0])

    def select(z):
        return np.min(np.abs(first - z)) < np.min(np.abs(rest - z))

    T, Z, sdim = scipy.linalg.schur(M, output="complex", sort=select)
    if sdim != len(groups[0]):
        raise ArithmeticError("Schur reordering split an eigenvalue cluster")
    T11, T12, T22 = T[:sdim, :sdim], T[:sdim, sdim:], T[sdim:, sdim:]
    X = scipy.linalg.solve_sylvester(T11, -T22, -T12)
    L11 = _cluster_log(T11)
    L22, k = _clustered_log(T22, radius)
    L = np.zeros_like(T)
    L[:sdim, :sdim] = L11
    L[sdim:, sdim:] = L22
    L[:sdim, sdim:] = X @ L22 - L11 @ X
    return Z @ L @ Z.conj().T, k + 1


def jordan_log(S: ScatteringMatrix, tol: float = DEFAULT_TOL,
               radius: float | None = None) -> LogResult:
    """
    Principal logarithm through a clustered Schur/Jordan splitting.

    Each eigenvalue cluster is split as ``mu * (1 + N)``; ``log(mu)`` takes
    the principal branch and ``log(1 + N)`` the Mercator series, which
    terminates because ``N`` is nilpotent up to rounding.  If the
    reconstruction misses the target the cluster radius is widened (x100,
    twice), which helps when a Jordan block of size >= 3 scatters its
    computed eigenvalues beyond the default radius.
    """
    S = _as_scattering(S)
    M = S.matrix
    scale = fro(M)
    base = CLUSTER_RADIUS * scale if radius is None else radius
    best = None
    for factor in (1.0, 1e2, 1e4):
        r = base * factor
        try:
            K, nclusters = _clustered_log(M, r)
        except ArithmeticError:
            continue
        resid = fro(expm(K) - M)
        if best is None or resid < best[1]:
            best = (K, resid, r, nclusters)
        if resid <= RECONSTRUCTION_TOL * max(1.0, scale):
            break
    if best is None:
        raise ArithmeticError("Jordan route failed for every cluster radius")
    K, _, r, nclusters = best
    note = "principal branch on every eigenvalue cluster"
    return _result(S, K, tol, "jordan", note,
                   {"clusters": nclusters, "cluster_radius": r})


def _real_basis(V: np.ndarray, m: int) -> np.ndarray:
    """Real orthonormal basis of a conjugation-invariant complex span of dimension m."""
    stacked = np.hstack([V.real, V.imag])
    U, _, _ = np.linalg.svd(stacked, full_matrices=False)
    return U[:, :m]


def _omega(n: int) -> np.ndarray:
    I = np.eye(n)
    Z = np.zeros((n, n))
    return np.block([[Z, I], [-I, Z]])


def _symplectic_pairs(R: np.ndarray, Om: np.ndarray) -> list[tuple[np.ndarray, np.ndarray]]:
    """Symplectic Gram-Schmidt on the columns of R; returns (e, f) with w(e, f) = 1."""
    vecs = [R[:, j].copy() for j in range(R.shape[1])]
    pairs = []
    while vecs:
        e = vecs.pop(0)
        if not vecs:
            raise ArithmeticError("odd-dimensional symplectic subspace")
        scores = [abs(e @ Om @ v) for v in vecs]
        j = int(np.argmax(scores))
        if scores[j] < 1e-10:
            raise ArithmeticError("degenerate symplectic form on eigenspace")
        f = vecs.pop(j)
        f = f / (e @ Om @ f)
        vecs = [v - (v @ Om @ f) * e + (v @ Om @ e) * f for v in vecs]
        pairs.append((e, f))
    return pairs


def _negative_spectrum(S: ScatteringMatrix, radius: float):
    """Real symplectic form of S, its eigen-data, and the negative real clusters."""
    n = S.n
    C = quadrature_basis(n)
    Mr = np.linalg.solve(C, S.matrix @ C).real
    w, V = np.linalg.eig(Mr)
    groups = cluster_eigenvalues(w, radius)
    negative = []
    for g in groups:
        centre = np.mean(w[g])
        if _is_negative_real(centre, radius):
            negative.append((g, float(centre.real)))
    return Mr, w, V, groups, negative


def _branch_candidates(S, radius, Mr, w, V, groups, negative):
    """
    Yield ``(shift_vector, K)`` for real Hamiltonian logs with paired branches.

    Rotation pairs get angle ``pi * (2 s + 1)``; shifts ``s`` are bounded by
    ``MAX_BRANCH_SHIFT``.
    """
    n = S.n
    Om = _omega(n)
    cols, blocks_, pairs = [], [], []  # pairs: (col_i, col_j, real part)
    neg_idx = {i for g, _ in negative for i in g}
    for g in groups:
        if g[0] in neg_idx:
            continue
        for j in g:
            cols.append(V[:, j])
            blocks_.append(_principal_log([w[j]])[0])
    handled = set()
    for k, (g, centre) in enumerate(negative):
        if k in handled:
            continue
        R = _real_basis(V[:, g], len(g))
        if abs(centre + 1.0) <= radius:
            handled.add(k)
            for e, f in _symplectic_pairs(R, Om):
                pairs.append((e, f, 0.0))
            continue
        partner = None
        for k2, (g2, c2) in enumerate(negative):
            if k2 != k and k2 not in handled and abs(c2 - 1.0 / centre) <= radius * max(1, abs(1 / centre)):
                partner = k2
                break
        if partner is None or len(g) % 2:
            raise ArithmeticError("negative eigenvalue without an even symplectic partner")
        handled.update({k, partner})
        g2 = negative[partner][0]
        W0 = _real_basis(V[:, g2], len(g2))
        gram = R.T @ Om @ W0
        W = W0 @ np.linalg.inv(gram)
        lr = np.log(-centre)
        for a in range(0, len(g), 2):
            pairs.append((R[:, a], R[:, a + 1], lr))
            pairs.append((W[:, a], W[:, a + 1], -lr))

    # the two members of a dual pair share one branch shift
    groups_of_pairs = []
    i = 0
    while i < len(pairs):
        if pairs[i][2] == 0.0:
            groups_of_pairs.append([i])
            i += 1
        else:
            groups_of_pairs.append([i, i + 1])
            i += 2
    p = len(groups_of_pairs)
    if p <= 4:
        shift_vectors = itertools.product(_SHIFT_ORDER, repeat=p)
    else:
        shift_vectors = ((s,) * p for s in _SHIFT_ORDER)

    dim = 2 * n
    for shifts in shift_vectors:
        B = np.zeros((dim, dim), dtype=np.complex128)
        L = np.zeros((dim, dim), dtype=np.complex128)
        pos = 0
        for v, lg in zip(cols, blocks_):
            B[:, pos] = v
            L[pos, pos] = lg
            pos += 1
        for s, members in zip(shifts, groups_of_pairs):
            theta = np.pi * (2 * s + 1)
            for idx in members:
                a, b, lr = pairs[idx]
                B[:, pos], B[:, pos + 1] = a, b
                L[pos:pos + 2, pos:pos + 2] = [[lr, -theta], [theta, lr]]
                pos += 2
        if pos != dim:
            raise ArithmeticError("eigenbasis is incomplete; matrix is not diagonalizable")
        Kr = (B @ L @ np.linalg.inv(B)).real
        C = quadrature_basis(n)
        yield shifts, C @ Kr @ np.linalg.inv(C)


def hamiltonian_log(S: ScatteringMatrix, tol: float = DEFAULT_TOL) -> LogResult:
    """
    Find ``K`` with ``expm(K) = S`` satisfying ``K G + G K^+ = 0``.

    The principal logarithm is tried first.  If it fails the Lie condition,
    negative real eigenvalues are examined in real quadrature coordinates:
    an odd multiplicity certifies that no logarithm in the algebra exists
    (for one mode this is exactly ``trace S < -2``); otherwise paired
    rotation branches are searched, and the winner is the passing candidate
    with the smallest shift vector (ordered by total |shift|, then
    lexicographically).

    Returns
    -------
    LogResult
        ``GeneratorFound`` or ``NoSingleHamiltonian``; the latter carries the
        best Lie residual, the trace and whether the obstruction is certified.
    """
    S = _as_scattering(S)
    first = eig_log(S, tol)
    if first.found:
        return first

    M = S.matrix
    trace = complex(np.trace(M))
    diagnostics = dict(first.diagnostics)
    diagnostics["trace"] = [trace.real, trace.imag]
    best_lie = first.diagnostics.get("lie_residual", np.inf)
    if S.group != "G":
        diagnostics.update(certified=False, reason="principal logarithm fails the Lie condition")
        return LogResult("NoSingleHamiltonian", first.generator, first.reconstruction_residual,
                         first.branch_note, first.path, diagnostics)

    radius = CLUSTER_RADIUS * fro(M)
    Mr, w, V, groups, negative = _negative_spectrum(S, radius)
    diagnostics["negative_eigenvalues"] = [
        {"value": c, "multiplicity": len(g)} for g, c in negative]
    odd = [c for g, c in negative if len(g) % 2]
    if odd:
        reason = ("negative real eigenvalue(s) "
                  + ", ".join(f"{c:.12g}" for c in odd)
                  + " with odd multiplicity: no real logarithm exists")
        if S.n == 1:
            reason += f"; single mode with trace {trace.real:.12g} < -2"
        diagnostics.update(certified=True, reason=reason, lie_residual=best_lie)
        return LogResult("NoSingleHamiltonian", first.generator, first.reconstruction_residual,
                         first.branch_note, first.path, diagnostics)

    best = None
    threshold = RECONSTRUCTION_TOL * max(1.0, fro(M))
    try:
        for shifts, K in _branch_candidates(S, radius, Mr, w, V, groups, negative):
            gen = Generator(K, tol)
            lie = lie_residual(K)
            ok = _admissible(S, gen)
            key = (not ok, sum(abs(s) for s in shifts) if ok else lie, shifts)
            if best is None or key < best[0]:
                best = (key, shifts, K, gen)
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        diagnostics.update(certified=False, lie_residual=best_lie,
                           reason=f"no branch found within policy: {exc}")
        return LogResult("NoSingleHamiltonian", first.generator, first.reconstruction_residual,
                         first.branch_note, first.path, diagnostics)

    _, shifts, K, gen = best
    resid = fro(expm(K) - M)
    note = ("paired branches on negative eigenvalues, rotation angles "
            + ", ".join(f"{2 * s + 1}*pi" for s in shifts))
    diagnostics["branch_shifts"] = list(shifts)
    diagnostics["lie_residual"] = lie_residual(K)
    if _admissible(S, gen) and resid <= threshold:
        return LogResult("GeneratorFound", gen, resid, note, "branch", diagnostics)
    diagnostics.update(certified=False, reason="no branch found within policy")
    return LogResult("NoSingleHamiltonian", gen, resid, note, "branch", diagnostics)

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from linqnet.core import (
    Generator,
    ScatteringMatrix,
    fro,
    lie_residual,
    metric,
    random_generator,
)
from linqnet.elements import (
    beam_splitter,
    compensated_tap,
    parametric_amplifier,
    single_mode_squeezer,
    squeezer_pi,
)
from linqnet.logm import (
    cluster_eigenvalues,
    eig_log,
    expm,
    hamiltonian_log,
    jordan_log,
)


def mp_expm(K):
    """Independent exponential at 30 digits."""
    mpmath.mp.dps = 30
    E = mpmath.expm(mpmath.matrix(K.tolist()))
    return np.array([[complex(E[i, j]) for j in range(E.cols)] for i in range(E.rows)])


def test_expm_agrees_with_mpmath():
    K = random_generator(2, 1.5, 11)
    assert fro(expm(K) - mp_expm(K)) <= 1e-13


def test_beam_splitter_from_generator():
    phi = 0.7
    J = np.array([[0, -phi], [phi, 0]])
    Z = np.zeros((2, 2))
    assert np.allclose(expm(np.block([[J, Z], [Z, J]])), beam_splitter(phi).matrix, atol=1e-15)


def test_beam_splitter_log_eigenvalues():
    res = eig_log(beam_splitter(0.7))
    assert res.found and res.path == "eig"
    ev = np.linalg.eigvals(res.K)
    ev = ev[np.argsort(ev.imag)]
    assert np.allclose(ev, [-0.7j, -0.7j, 0.7j, 0.7j], atol=1e-12)
    assert res.generator.form_class == "L"


def test_amplifier_log_eigenvalues():
    res = eig_log(parametric_amplifier(0.5))
    ev = np.sort(np.linalg.eigvals(res.K).real)
    assert np.allclose(ev, [-0.5, -0.5, 0.5, 0.5], atol=1e-12)


def test_squeezer_log_is_d_type():
    z = 0.4
    res = hamiltonian_log(single_mode_squeezer(z))
    assert res.found
    assert np.allclose(res.K, [[0, z], [z, 0]], atol=1e-14)


def test_tap_is_defective_and_log_is_s_minus_one():
    S = compensated_tap(np.arccos(0.8))
    res = eig_log(S)
    assert res.diagnostics.get("defective") is True
    assert res.path == "jordan"
    assert fro(res.K - (S.matrix - np.eye(4))) <= 1e-8
    assert fro(expm(res.K) - S.matrix) <= 1e-8 * fro(S.matrix)


def test_jordan_matches_eig_on_diagonalizable():
    S = ScatteringMatrix(expm(random_generator(3, 0.8, 4)), tol=1e-9)
    assert fro(jordan_log(S).K - eig_log(S).K) <= 1e-10


@pytest.mark.parametrize("zeta", [0.1, 0.3, 1.0, 2.0])
def test_squeezer_pi_obstruction(zeta):
    res = hamiltonian_log(squeezer_pi(zeta))
    assert res.outcome == "NoSingleHamiltonian"
    assert res.diagnostics["certified"] is True
    assert res.diagnostics["trace"][0] == pytest.approx(-2 * np.cosh(zeta), abs=1e-12)
    assert "< -2" in res.diagnostics["reason"]


def test_squeezer_pi_trace_value():
    res = hamiltonian_log(squeezer_pi(0.3))
    assert res.diagnostics["trace"][0] == pytest.approx(-2.0907, abs=1e-4)


def test_minus_identity_has_rotation_generator():
    res = hamiltonian_log(ScatteringMatrix(-np.eye(2)))
    assert res.found and res.path == "branch"
    assert np.allclose(np.abs(np.linalg.eigvals(res.K)), np.pi)
    assert res.generator.form_class == "L"


@pytest.mark.parametrize("S", [beam_splitter(np.pi), ScatteringMatrix(-parametric_amplifier(0.4).matrix)])
def test_even_negative_spectrum_found_by_branch(S):
    res = hamiltonian_log(S)
    assert res.found
    assert "branch_shifts" in res.diagnostics
    assert "pi" in res.branch_note
    assert fro(expm(res.K) - S.matrix) <= 1e-8 * max(1.0, fro(S.matrix))
    assert lie_residual(res.K) <= 1e-10 * max(1.0, fro(res.K))


def test_singular_matrix_rejected_before_log():
    with pytest.raises(ValueError):
        ScatteringMatrix(np.zeros((2, 2)))


def test_cluster_eigenvalues_single_linkage():
    groups = cluster_eigenvalues(np.array([0.0, 1e-7, 2e-7, 1.0]), 1.5e-7)
    assert groups == [[0, 1, 2], [3]]


def test_log_result_dict():
    d = hamiltonian_log(beam_splitter(0.2)).to_dict()
    assert d["outcome"] == "GeneratorFound" and d["form_class"] == "L"
    assert d["K"].shape == (4, 4)


@settings(max_examples=60, deadline=None)
@given(n=st.integers(1, 6), scale=st.floats(0.01, 0.5), seed=st.integers(0, 2**32 - 1))
def test_small_generator_completeness(n, scale, seed):
    K = random_generator(n, scale, seed)
    S = ScatteringMatrix(expm(K), tol=1e-9)
    res = hamiltonian_log(S)
    assert res.found
    assert fro(res.K - K) <= 1e-7
    # exponential checked with an independent implementation
    assert fro(mp_expm(res.K) - S.matrix) <= 1e-8 * max(1.0, fro(S.matrix))


@settings(max_examples=60, deadline=None)
@given(n=st.integers(1, 4), scale=st.floats(0.01, 6.0), seed=st.integers(0, 2**32 - 1))
def test_found_implies_sound(n, scale, seed):
    S = ScatteringMatrix(expm(random_generator(n, scale, seed)), tol=1e-8)
    res = hamiltonian_log(S, tol=1e-8)
    if not res.found:
        return
    assert res.reconstruction_residual <= 1e-8 * max(1.0, fro(S.matrix))
    assert lie_residual(res.K) <= 1e-8 * max(1.0, fro(res.K))
    if res.path == "eig":
        ev = np.linalg.eigvals(res.K)
        assert np.all(ev.imag > -np.pi - 1e-9) and np.all(ev.imag <= np.pi + 1e-9)
    else:
        assert res.branch_note


@settings(max_examples=30, deadline=None)
@given(zeta=st.floats(0.1, 2.0))
def test_obstruction_over_range(zeta):
    assert hamiltonian_log(squeezer_pi(zeta)).outcome == "NoSingleHamiltonian"


def test_group_g0_principal_log():
    # a global phase is in G0 only; its log i*theta*1 is Lie-valid
    S = ScatteringMatrix(np.exp(0.3j) * np.eye(2), group="G0")
    res = hamiltonian_log(S)
    assert res.found
    assert np.allclose(res.K, 0.3j * np.eye(2))
    assert Generator(res.K).form_class == "L0"
    assert np.allclose(res.K @ metric(1) + metric(1) @ res.K.conj().T, 0)

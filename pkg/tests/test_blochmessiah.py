import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from linqnet.blochmessiah import (
    InvariantViolationError,
    factorize_g,
    factorize_g0,
    middle_factor,
    reconstruct,
    singular_clusters,
    unitary_log,
)
from linqnet.core import ScatteringMatrix, direct_sum, fro, random_generator
from linqnet.elements import (
    beam_splitter,
    compensated_tap,
    parametric_amplifier,
    phase_shifter,
    single_mode_squeezer,
    squeezer_pi,
)
from linqnet.logm import expm, hamiltonian_log

seeds = st.integers(0, 2**32 - 1)


def random_s(n, scale, seed):
    return ScatteringMatrix(expm(random_generator(n, scale, seed)), tol=1e-9)


def assert_good(f, S):
    bound = 1e-8 * max(1.0, fro(S.matrix))
    assert f.reconstruction_residual <= bound
    assert fro(reconstruct(f).matrix - S.matrix) <= bound


def test_unitary_log_rotation():
    phi = 0.7
    U = np.array([[np.cos(phi), -np.sin(phi)], [np.sin(phi), np.cos(phi)]])
    K = unitary_log(U)
    assert np.allclose(K, -K.conj().T)
    assert np.allclose(np.sort(np.linalg.eigvals(K).imag), [-phi, phi], atol=1e-14)
    assert fro(expm(K) - U) <= 1e-12


def test_unitary_log_rejects_non_unitary():
    with pytest.raises(ValueError):
        unitary_log(2 * np.eye(2))


def test_amplifier_degenerate_case():
    S = parametric_amplifier(0.5)
    f = factorize_g(S)
    assert np.allclose(np.sort(f.D), [0.5, 0.5], atol=1e-14)
    assert f.resolution.startswith("perturbation")
    assert_good(f, S)


@pytest.mark.parametrize("S", [beam_splitter(0.7), phase_shifter(0.4), ScatteringMatrix.identity(2)])
def test_passive_gives_zero_squeezing(S):
    f = factorize_g(S)
    assert np.all(f.D == 0.0)
    assert_good(f, S)


def test_squeezer_pi_decomposes():
    S = squeezer_pi(0.3)
    assert not hamiltonian_log(S).found
    f = factorize_g(S)
    assert np.allclose(np.abs(f.D), [0.3], atol=1e-14)
    assert all(k.form_class == "L" for k in f.factors)
    assert_good(f, S)


@pytest.mark.parametrize("S", [
    compensated_tap(np.arccos(0.8)),
    direct_sum(single_mode_squeezer(0.4), single_mode_squeezer(0.4)),
    direct_sum(parametric_amplifier(0.2), beam_splitter(0.3)),
])
def test_structured_edge_cases(S):
    assert_good(factorize_g(S), S)


def test_certificates_present():
    f = factorize_g(random_s(3, 1.0, 9))
    for key in ("V1_unitarity", "U2_unitarity", "S21_residual", "sign_relation_residual"):
        assert f.certificates[key] <= 1e-9


def test_g0_accepts_phase():
    S = ScatteringMatrix(np.exp(0.3j) * parametric_amplifier(0.4).matrix, group="G0")
    f = factorize_g0(S)
    assert f.reconstruction_residual <= 1e-8 * fro(S.matrix)
    assert all(k.is_valid for k in f.factors)


def test_g_requires_block_layout():
    S = ScatteringMatrix(np.exp(0.3j) * np.eye(2), group="G0")
    with pytest.raises(ValueError):
        factorize_g(S)


def test_singular_s11_detected():
    # a block layout with S11 = 0 is never quasi-unitary; bypass validation on purpose
    M = np.array([[0, 1], [1, 0]], dtype=complex)
    S = object.__new__(ScatteringMatrix)
    object.__setattr__(S, "matrix", M)
    object.__setattr__(S, "n", 1)
    object.__setattr__(S, "group", "G0")
    object.__setattr__(S, "tol", 1e-10)
    with pytest.raises(InvariantViolationError):
        factorize_g0(S)


def test_singular_clusters():
    assert singular_clusters(np.array([3.0, 3.0 + 1e-9, 1.0, 0.0]), 1e-8) == [[0, 1], [2], [3]]


@settings(max_examples=40, deadline=None)
@given(d=st.lists(st.floats(-3.0, 3.0), min_size=1, max_size=5))
def test_middle_factor_identity(d):
    D = np.array(d)
    n = len(d)
    K = np.zeros((2 * n, 2 * n))
    K[:n, n:] = np.diag(D)
    K[n:, :n] = np.diag(D)
    assert np.max(np.abs(middle_factor(D) - expm(K))) <= 1e-12 * max(1.0, np.max(np.cosh(D)))


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 6), scale=st.floats(0.01, 2.0), seed=seeds)
def test_factorize_g_round_trip(n, scale, seed):
    S = random_s(n, scale, seed)
    f = factorize_g(S)
    assert_good(f, S)
    assert all(k.form_class == "L" for k in f.factors)
    # squeezing magnitudes from an independent singular value computation
    s12 = np.linalg.svd(S.matrix[:n, n:], compute_uv=False)
    assert np.allclose(np.sort(np.abs(f.D)), np.sort(np.arcsinh(s12)), atol=1e-9)
    assert f.certificates["V1_unitarity"] <= 1e-9
    assert f.certificates["U2_unitarity"] <= 1e-9


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 5), scale=st.floats(0.01, 2.0), seed=seeds)
def test_factorize_g0_round_trip(n, scale, seed):
    S = random_s(n, scale, seed)
    f = factorize_g0(S)
    assert f.reconstruction_residual <= 1e-8 * max(1.0, fro(S.matrix))
    assert all(k.is_valid for k in f.factors)


@settings(max_examples=20, deadline=None)
@given(z=st.floats(0.01, 2.0), phi=st.floats(-3.0, 3.0))
def test_degenerate_pairs(z, phi):
    # an amplifier after a beam splitter keeps both singular values equal
    S = ScatteringMatrix(parametric_amplifier(z).matrix @ beam_splitter(phi).matrix)
    assert_good(factorize_g(S), S)

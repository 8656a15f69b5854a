import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from linqnet.core import compose, validate_scattering
from linqnet.elements import (
    KINDS,
    ElementSpec,
    ParameterDomainError,
    beam_splitter,
    catalogue,
    compensated_tap,
    parametric_amplifier,
    phase_shifter,
    single_mode_squeezer,
    squeezer_pi,
    tap_squeezing,
)
from linqnet.logm import expm

params = st.floats(-2.0, 2.0)


def test_beam_splitter_quarter_turn():
    A = beam_splitter(np.pi / 2).matrix[:2, :2]
    assert np.allclose(A, [[0, -1], [1, 0]], atol=1e-16)


@pytest.mark.parametrize("phi", [0.1, 1.0, 3.0])
def test_beam_splitter_exact(phi):
    assert validate_scattering(beam_splitter(phi).matrix).residuals["quasi_unitarity"] <= 1e-15


def test_amplifier_layout():
    S = parametric_amplifier(0.5).matrix
    assert S[0, 3] == np.sinh(0.5)
    assert S[0, 0] == np.cosh(0.5)
    assert S[0, 1] == 0 and S[0, 2] == 0


def test_squeezer_pi_trace():
    S = squeezer_pi(0.3).matrix
    assert np.trace(S).real == pytest.approx(-2.0906770282577209, abs=1e-15)


def test_squeezer_pi_is_shift_times_squeezer():
    # a pi phase shift on one mode is -1
    S = compose(phase_shifter(np.pi), single_mode_squeezer(0.3)).matrix
    assert np.allclose(S, squeezer_pi(0.3).matrix, atol=1e-15)


def test_squeezer_is_exponential():
    z = 0.8
    assert np.allclose(single_mode_squeezer(z).matrix, expm([[0, z], [z, 0]]), atol=1e-14)


def test_tap_squeezing_values():
    # cos phi = 0.8 gives cosh zeta = 5/4, so zeta = ln 2; cos phi = 0.6 gives ln 3
    assert tap_squeezing(np.arccos(0.8)) == pytest.approx(0.6931471805599453, abs=1e-15)
    assert tap_squeezing(np.arccos(0.6)) == pytest.approx(1.0986122886681098, abs=1e-15)
    with pytest.raises(ParameterDomainError):
        tap_squeezing(2.0)


def test_tap_has_unit_eigenvalues():
    S = compensated_tap(np.arccos(0.8)).matrix
    N = S - np.eye(4)
    assert np.linalg.norm(N @ N) <= 1e-14
    assert np.linalg.norm(N) > 0.1


@settings(max_examples=60, deadline=None)
@given(p=params)
def test_catalogue_quasi_unitary(p):
    for S in catalogue(p).values():
        rep = validate_scattering(S.matrix)
        assert max(rep.residuals.values()) <= 1e-13


@settings(max_examples=60, deadline=None)
@given(a=params, b=params)
def test_beam_splitter_group_law(a, b):
    prod = beam_splitter(a).matrix @ beam_splitter(b).matrix
    assert np.max(np.abs(prod - beam_splitter(a + b).matrix)) <= 1e-13


@settings(max_examples=60, deadline=None)
@given(phi=st.floats(0.0, 1.5))
def test_tap_constraint(phi):
    assert np.cosh(tap_squeezing(phi)) * np.cos(phi) == pytest.approx(1.0, abs=1e-14)


def test_element_spec_round_trip():
    for kind in KINDS:
        spec = ElementSpec(kind, {"phi": 0.3, "zeta": 0.3, "theta": 0.3})
        assert spec.build().n == spec.n
    with pytest.raises(ValueError):
        ElementSpec("mirror")

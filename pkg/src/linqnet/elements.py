"""Named optical elements as scattering matrices.

Entry layouts follow the usual two-mode conventions: for the beam splitter
and the parametric amplifier the operator vector is ``(a1, a2, a1+, a2+)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import ScatteringMatrix, compose

KINDS = (
    "beam_splitter",
    "parametric_amplifier",
    "phase_shifter",
    "single_mode_squeezer",
    "squeezer_pi",
    "compensated_tap",
    "identity",
)


class ParameterDomainError(ValueError):
    pass


def beam_splitter(phi: float) -> ScatteringMatrix:
    """Two-mode passive mixer: real rotation by ``phi`` on both blocks."""
    c, s = np.cos(phi), np.sin(phi)
    R = np.array([[c, -s], [s, c]])
    Z = np.zeros((2, 2))
    return ScatteringMatrix(np.block([[R, Z], [Z, R]]))


def parametric_amplifier(zeta: float) -> ScatteringMatrix:
    """Two-mode amplifier coupling ``a1`` to ``a2+`` and ``a2`` to ``a1+``."""
    c, s = np.cosh(zeta), np.sinh(zeta)
    return ScatteringMatrix(np.array([
        [c, 0, 0, s],
        [0, c, s, 0],
        [0, s, c, 0],
        [s, 0, 0, c],
    ]))


def single_mode_squeezer(zeta: float) -> ScatteringMatrix:
    c, s = np.cosh(zeta), np.sinh(zeta)
    return ScatteringMatrix(np.array([[c, s], [s, c]]))


def phase_shifter(theta: float) -> ScatteringMatrix:
    return ScatteringMatrix(np.diag([np.exp(1j * theta), np.exp(-1j * theta)]))


def squeezer_pi(zeta: float) -> ScatteringMatrix:
    """
    Single-mode squeezer followed by a pi phase shift, ``-[[cosh, sinh], [sinh, cosh]]``.

    ``zeta = 0`` is accepted and gives ``-1``; that degenerate case does have
    an effective Hamiltonian, unlike every ``zeta != 0``.
    """
    c, s = np.cosh(zeta), np.sinh(zeta)
    return ScatteringMatrix(-np.array([[c, s], [s, c]]))


def tap_squeezing(phi: float) -> float:
    """Nonnegative ``zeta`` with ``cosh(zeta) * cos(phi) = 1``."""
    c = np.cos(phi)
    if not 0 < c <= 1:
        raise ParameterDomainError(f"compensated tap needs cos(phi) in (0, 1], got {c:.6g}")
    return float(np.arccosh(1.0 / c))


def compensated_tap(phi: float) -> ScatteringMatrix:
    """Beam splitter ``phi`` followed by the amplifier that restores the intensity."""
    return compose(parametric_amplifier(tap_squeezing(phi)), beam_splitter(phi))


def identity(n: int = 1) -> ScatteringMatrix:
    return ScatteringMatrix(np.eye(2 * n))


@dataclass(frozen=True)
class ElementSpec:
    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown element kind {self.kind!r}; choose from {', '.join(KINDS)}")

    @property
    def n(self) -> int:
        if self.kind in ("beam_splitter", "parametric_amplifier", "compensated_tap"):
            return 2
        if self.kind == "identity":
            return int(self.params.get("n", 1))
        return 1

    def build(self) -> ScatteringMatrix:
        p = self.params
        if self.kind == "beam_splitter":
            return beam_splitter(p.get("phi", 0.0))
        if self.kind == "parametric_amplifier":
            return parametric_amplifier(p.get("zeta", 0.0))
        if self.kind == "phase_shifter":
            return phase_shifter(p.get("theta", 0.0))
        if self.kind == "single_mode_squeezer":
            return single_mode_squeezer(p.get("zeta", 0.0))
        if self.kind == "squeezer_pi":
            return squeezer_pi(p.get("zeta", 0.0))
        if self.kind == "compensated_tap":
            return compensated_tap(p.get("phi", 0.0))
        return identity(self.n)


def catalogue(param: float) -> dict[str, ScatteringMatrix]:
    """Every element at one parameter value (the tap uses ``phi = param / 2``)."""
    return {
        "beam_splitter": beam_splitter(param),
        "parametric_amplifier": parametric_amplifier(param),
        "phase_shifter": phase_shifter(param),
        "single_mode_squeezer": single_mode_squeezer(param),
        "squeezer_pi": squeezer_pi(param),
        "compensated_tap": compensated_tap(param / 2),
        "identity": identity(1),
    }


__all__ = [
    "ElementSpec", "KINDS", "ParameterDomainError", "beam_splitter", "catalogue",
    "compensated_tap", "identity", "parametric_amplifier", "phase_shifter",
    "single_mode_squeezer", "squeezer_pi", "tap_squeezing",
]

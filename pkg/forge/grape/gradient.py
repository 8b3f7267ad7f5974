"""
Exact gradients of the gate amplitudes for piecewise-constant controls.

The derivative of each step exponential is taken in the eigenbasis of its Hamiltonian
through divided differences, and contracted with forward and backward propagated states.
"""
from collections.abc import Collection
from dataclasses import dataclass
from typing import Any

import numpy as np

from forge.printer import PrettyPrinter
from forge.propagator import bell_overlap
from forge.statespace import HamiltonianFamily, Sector, SectorSteps
from forge.statespace.exception import ModelValidationError
from forge.types import ComplexArray, RealArray

#: Below this |z| the divided difference (e^z - 1)/z switches to its Taylor series
_SERIES_THRESHOLD = 1e-5


def _phi1(z: ComplexArray) -> ComplexArray:
    """(e^z - 1)/z, continuous at z = 0"""
    small = np.abs(z) < _SERIES_THRESHOLD
    safe = np.where(small, 1.0, z)
    return np.where(small, 1 + z / 2 + z ** 2 / 6, np.expm1(safe) / safe)


@dataclass(frozen=True, eq=False)
class AmplitudeGradient(PrettyPrinter):
    """
    A diagonal gate amplitude a = <k|U|k> and its derivatives.

    :param amplitude: The amplitude a.
    :param controls: Map of control name to ∂a/∂c_n over the N controlled steps.
    :param delta_o: ∂a/∂Δ_o.
    """
    amplitude: complex
    controls: dict[str, ComplexArray]
    delta_o: complex

    def as_dict(self) -> dict[str, Any]:
        return {"amplitude": self.amplitude, "controls": self.controls, "delta_o": self.delta_o}


def amplitude_gradient(steps: SectorSteps, controls: Collection[str]) -> AmplitudeGradient:
    """
    Compute the computational-state amplitude of a sector and its gradient
    with respect to each control in ``controls`` and to Δ_o.

    :raise ModelValidationError: When the step Hamiltonians are not Hermitian.
    """
    hamiltonians = steps.hamiltonians
    if not np.allclose(hamiltonians, np.conj(np.swapaxes(hamiltonians, -1, -2)), rtol=0, atol=1e-12):
        raise ModelValidationError("gamma", "exact gradients need a decay-free Hermitian Hamiltonian")

    energies, vectors = np.linalg.eigh(hamiltonians)
    vectors_h = np.conj(np.swapaxes(vectors, -1, -2))
    dts = steps.dts[:, None]
    phases = np.exp(-1j * energies * dts)
    propagators = (vectors * phases[:, None, :]) @ vectors_h

    initial = steps.initial_state()
    n_total = steps.n_steps

    forward = np.empty((n_total + 1, steps.dim), dtype=complex)
    forward[0] = initial
    for n in range(n_total):
        forward[n + 1] = propagators[n] @ forward[n]

    # backward[n] = U_n^† ... U_{S-1}^† |k>, the co-state after step n - 1
    backward = np.empty_like(forward)
    backward[n_total] = initial
    for n in range(n_total - 1, -1, -1):
        backward[n] = vectors[n] @ (np.conj(phases[n]) * (vectors_h[n] @ backward[n + 1]))

    z = -1j * (energies[:, :, None] - energies[:, None, :]) * dts[:, :, None]
    divided = -1j * dts[:, :, None] * phases[:, None, :] * _phi1(z)

    w = np.einsum("nij,nj->ni", vectors_h, backward[1:])
    u = np.einsum("nij,nj->ni", vectors_h, forward[:-1])
    kernel = np.conj(w)[:, :, None] * divided * u[:, None, :]
    weights = np.conj(vectors) @ kernel @ np.swapaxes(vectors, -1, -2)

    controlled = weights[steps.control_slice]
    return AmplitudeGradient(
        amplitude=complex(np.vdot(initial, forward[-1])),
        controls={name: np.einsum("nij,nij->n", steps.derivatives[name], controlled) for name in controls},
        delta_o=complex(np.einsum("ij,nij->", steps.delta_o_operator, weights)),
    )


@dataclass(frozen=True, eq=False)
class FidelityGradient(PrettyPrinter):
    """
    The Bell-state fidelity of a pulse and its gradient.

    :param fidelity: F = |S|² with S the Bell overlap.
    :param controls: Map of control name to ∂F/∂c_n.
    :param delta_o: ∂F/∂Δ_o.
    :param theta: ∂F/∂θ.
    """
    fidelity: float
    overlap: complex
    controls: dict[str, RealArray]
    delta_o: float
    theta: float

    def as_dict(self) -> dict[str, Any]:
        return {
            "fidelity": self.fidelity,
            "overlap": self.overlap,
            "controls": self.controls,
            "delta_o": self.delta_o,
            "theta": self.theta,
        }


def fidelity_gradient(family: HamiltonianFamily, controls: Collection[str]) -> FidelityGradient:
    """
    Compute the Bell-state fidelity of the family's pulse with its exact gradient
    with respect to ``controls``, Δ_o and θ.

    Uses the reduced 01 and 11 sectors with a10 = a01.
    """
    theta = family.pulse.theta
    g01 = amplitude_gradient(family.steps(Sector.S01), controls)
    g11 = amplitude_gradient(family.steps(Sector.S11), controls)

    overlap = bell_overlap(g01.amplitude, g01.amplitude, g11.amplitude, theta)
    phase = np.exp(-1j * theta)

    def d_fidelity(d01: Any, d11: Any) -> Any:
        d_overlap = (2 * phase * d01 - phase ** 2 * d11) / 4
        return 2 * np.real(np.conj(overlap) * d_overlap)

    d_theta = (-2j * phase * g01.amplitude + 2j * phase ** 2 * g11.amplitude) / 4
    return FidelityGradient(
        fidelity=float(np.abs(overlap) ** 2),
        overlap=complex(overlap),
        controls={name: d_fidelity(g01.controls[name], g11.controls[name]) for name in controls},
        delta_o=float(d_fidelity(g01.delta_o, g11.delta_o)),
        theta=float(2 * np.real(np.conj(overlap) * d_theta)),
    )

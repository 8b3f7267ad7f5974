"""
Piecewise-constant time evolution, the Bell-state fidelity and the Rydberg-time metric.
"""
import logging
from collections.abc import Mapping
from dataclasses import dataclass
from typing import Any

import numpy as np
import scipy.linalg
from scipy.integrate import trapezoid

from forge.logger import ForgeLogger
from forge.printer import PrettyPrinter
from forge.propagator.exception import PropagatorError
from forge.statespace import GateModel, Pulse, HamiltonianBlock, Sector, SectorSteps, HamiltonianFamily, family_for
from forge.statespace.model import excitation_counts
from forge.types import ComplexArray, RealArray

log: ForgeLogger = logging.getLogger(__name__)

#: Computational states tracked by a reduced evolution
REDUCED_KEYS: tuple[str, ...] = ("01", "11")
#: Computational states tracked by a full product-space evolution
FULL_KEYS: tuple[str, ...] = ("01", "10", "11")


###########################################################################
## Step propagators
###########################################################################
def is_hermitian(matrices: ComplexArray, atol: float = 1e-12) -> bool:
    """Whether every matrix in a (stack of) square matrices equals its conjugate transpose within ``atol``"""
    return bool(np.allclose(matrices, np.conj(np.swapaxes(matrices, -1, -2)), rtol=0, atol=atol))


def step_propagator(block: HamiltonianBlock | ComplexArray, dt: float) -> ComplexArray:
    """
    Return exp(-i·H·dt) for a single step.

    Hermitian inputs are exponentiated through their eigendecomposition,
    any other input (e.g. with decay attached) through :py:func:`scipy.linalg.expm`.

    :raise PropagatorError: When ``dt`` is not positive.
    """
    if not dt > 0:
        raise PropagatorError(f"Step duration must be > 0, got {dt}")

    matrix = block.matrix if isinstance(block, HamiltonianBlock) else np.asarray(block, dtype=complex)
    return step_propagators(matrix[None], np.array([dt]))[0]


def step_propagators(hamiltonians: ComplexArray, dts: RealArray) -> ComplexArray:
    """
    Return the stack exp(-i·H_n·dt_n) for a stack of step Hamiltonians with shape (S, d, d).

    :raise PropagatorError: When any duration is negative or the shapes disagree.
    """
    hamiltonians = np.asarray(hamiltonians, dtype=complex)
    dts = np.asarray(dts, dtype=float)
    if hamiltonians.ndim != 3 or hamiltonians.shape[0] != dts.shape[0]:
        raise PropagatorError(f"Expected {len(dts)} step Hamiltonians, got an array of shape {hamiltonians.shape}")
    if np.any(dts < 0):
        raise PropagatorError("Step durations must be >= 0")

    if is_hermitian(hamiltonians):
        energies, vectors = np.linalg.eigh(hamiltonians)
        phases = np.exp(-1j * energies * dts[:, None])
        return (vectors * phases[:, None, :]) @ np.conj(np.swapaxes(vectors, -1, -2))

    return scipy.linalg.expm(-1j * hamiltonians * dts[:, None, None])


def propagate(propagators: ComplexArray, initial: ComplexArray) -> ComplexArray:
    """
    Apply a stack of step propagators in time order to ``initial``.

    :param initial: A state of shape (d,) or a batch of states as columns of shape (d, k).
    :return: The states at every step boundary, shape (S + 1, ...).
    """
    states = np.empty((len(propagators) + 1,) + initial.shape, dtype=complex)
    states[0] = initial
    for n, propagator in enumerate(propagators):
        states[n + 1] = propagator @ states[n]
    return states


###########################################################################
## Trajectory
###########################################################################
@dataclass(frozen=True, eq=False)
class Trajectory(PrettyPrinter):
    """
    The states of each tracked computational basis state at every step boundary.

    :param times: The S + 1 step boundaries.
    :param states: Map of initial state label (``01``, optionally ``10``, and ``11``)
        to its states, shape (S + 1, d).
    :param labels: Map of initial state label to the basis labels of its states.
    """
    times: RealArray
    states: Mapping[str, ComplexArray]
    labels: Mapping[str, tuple[str, ...]]

    @property
    def keys(self) -> tuple[str, ...]:
        return tuple(self.states)

    @property
    def excitations(self) -> dict[str, RealArray]:
        """Rydberg excitation count of each basis state, per tracked state"""
        return {key: excitation_counts(labels) for key, labels in self.labels.items()}

    def norms(self) -> dict[str, RealArray]:
        """The norm of each tracked state at every step boundary"""
        return {key: np.linalg.norm(states, axis=-1) for key, states in self.states.items()}

    def amplitude(self, key: str, label: str | None = None, step: int = -1) -> complex:
        """The amplitude of ``label`` (default ``key`` itself) in the tracked state ``key`` at ``step``"""
        labels = self.labels[key]
        return complex(self.states[key][step][labels.index(label or key)])

    def rydberg_population(self, key: str) -> RealArray:
        """Expected number of atoms in a Rydberg level over time for the tracked state ``key``"""
        populations = np.abs(self.states[key]) ** 2
        return populations @ excitation_counts(self.labels[key])

    def as_dict(self) -> dict[str, Any]:
        return {"times": self.times, "states": dict(self.states), "labels": dict(self.labels)}


def evolve(
        pulse: Pulse, model: GateModel, full_space: bool = False, family: HamiltonianFamily | None = None
) -> Trajectory:
    """
    Evolve the computational states under the piecewise-constant controls of ``pulse``.

    By default |01> and |11> are evolved in their reduced sector blocks.
    |00> has no dynamics and |10> mirrors |01> by exchange symmetry so neither is propagated.

    :param full_space: Evolve |01>, |10> and |11> in the full product space instead.
    :param family: Override the Hamiltonian family selected for the model and pulse.
    """
    family = family or family_for(model, pulse)

    if full_space:
        steps = family.steps(Sector.FULL)
        propagators = step_propagators(steps.hamiltonians, steps.dts)
        initial = np.stack([steps.initial_state(key) for key in FULL_KEYS], axis=1)
        batch = propagate(propagators, initial)

        states = {key: batch[:, :, i] for i, key in enumerate(FULL_KEYS)}
        labels = {key: steps.labels for key in FULL_KEYS}
        times = _boundaries(steps.dts)
    else:
        states, labels = {}, {}
        times = None
        for key, sector in zip(REDUCED_KEYS, (Sector.S01, Sector.S11)):
            steps = family.steps(sector)
            propagators = step_propagators(steps.hamiltonians, steps.dts)
            states[key] = propagate(propagators, steps.initial_state())
            labels[key] = steps.labels
            times = _boundaries(steps.dts)

    return Trajectory(times=times, states=states, labels=labels)


def evolve_steps(steps: SectorSteps) -> ComplexArray:
    """Evolve the computational state of a single sector, returning the states at every boundary"""
    return propagate(step_propagators(steps.hamiltonians, steps.dts), steps.initial_state())


def _boundaries(dts: RealArray) -> RealArray:
    return np.concatenate([[0.0], np.cumsum(dts)])


###########################################################################
## Metrics
###########################################################################
def final_amplitudes(trajectory: Trajectory) -> tuple[complex, complex, complex]:
    """
    The diagonal gate amplitudes (a01, a10, a11) at the end of ``trajectory``.
    a10 equals a01 when |10> is not tracked.
    """
    a01 = trajectory.amplitude("01")
    a10 = trajectory.amplitude("10") if "10" in trajectory.states else a01
    a11 = trajectory.amplitude("11")
    return a01, a10, a11


def bell_overlap(a01: complex, a10: complex, a11: complex, theta: float) -> complex:
    """The overlap <ψ_θ|U|++> of the evolved |++> with the Bell state targeted by CZ(θ)"""
    phase = np.exp(-1j * theta)
    return (1 + phase * (a01 + a10) - phase ** 2 * a11) / 4


def bell_fidelity(trajectory: Trajectory, theta: float) -> float:
    """
    The Bell-state fidelity F = |<ψ_θ|U|++>|² assembled from the final sector amplitudes.

    Norm lost to decay is not renormalised and counts as error.
    """
    return float(np.abs(bell_overlap(*final_amplitudes(trajectory), theta=theta)) ** 2)


def rydberg_time(trajectory: Trajectory) -> float:
    """
    The time T^R spent in the Rydberg manifold, averaged over the four computational states.

    Integrates the expected number of excited atoms with the trapezoid rule on the step boundaries.
    |01> counts twice when |10> is not tracked and |00> never leaves the computational space.
    """
    total = 0.0
    for key in trajectory.states:
        weight = 2.0 if key == "01" and "10" not in trajectory.states else 1.0
        total += weight * trapezoid(trajectory.rydberg_population(key), trajectory.times)
    return float(total / 4)


def leakage(trajectory: Trajectory) -> dict[str, float]:
    """Population of each tracked state left outside its computational basis state at the end"""
    return {key: 1.0 - abs(trajectory.amplitude(key)) ** 2 for key in trajectory.states}

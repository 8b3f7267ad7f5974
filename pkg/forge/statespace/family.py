"""
Hamiltonian families map a :py:class:`Pulse` onto per-sector stacks of step Hamiltonians.

A family also supplies the derivative of every step Hamiltonian with respect to its controls,
which is all the gradient machinery needs to know about the physics.
"""
from abc import ABCMeta, abstractmethod
from collections.abc import Mapping, Collection
from dataclasses import dataclass
from typing import Any

import numpy as np

from forge.printer import PrettyPrinter
from forge.statespace.basis import FOUR_LEVEL_STATES, BLOCKADE_STATES
from forge.statespace.exception import SectorError, ModelValidationError
from forge.statespace.hamiltonian import sector_terms, combine, static_coefficients, OperatorTerms
from forge.statespace.model import GateModel, GateScheme, Pulse, Sector, excitation_counts
from forge.types import ComplexArray, RealArray


@dataclass(frozen=True, eq=False)
class SectorSteps(PrettyPrinter):
    """
    The piecewise-constant Hamiltonian of one sector.

    :param hamiltonians: Stack of S step Hamiltonians with shape (S, d, d).
    :param dts: The S step durations.
    :param derivatives: Map of control name to ∂H/∂c for each of the N controlled steps, shape (N, d, d).
    :param delta_o_operator: ∂H/∂Δ_o, shared by every step.
    :param control_slice: The positions of the N controlled steps within the S steps.
    """
    sector: Sector
    labels: tuple[str, ...]
    hamiltonians: ComplexArray
    dts: RealArray
    derivatives: Mapping[str, ComplexArray]
    delta_o_operator: ComplexArray
    control_slice: slice

    @property
    def dim(self) -> int:
        return len(self.labels)

    @property
    def n_steps(self) -> int:
        return len(self.dts)

    @property
    def excitations(self) -> RealArray:
        return excitation_counts(self.labels)

    def initial_state(self, label: str | None = None) -> ComplexArray:
        """The basis vector of ``label``, defaulting to the computational state of this sector"""
        label = label or self.sector.label
        try:
            index = self.labels.index(label)
        except ValueError:
            raise SectorError(f"{label!r} is not a state of sector {self.sector.label}")

        state = np.zeros(self.dim, dtype=complex)
        state[index] = 1
        return state

    def as_dict(self) -> dict[str, Any]:
        return {
            "sector": self.sector,
            "labels": self.labels,
            "n_steps": self.n_steps,
            "controls": tuple(self.derivatives),
        }


class HamiltonianFamily(PrettyPrinter, metaclass=ABCMeta):
    """
    Base class for a parametrised Hamiltonian driven by the controls of a :py:class:`Pulse`.

    :param model: The physical model.
    :param pulse: The pulse whose controls drive the Hamiltonian.
    """

    __slots__ = ("model", "pulse")

    #: The single-atom levels of this family
    states: tuple[str, ...] = FOUR_LEVEL_STATES
    #: The names of the pulse controls this family reads
    controls: tuple[str, ...] = ()

    def __init__(self, model: GateModel, pulse: Pulse):
        missing = [name for name in self.controls if name not in pulse.controls]
        if missing:
            raise ModelValidationError(
                "controls", f"{self.__class__.__name__} needs controls {", ".join(missing)} on the pulse"
            )

        self.model = model
        self.pulse = pulse

    def sector_terms(self, sector: Sector) -> tuple[tuple[str, ...], OperatorTerms]:
        """The labels and projected operator terms of ``sector``"""
        infinite_j = self.model.infinite_j and "r2" in self.states and sector != Sector.S01
        return sector_terms(sector, self.states, infinite_j)

    @abstractmethod
    def steps(self, sector: Sector | str) -> SectorSteps:
        """Build the step Hamiltonians of ``sector``"""
        raise NotImplementedError

    def _uniform_steps(
            self,
            sector: Sector,
            labels: tuple[str, ...],
            static: ComplexArray,
            varying: Mapping[str, tuple[RealArray, ComplexArray]],
            derivatives: Mapping[str, ComplexArray],
            delta_o_operator: ComplexArray,
    ) -> SectorSteps:
        """
        Assemble N equal steps H_n = static + Σ_k c_k[n]·T_k.

        :param varying: Map of term name to (coefficients over steps, term matrix).
        """
        n_steps = self.pulse.n_steps
        stack = np.broadcast_to(static, (n_steps,) + static.shape).copy()
        for coefficients, term in varying.values():
            stack += np.asarray(coefficients)[:, None, None] * term

        return SectorSteps(
            sector=sector,
            labels=labels,
            hamiltonians=stack,
            dts=np.full(n_steps, self.pulse.dt),
            derivatives=derivatives,
            delta_o_operator=delta_o_operator,
            control_slice=slice(0, n_steps),
        )

    def as_dict(self) -> dict[str, Any]:
        return {"model": self.model, "pulse": self.pulse}


def _constant(term: ComplexArray, n_steps: int) -> ComplexArray:
    return np.broadcast_to(term, (n_steps,) + term.shape)


###########################################################################
## Implementations
###########################################################################
class FourLevelFamily(HamiltonianFamily):
    """
    Two four-level atoms in the lab frame with the microwave phase φ_mw(t)
    and amplitude Ω_mw(t) as controls.
    """

    __slots__ = ()

    controls = ("phi_mw", "omega_mw")

    def steps(self, sector: Sector | str) -> SectorSteps:
        sector = Sector.parse(sector)
        labels, terms = self.sector_terms(sector)

        coefficients = static_coefficients(self.model) | {"detuning": self.pulse.delta_o}
        static = combine(terms, coefficients)

        phi, omega = self.pulse.phi_mw, self.pulse.omega_mw
        cos, sin = np.cos(phi)[:, None, None], np.sin(phi)[:, None, None]
        mw_x, mw_y = terms["mw_x"], terms["mw_y"]

        derivatives = {
            "phi_mw": omega[:, None, None] * (-sin * mw_x + cos * mw_y),
            "omega_mw": cos * mw_x + sin * mw_y,
        }
        varying = {"mw_x": (omega * np.cos(phi), mw_x), "mw_y": (omega * np.sin(phi), mw_y)}
        return self._uniform_steps(sector, labels, static, varying, derivatives, terms["detuning"])


class EffectiveVdwFamily(HamiltonianFamily):
    """
    The effective single-Rydberg-level model reached for J, Ω_mw -> ∞, driven by 1/τ(t).

    Detuning Δ(t) = Δ_o - 1/(4τ) and interaction V(t) = -1/(2τ).
    """

    __slots__ = ()

    states = BLOCKADE_STATES
    controls = ("inv_tau",)

    def steps(self, sector: Sector | str) -> SectorSteps:
        sector = Sector.parse(sector)
        labels, terms = self.sector_terms(sector)

        static = combine(terms, {
            "laser_x": self.model.omega_o,
            "detuning": self.pulse.delta_o,
            "decay_1": self.model.gamma_1,
        })

        inv_tau = self.pulse.control("inv_tau")
        slope = -0.25 * terms["detuning"] - 0.5 * terms["v11"]
        derivatives = {"inv_tau": _constant(slope, self.pulse.n_steps)}
        varying = {"inv_tau": (inv_tau, slope)}
        return self._uniform_steps(sector, labels, static, varying, derivatives, terms["detuning"])


class BlockadeFamily(HamiltonianFamily):
    """
    The single-Rydberg-level van der Waals baseline with constant laser amplitude,
    interaction V = ``model.v11`` and the laser phase φ_o(t) as control.
    """

    __slots__ = ()

    states = BLOCKADE_STATES
    controls = ("phi_o",)

    def steps(self, sector: Sector | str) -> SectorSteps:
        sector = Sector.parse(sector)
        labels, terms = self.sector_terms(sector)

        static = combine(terms, {
            "detuning": self.pulse.delta_o,
            "v11": self.model.v11,
            "decay_1": self.model.gamma_1,
        })

        phi = self.pulse.control("phi_o")
        omega = self.model.omega_o
        cos, sin = np.cos(phi)[:, None, None], np.sin(phi)[:, None, None]
        laser_x, laser_y = terms["laser_x"], terms["laser_y"]

        derivatives = {"phi_o": omega * (-sin * laser_x + cos * laser_y)}
        varying = {"laser_x": (omega * np.cos(phi), laser_x), "laser_y": (omega * np.sin(phi), laser_y)}
        return self._uniform_steps(sector, labels, static, varying, derivatives, terms["detuning"])


class PiecewiseFamily(HamiltonianFamily):
    """
    Three-segment sequence in the rotated frame: an optical π-pulse, a microwave segment
    of duration ``pulse.total_time`` driven by Δ_mw(t) at amplitude Ω_mw(t), and a second π-pulse.

    :param laser_in_middle: Keep the optical drive on during the microwave segment.
    :param outer_time: Duration of each optical segment, defaulting to a π-pulse.
    """

    __slots__ = ("laser_in_middle", "outer_time")

    controls = ("delta_mw", "omega_mw")

    def __init__(
            self, model: GateModel, pulse: Pulse, laser_in_middle: bool = False, outer_time: float | None = None
    ):
        super().__init__(model=model, pulse=pulse)
        if model.omega_o <= 0:
            raise ModelValidationError("omega_o", "π-pulses need a positive optical Rabi frequency")
        if outer_time is not None and outer_time < 0:
            raise ModelValidationError("outer_time", "must be >= 0")

        self.laser_in_middle = laser_in_middle
        self.outer_time = self.pi_time if outer_time is None else float(outer_time)

    @property
    def pi_time(self) -> float:
        """Duration of an optical π-pulse"""
        return np.pi / self.model.omega_o

    def steps(self, sector: Sector | str) -> SectorSteps:
        sector = Sector.parse(sector)
        labels, terms = self.sector_terms(sector)
        n_steps = self.pulse.n_steps

        coefficients = static_coefficients(self.model) | {"detuning": self.pulse.delta_o}
        laser_on = combine(terms, coefficients)
        middle = laser_on if self.laser_in_middle else combine(terms, coefficients | {"laser_x": 0.0})

        delta_mw, omega_mw = self.pulse.control("delta_mw"), self.pulse.control("omega_mw")
        mw_x, mw_detuning = terms["mw_x"], terms["mw_detuning"]
        segment = (
                middle[None]
                + omega_mw[:, None, None] * mw_x
                + delta_mw[:, None, None] * mw_detuning
        )

        return SectorSteps(
            sector=sector,
            labels=labels,
            hamiltonians=np.concatenate([laser_on[None], segment, laser_on[None]]),
            dts=np.concatenate([[self.outer_time], np.full(n_steps, self.pulse.dt), [self.outer_time]]),
            derivatives={
                "delta_mw": _constant(mw_detuning, n_steps),
                "omega_mw": _constant(mw_x, n_steps),
            },
            delta_o_operator=terms["detuning"],
            control_slice=slice(1, n_steps + 1),
        )

    def as_dict(self) -> dict[str, Any]:
        return super().as_dict() | {"laser_in_middle": self.laser_in_middle, "outer_time": self.outer_time}


_SCHEME_FAMILIES: dict[GateScheme, type[HamiltonianFamily]] = {
    GateScheme.FOUR_LEVEL: FourLevelFamily,
    GateScheme.EFFECTIVE_VDW: EffectiveVdwFamily,
    GateScheme.BLOCKADE: BlockadeFamily,
}


def family_for(model: GateModel, pulse: Pulse, **kwargs) -> HamiltonianFamily:
    """
    Select the Hamiltonian family for a ``model`` and ``pulse``.

    The family follows the model's scheme. A four-level model driven by a pulse without
    microwave phase samples falls back to the family owning the pulse's controls:
    ``delta_mw`` selects the piecewise sequence, ``inv_tau`` the effective model
    and ``phi_o`` the blockade baseline.
    """
    if model.scheme != GateScheme.FOUR_LEVEL or "phi_mw" in pulse.controls:
        return _SCHEME_FAMILIES[model.scheme](model=model, pulse=pulse)

    if "delta_mw" in pulse.controls:
        return PiecewiseFamily(model=model, pulse=pulse, **kwargs)
    if "inv_tau" in pulse.controls:
        return EffectiveVdwFamily(model=model, pulse=pulse)
    if "phi_o" in pulse.controls:
        return BlockadeFamily(model=model, pulse=pulse)
    return FourLevelFamily(model=model, pulse=pulse)


def default_controls(model: GateModel, pulse: Pulse | None = None) -> Collection[str]:
    """The controls a family optimises when none are given explicitly"""
    if pulse is not None and "delta_mw" in pulse.controls:
        return ("delta_mw",)
    return {
        GateScheme.FOUR_LEVEL: ("phi_mw", "omega_mw"),
        GateScheme.EFFECTIVE_VDW: ("inv_tau",),
        GateScheme.BLOCKADE: ("phi_o",),
    }[model.scheme]

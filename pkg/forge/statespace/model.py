"""
Core domain types: the physical gate model, sampled pulses and Hamiltonian blocks.

Units are internal throughout: ħ = 1 and the optical Rabi frequency sets the energy scale,
so times are in 1/Ω_o and energies in Ω_o.
"""
from collections.abc import Mapping
from dataclasses import dataclass, field, replace, fields
from typing import Any, Self

import numpy as np

from forge.exception import ForgeKeyError
from forge.printer import PrettyPrinter
from forge.statespace.exception import ModelValidationError
from forge.types import ForgeEnum, RealArray, ComplexArray


class Sector(ForgeEnum):
    """
    Invariant subspaces of the two-atom Hilbert space.

    Each sector is labelled by the computational state it evolves.
    ``FULL`` is the unreduced product space.
    """
    FULL = 0
    S01 = 1
    S10 = 2
    S11 = 3

    @property
    def label(self) -> str:
        """The computational basis label evolved in this sector"""
        return {Sector.S01: "01", Sector.S10: "10", Sector.S11: "11"}.get(self, "full")

    @classmethod
    def parse(cls, value: Self | str | int) -> Self:
        if isinstance(value, cls):
            return value
        value = str(value).strip()
        if value in {"01", "10", "11"}:
            return cls[f"S{value}"]
        return cls.from_name(value)[0]


class GateScheme(ForgeEnum):
    """The family of Hamiltonians used to model the gate"""
    FOUR_LEVEL = 0
    EFFECTIVE_VDW = 1
    BLOCKADE = 2


def _as_readonly_array(value: Any, name: str) -> RealArray:
    try:
        array = np.array(value, dtype=float, copy=True).reshape(-1)
    except (TypeError, ValueError) as ex:
        raise ModelValidationError(name, "samples must be numbers") from ex
    if not np.all(np.isfinite(array)):
        raise ModelValidationError(name, "all samples must be finite")
    array.setflags(write=False)
    return array


###########################################################################
## Gate model
###########################################################################
@dataclass(frozen=True)
class GateModel(PrettyPrinter):
    """
    Physical parameters defining the gate Hamiltonian, all in units of the optical Rabi frequency.

    :param omega_o: Optical Rabi frequency. The internal unit, normally 1.
    :param delta_o: Optical detuning.
    :param j_exchange: Resonant dipole-dipole (flip-flop) strength J.
    :param v11: van der Waals shift of |r1 r1>.
    :param v12: van der Waals shift of |r1 r2> and |r2 r1>.
    :param v22: van der Waals shift of |r2 r2>.
    :param infinite_j: Project out |r1 r2>, |r2 r1> and |r2 r2> (the J -> infinity limit).
    :param gamma_1: Decay rate of |r1>, attached as a non-Hermitian term.
    :param gamma_2: Decay rate of |r2>, attached as a non-Hermitian term.
    :param scheme: The Hamiltonian family. For :py:attr:`GateScheme.BLOCKADE`,
        ``v11`` is the interaction of the single Rydberg level.
    """
    omega_o: float = 1.0
    delta_o: float = 0.0
    j_exchange: float = 10.0
    v11: float = 0.0
    v12: float = 0.0
    v22: float = 0.0
    infinite_j: bool = False
    gamma_1: float = 0.0
    gamma_2: float = 0.0
    scheme: GateScheme = GateScheme.FOUR_LEVEL

    def __post_init__(self):
        object.__setattr__(self, "scheme", GateScheme.parse(self.scheme))
        object.__setattr__(self, "infinite_j", bool(self.infinite_j))

        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, float | int) and not isinstance(value, bool):
                if not np.isfinite(value):
                    raise ModelValidationError(f.name, "must be finite")
                object.__setattr__(self, f.name, float(value))

        if self.omega_o < 0:
            raise ModelValidationError("omega_o", "must be non-negative")
        if self.gamma_1 < 0 or self.gamma_2 < 0:
            raise ModelValidationError("gamma_1" if self.gamma_1 < 0 else "gamma_2", "decay rates must be >= 0")
        if self.scheme == GateScheme.FOUR_LEVEL and not self.infinite_j and self.j_exchange <= 0:
            raise ModelValidationError("j_exchange", "must be > 0 when infinite_j is false")

    @property
    def has_decay(self) -> bool:
        """Whether non-Hermitian decay terms are attached"""
        return self.gamma_1 > 0 or self.gamma_2 > 0

    def with_fluctuation(self, x: float) -> Self:
        """
        Return the model at a relative distance fluctuation ``x`` = δR/R.

        Resonant exchange scales as 1/R³ and van der Waals as 1/R⁶, so to first order
        J -> J(1 - 3x) and V_ij -> V_ij(1 - 6x).
        """
        return replace(
            self,
            j_exchange=self.j_exchange * (1 - 3 * x),
            v11=self.v11 * (1 - 6 * x),
            v12=self.v12 * (1 - 6 * x),
            v22=self.v22 * (1 - 6 * x),
        )

    def without_decay(self) -> Self:
        """Return this model with all decay rates set to zero"""
        return replace(self, gamma_1=0.0, gamma_2=0.0)

    def as_dict(self) -> dict[str, Any]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


###########################################################################
## Pulses
###########################################################################
@dataclass(frozen=True, eq=False)
class Pulse(PrettyPrinter):
    """
    Piecewise-constant control samples on the midpoint grid t_i = (i + 1/2)·T/N.

    Control arrays are stored by name so that every Hamiltonian family exchanges the same type:
    ``phi_mw``/``omega_mw`` for the four-level model, ``inv_tau`` for the effective model,
    ``phi_o`` for the blockade baseline and ``delta_mw`` for the piecewise middle segment.

    :param total_time: Duration T in units of 1/Ω_o.
    :param controls: Map of control name to N samples.
    :param delta_o: Optical detuning.
    :param theta: Single-qubit angle of the target CZ(θ).
    """
    total_time: float
    controls: Mapping[str, RealArray]
    delta_o: float = 0.0
    theta: float = 0.0

    def __post_init__(self):
        if not self.controls:
            raise ModelValidationError("controls", "at least one control is required")
        controls = {str(name): _as_readonly_array(values, name) for name, values in self.controls.items()}

        lengths = {name: len(values) for name, values in controls.items()}
        n_steps = next(iter(lengths.values()))
        if n_steps < 1:
            raise ModelValidationError("n_steps", "must be a positive integer")
        for name, length in lengths.items():
            if length != n_steps:
                raise ModelValidationError(name, f"expected {n_steps} samples, got {length}")

        if "omega_mw" in controls and np.any(controls["omega_mw"] < 0):
            raise ModelValidationError("omega_mw", "microwave amplitude must be >= 0")
        if not np.isfinite(self.total_time) or self.total_time < 0:
            raise ModelValidationError("total_time", "must be finite and >= 0")
        for name in ("delta_o", "theta"):
            if not np.isfinite(getattr(self, name)):
                raise ModelValidationError(name, "must be finite")

        object.__setattr__(self, "controls", controls)
        object.__setattr__(self, "total_time", float(self.total_time))
        object.__setattr__(self, "delta_o", float(self.delta_o))
        object.__setattr__(self, "theta", float(self.theta))

    @property
    def n_steps(self) -> int:
        """Number of piecewise-constant steps N"""
        return len(next(iter(self.controls.values())))

    @property
    def dt(self) -> float:
        """Duration of a single step"""
        return self.total_time / self.n_steps

    @property
    def phi_mw(self) -> RealArray:
        """Microwave phase samples"""
        return self.control("phi_mw")

    @property
    def omega_mw(self) -> RealArray:
        """Microwave amplitude samples"""
        return self.control("omega_mw")

    def control(self, name: str) -> RealArray:
        """Get the samples of the control called ``name``"""
        try:
            return self.controls[name]
        except KeyError:
            raise ForgeKeyError(f"Pulse has no control {name!r}. Available: {", ".join(self.controls)}")

    def midpoints(self) -> RealArray:
        """The N sample times t_i = (i + 1/2)·T/N"""
        return (np.arange(self.n_steps) + 0.5) * self.dt

    def grid(self) -> RealArray:
        """The N + 1 step boundaries"""
        return np.linspace(0.0, self.total_time, self.n_steps + 1)

    def with_time(self, total_time: float) -> Self:
        """Return this pulse stretched to ``total_time`` keeping samples on the normalised grid"""
        return replace(self, total_time=total_time)

    def with_controls(self, **controls: Any) -> Self:
        """Return a copy with the given controls replaced or added"""
        return replace(self, controls=dict(self.controls) | controls)

    def with_scalars(self, delta_o: float | None = None, theta: float | None = None) -> Self:
        """Return a copy with new scalar parameters"""
        return replace(
            self,
            delta_o=self.delta_o if delta_o is None else delta_o,
            theta=self.theta if theta is None else theta,
        )

    def resampled(self, n_steps: int, kind: str = "hold") -> Self:
        """
        Resample the controls onto ``n_steps`` steps over the same duration.

        :param kind: ``hold`` keeps the piecewise-constant shape exactly (grid refinement).
            ``linear`` linearly interpolates between midpoints (smooth warm starts).
        """
        if n_steps < 1:
            raise ModelValidationError("n_steps", "must be a positive integer")

        new_mid = (np.arange(n_steps) + 0.5) / n_steps
        old_mid = (np.arange(self.n_steps) + 0.5) / self.n_steps

        if kind == "hold":
            index = np.minimum((new_mid * self.n_steps).astype(int), self.n_steps - 1)
            controls = {name: values[index] for name, values in self.controls.items()}
        elif kind == "linear":
            controls = {name: np.interp(new_mid, old_mid, values) for name, values in self.controls.items()}
        else:
            raise ModelValidationError("kind", f"unknown resampling {kind!r}")

        return replace(self, controls=controls)

    def as_dict(self) -> dict[str, Any]:
        return {
            "n_steps": self.n_steps,
            "total_time": self.total_time,
            "delta_o": self.delta_o,
            "theta": self.theta,
            "controls": dict(self.controls),
        }


@dataclass(frozen=True, eq=False)
class EffectiveVdwControls(PrettyPrinter):
    """
    Controls of the effective van der Waals model obtained in the large J and Ω_mw limit.

    The microwave enters only through 1/τ = Ω_mw²/Δ_mw which sets an effective
    interaction V = -1/(2τ) and detuning Δ = Δ_o - 1/(4τ).
    1/τ may take any real value, including zero.
    """
    inv_tau: RealArray
    delta_o: float = 0.0
    theta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "inv_tau", _as_readonly_array(self.inv_tau, "inv_tau"))

    @property
    def n_steps(self) -> int:
        return len(self.inv_tau)

    @property
    def v(self) -> RealArray:
        """Effective interaction V(t) = -1/(2τ)"""
        return -0.5 * self.inv_tau

    @property
    def delta(self) -> RealArray:
        """Effective detuning Δ(t) = Δ_o - 1/(4τ)"""
        return self.delta_o - 0.25 * self.inv_tau

    def to_pulse(self, total_time: float) -> Pulse:
        """Convert to a :py:class:`Pulse` carrying the ``inv_tau`` control"""
        return Pulse(total_time=total_time, controls={"inv_tau": self.inv_tau}, delta_o=self.delta_o, theta=self.theta)

    @classmethod
    def from_pulse(cls, pulse: Pulse) -> Self:
        """Extract effective controls from a pulse carrying the ``inv_tau`` control"""
        return cls(inv_tau=pulse.control("inv_tau"), delta_o=pulse.delta_o, theta=pulse.theta)

    def as_dict(self) -> dict[str, Any]:
        return {"n_steps": self.n_steps, "inv_tau": self.inv_tau, "delta_o": self.delta_o, "theta": self.theta}


###########################################################################
## Hamiltonian blocks
###########################################################################
@dataclass(frozen=True, eq=False)
class HamiltonianBlock(PrettyPrinter):
    """A Hamiltonian restricted to an ordered, labelled basis"""
    labels: tuple[str, ...]
    matrix: ComplexArray
    sector: Sector = Sector.FULL
    _excitations: RealArray = field(init=False, repr=False)

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=complex)
        labels = tuple(self.labels)
        if matrix.shape != (len(labels), len(labels)):
            raise ModelValidationError("matrix", f"shape {matrix.shape} does not match {len(labels)} labels")

        matrix.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "sector", Sector.parse(self.sector))
        object.__setattr__(self, "_excitations", excitation_counts(labels))

    @property
    def dim(self) -> int:
        return len(self.labels)

    @property
    def excitations(self) -> RealArray:
        """Number of atoms in a Rydberg level for each basis state"""
        return self._excitations

    def is_hermitian(self, atol: float = 1e-12) -> bool:
        """Whether the matrix equals its conjugate transpose entrywise within ``atol``"""
        return bool(np.allclose(self.matrix, self.matrix.conj().T, rtol=0, atol=atol))

    def index(self, label: str) -> int:
        """The position of ``label`` in this block's basis"""
        try:
            return self.labels.index(label)
        except ValueError:
            raise ForgeKeyError(f"{label!r} not in basis {self.labels}")

    def as_dict(self) -> dict[str, Any]:
        return {"sector": self.sector, "labels": self.labels, "matrix": self.matrix}


def excitation_counts(labels: tuple[str, ...]) -> RealArray:
    """Count the atoms in a Rydberg level for each basis label, e.g. 'r1r2+' -> 2"""
    return np.array([label.count("r") for label in labels], dtype=float)

"""
Physical parameters of atomic motion and Rydberg decay, and the thermal motional ensemble.
"""
from collections.abc import Mapping
from dataclasses import dataclass, replace, fields
from typing import Any, Self, TYPE_CHECKING

import numpy as np
from scipy import constants

from forge.noise.exception import NoiseModelError
from forge.printer import PrettyPrinter
from forge.types import RealArray

if TYPE_CHECKING:
    from forge.catalog.tables import SpeciesRow

#: Atomic masses of the supported isotopes in unified atomic mass units
SPECIES_MASS_U: Mapping[str, float] = {"Rb": 86.909180531, "Cs": 132.905451958}
#: Wavelength of the single-photon optical transition to |r1> per species in m
OPTICAL_WAVELENGTH: Mapping[str, float] = {"Rb": 297e-9, "Cs": 319e-9}
#: Wavelength of the microwave |r1> <-> |r2> transition in m
MICROWAVE_WAVELENGTH = 1e-2


def species_mass(species: str) -> float:
    """The mass of ``species`` in kg"""
    try:
        return SPECIES_MASS_U[species] * constants.atomic_mass
    except KeyError:
        raise NoiseModelError("species", f"unknown species {species!r}. Choose from: {", ".join(SPECIES_MASS_U)}")


@dataclass(frozen=True)
class NoiseModel(PrettyPrinter):
    """
    Physical parameters of the noisy gate simulation. All quantities are in SI units.

    :param omega_trap: Angular trap frequency in rad/s. The trap is off during the gate.
    :param temperature: Temperature of the initial thermal motional state in K.
    :param fock_cutoff: Number of motional Fock states kept per atom.
    :param mass: Atomic mass in kg.
    :param lambda_o: Wavelength of the optical transition in m.
    :param lambda_mw: Wavelength of the microwave transition in m.
    :param distance: Interatomic distance R in m.
    :param gamma_1: Decay rate of |r1> in 1/s.
    :param gamma_2: Decay rate of |r2> in 1/s.
    :param gamma_e: Decay rate of the intermediate level of a two-photon ladder in 1/s.
        Taken from the two-photon model when not given.
    :param omega_o: Optical Rabi frequency in rad/s, the unit of the gate Hamiltonian.
    :param weight_floor: Thermal configurations below this joint weight are dropped.
    :param recoil: Dress every drive with its photon recoil.
    :param fluctuations: Modulate J and V_ij with the interatomic distance fluctuations.
    :param decay: Attach the decay rates as non-Hermitian terms.
    :param project_motion: Project the final motional state onto its freely evolved initial state
        instead of tracing it out.
    """
    omega_trap: float = 2 * np.pi * 100e3
    temperature: float = 2e-6
    fock_cutoff: int = 8
    mass: float = SPECIES_MASS_U["Rb"] * constants.atomic_mass
    lambda_o: float = OPTICAL_WAVELENGTH["Rb"]
    lambda_mw: float = MICROWAVE_WAVELENGTH
    distance: float = 2.51e-6
    gamma_1: float = 0.0
    gamma_2: float = 0.0
    gamma_e: float | None = None
    omega_o: float = 2 * np.pi * 5e6
    weight_floor: float = 1e-4
    recoil: bool = True
    fluctuations: bool = True
    decay: bool = True
    project_motion: bool = False

    def __post_init__(self):
        object.__setattr__(self, "fock_cutoff", int(self.fock_cutoff))
        self.validate()

    def validate(self) -> None:
        """
        Check every field.

        :raise NoiseModelError: Naming the first invalid field.
        """
        if self.fock_cutoff < 2:
            raise NoiseModelError("fock_cutoff", "at least 2 motional states are needed per atom")
        for name in ("omega_trap", "mass", "lambda_o", "lambda_mw", "distance", "omega_o"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise NoiseModelError(name, "must be finite and > 0")
        for name in ("temperature", "gamma_1", "gamma_2"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value >= 0):
                raise NoiseModelError(name, "must be finite and >= 0")
        if self.gamma_e is not None and not (np.isfinite(self.gamma_e) and self.gamma_e >= 0):
            raise NoiseModelError("gamma_e", "must be finite and >= 0")
        if not 0 <= self.weight_floor < 1:
            raise NoiseModelError("weight_floor", "must be in [0, 1)")

    ###########################################################################
    ## Derived quantities
    ###########################################################################
    @property
    def x_osc(self) -> float:
        """Oscillator length sqrt(ħ/(2mω)) in m"""
        return np.sqrt(constants.hbar / (2 * self.mass * self.omega_trap))

    @property
    def p_osc(self) -> float:
        """Oscillator momentum sqrt(ħmω/2) in kg·m/s"""
        return np.sqrt(constants.hbar * self.mass * self.omega_trap / 2)

    def lamb_dicke(self, wavelength: float) -> float:
        """The Lamb-Dicke parameter 2π·x_osc/λ of a drive at ``wavelength``"""
        return 2 * np.pi * self.x_osc / wavelength

    @property
    def eta_o(self) -> float:
        """Lamb-Dicke parameter of the optical transition"""
        return self.lamb_dicke(self.lambda_o)

    @property
    def eta_mw(self) -> float:
        """Lamb-Dicke parameter of the microwave transition"""
        return self.lamb_dicke(self.lambda_mw)

    @property
    def mean_occupation(self) -> float:
        """Mean thermal phonon number of the untruncated oscillator"""
        if self.temperature == 0:
            return 0.0
        return float(1 / np.expm1(constants.hbar * self.omega_trap / (constants.k * self.temperature)))

    @property
    def trap_ratio(self) -> float:
        """ω_trap/Ω_o"""
        return self.omega_trap / self.omega_o

    @property
    def fluctuation_scale(self) -> float:
        """x_osc/R, the relative distance fluctuation per unit of dimensionless position"""
        return self.x_osc / self.distance

    def rate(self, gamma: float) -> float:
        """A rate in 1/s in units of Ω_o"""
        return gamma / self.omega_o

    def with_cutoff(self, fock_cutoff: int) -> Self:
        return replace(self, fock_cutoff=fock_cutoff)

    ###########################################################################
    ## Constructors
    ###########################################################################
    @classmethod
    def for_species(cls, species: str, **overrides: Any) -> Self:
        """A model with the mass and optical wavelength of ``species``"""
        defaults = {"mass": species_mass(species), "lambda_o": OPTICAL_WAVELENGTH[species]}
        return cls(**defaults | overrides)

    @classmethod
    def from_row(cls, row: "SpeciesRow", omega_o_mhz: float = 5.0, **overrides: Any) -> Self:
        """
        A model for the atoms of a catalog row: its species, interatomic distance and lifetimes.

        :param omega_o_mhz: Ω_o/2π in MHz.
        """
        defaults = {
            "distance": row.distance_um * 1e-6,
            "gamma_1": 1e6 / row.gamma1_inv_us,
            "gamma_2": 1e6 / row.gamma2_inv_us,
            "omega_o": 2 * np.pi * omega_o_mhz * 1e6,
        }
        return cls.for_species(row.species, **defaults | overrides)

    def as_dict(self) -> dict[str, Any]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


###########################################################################
## Thermal ensemble
###########################################################################
@dataclass(frozen=True)
class ThermalConfiguration(PrettyPrinter):
    """A product of Fock states |n_A, n_B> and its weight in the thermal ensemble"""
    n_a: int
    n_b: int
    weight: float

    def as_dict(self) -> dict[str, Any]:
        return {"n_a": self.n_a, "n_b": self.n_b, "weight": self.weight}


def thermal_weights(noise: NoiseModel) -> RealArray:
    """Boltzmann weights of the first ``fock_cutoff`` Fock states of one atom, renormalised"""
    n = np.arange(noise.fock_cutoff)
    if noise.temperature == 0:
        return (n == 0).astype(float)

    energies = constants.hbar * noise.omega_trap * n / (constants.k * noise.temperature)
    weights = np.exp(-energies)
    return weights / weights.sum()


def thermal_configurations(noise: NoiseModel) -> tuple[ThermalConfiguration, ...]:
    """
    The joint configurations |n_A, n_B> whose weight is at least ``weight_floor``,
    renormalised over the kept configurations and ordered by decreasing weight.
    """
    weights = thermal_weights(noise)
    joint = np.outer(weights, weights)
    kept = [(int(a), int(b)) for a, b in zip(*np.nonzero((joint >= noise.weight_floor) & (joint > 0)))]
    total = sum(joint[a, b] for a, b in kept)

    configurations = [ThermalConfiguration(n_a=a, n_b=b, weight=float(joint[a, b] / total)) for a, b in kept]
    return tuple(sorted(configurations, key=lambda c: (-c.weight, c.n_a, c.n_b)))

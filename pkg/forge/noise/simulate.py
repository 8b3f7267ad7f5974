"""
Bell-state fidelity of a pulse under atomic motion, photon recoil, distance fluctuations and decay,
averaged over a thermal motional ensemble, and sweeps of it over physical parameters.
"""
import logging
import warnings
from collections.abc import Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np
import scipy.linalg
from scipy.sparse.linalg import expm_multiply

from forge.base import Result
from forge.exception import ForgeError
from forge.logger import ForgeLogger
from forge.noise.exception import NoiseError, CutoffConvergenceWarning
from forge.noise.generator import AtomModel, NoisyGenerator, noisy_generator, free_motion
from forge.noise.model import NoiseModel, ThermalConfiguration, thermal_configurations
from forge.printer import PrettyPrinter
from forge.processors import DynamicProcessor, dynamicprocessormethod
from forge.protocols.twophoton import TwoPhotonModel
from forge.statespace import Pulse, Sector
from forge.types import ComplexArray, RealArray

log: ForgeLogger = logging.getLogger(__name__)

#: Infidelity change on raising the Fock cutoff by 2 above which a warning is issued
CUTOFF_TOLERANCE = 1e-4
#: Sectors propagated with the gate generator. |00> only evolves under free motion.
GATE_SECTORS = (Sector.S01, Sector.S10, Sector.S11)


@dataclass(frozen=True)
class NoisyGateResult(Result):
    """
    The thermally averaged Bell-state infidelity of a pulse.

    :param infidelity: 1 - Σ_k w_k F_k over the thermal configurations.
    :param configurations: The thermal configurations with their weights.
    :param member_infidelities: 1 - F_k per configuration.
    :param norms: Final norm of each sector per configuration. Norm loss is counted as error.
    :param cutoff_sensitivity: Change of the infidelity on raising the cutoff by 2, when checked.
    """
    infidelity: float
    fidelity: float
    fock_cutoff: int
    cutoff_sensitivity: float | None
    configurations: tuple[ThermalConfiguration, ...] = field(repr=False)
    member_infidelities: RealArray = field(repr=False)
    norms: Mapping[str, RealArray] = field(repr=False)

    def table(self) -> list[dict[str, Any]]:
        """One row per thermal configuration"""
        return [
            {
                "n_a": config.n_a,
                "n_b": config.n_b,
                "weight_1": config.weight,
                "infidelity_1": float(infidelity),
                **{f"norm_{key}_1": float(norms[i]) for key, norms in self.norms.items()},
            }
            for i, (config, infidelity) in enumerate(zip(self.configurations, self.member_infidelities))
        ]


def _propagate_sector(
        generator: NoisyGenerator, pulse: Pulse, configurations: Sequence[ThermalConfiguration]
) -> tuple[ComplexArray, RealArray]:
    """
    Propagate every configuration of one sector as the columns of a single state matrix.

    :return: The final motional amplitudes of the computational internal state, shape (M², K),
        and the final norms of the full sector states.
    """
    label = generator.sector.label
    states = np.zeros((generator.dim, len(configurations)), dtype=complex)
    for column, config in enumerate(configurations):
        states[generator.basis_state(label, config.n_a, config.n_b), column] = 1

    omega_mw, phi_mw = pulse.omega_mw, pulse.phi_mw
    for n in range(pulse.n_steps):
        states = expm_multiply(-1j * pulse.dt * generator.at(omega_mw[n], phi_mw[n]), states)

    norms = np.sum(np.abs(states) ** 2, axis=0)
    return states[generator.internal_rows(label)], norms


def _free_amplitudes(
        noise: NoiseModel, total_time: float, configurations: Sequence[ThermalConfiguration]
) -> ComplexArray:
    """The motional states of |00> after free flight, shape (M², K)"""
    cutoff = noise.fock_cutoff
    columns = [config.n_a * cutoff + config.n_b for config in configurations]
    return scipy.linalg.expm(-1j * total_time * free_motion(noise))[:, columns]


def _fidelities(amplitudes: Mapping[str, ComplexArray], theta: float, project: bool) -> RealArray:
    """
    F_k = ||(φ00 + e^{-iθ}(φ01 + φ10) - e^{-2iθ}φ11)/4||² per configuration k,
    or its overlap with the freely evolved φ00 when projecting the motion.
    """
    phase = np.exp(-1j * theta)
    bell = (
            amplitudes["00"]
            + phase * (amplitudes["01"] + amplitudes["10"])
            - phase ** 2 * amplitudes["11"]
    ) / 4
    if project:
        return np.abs(np.sum(np.conj(amplitudes["00"]) * bell, axis=0)) ** 2
    return np.sum(np.abs(bell) ** 2, axis=0)


def _check_pulse(pulse: Pulse) -> None:
    missing = [name for name in ("phi_mw", "omega_mw") if name not in pulse.controls]
    if missing:
        raise NoiseError(f"Noisy simulations need a lab-frame microwave pulse, missing {", ".join(missing)}")


def simulate_noisy_gate(
        pulse: Pulse,
        model: AtomModel,
        noise: NoiseModel,
        check_cutoff: bool = False,
        threads: int = 1,
) -> NoisyGateResult:
    """
    Simulate a pulse with motion, recoil, distance fluctuations and decay.

    Each sector is propagated once with every thermal configuration batched as a column.
    Configurations are weighted by their renormalised thermal weights.

    :param model: A four-level :py:class:`GateModel` or a :py:class:`TwoPhotonModel`.
    :param check_cutoff: Rerun at ``fock_cutoff + 2`` and warn with :py:class:`CutoffConvergenceWarning`
        when the infidelity moves by more than :py:data:`CUTOFF_TOLERANCE`.
    :param threads: Workers used to propagate the three sectors.
    """
    _check_pulse(pulse)
    log.debug("Noisy gate simulation: START")
    configurations = thermal_configurations(noise)

    def run(sector: Sector) -> tuple[ComplexArray, RealArray]:
        generator = noisy_generator(model, noise, sector=sector, delta_o=pulse.delta_o)
        log.stat(f"Noisy sector {sector.label} | dim={generator.dim} | configurations={len(configurations)}")
        return _propagate_sector(generator, pulse, configurations)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=min(threads, len(GATE_SECTORS))) as executor:
            results = list(executor.map(run, GATE_SECTORS))
    else:
        results = [run(sector) for sector in GATE_SECTORS]

    amplitudes = {sector.label: amps for sector, (amps, _) in zip(GATE_SECTORS, results)}
    amplitudes["00"] = _free_amplitudes(noise, pulse.total_time, configurations)
    norms = {sector.label: norm for sector, (_, norm) in zip(GATE_SECTORS, results)}

    fidelities = _fidelities(amplitudes, pulse.theta, project=noise.project_motion)
    weights = np.array([config.weight for config in configurations])
    fidelity = float(np.dot(weights, fidelities))

    sensitivity = None
    if check_cutoff:
        raised = simulate_noisy_gate(pulse, model, noise.with_cutoff(noise.fock_cutoff + 2), threads=threads)
        sensitivity = abs(raised.infidelity - (1.0 - fidelity))
        if sensitivity > CUTOFF_TOLERANCE:
            warnings.warn(
                f"Infidelity changed by {sensitivity:.2e} on raising the Fock cutoff to {noise.fock_cutoff + 2}",
                CutoffConvergenceWarning,
            )

    log.debug("Noisy gate simulation: DONE")
    return NoisyGateResult(
        infidelity=1.0 - fidelity,
        fidelity=fidelity,
        fock_cutoff=noise.fock_cutoff,
        cutoff_sensitivity=sensitivity,
        configurations=configurations,
        member_infidelities=1.0 - fidelities,
        norms=norms,
    )


###########################################################################
## Sweeps
###########################################################################
@dataclass(frozen=True)
class SweepRow(PrettyPrinter):
    """
    One point of a noise sweep.

    :param value: The axis value in the axis unit, or the catalog key for species rows.
    :param status: ``ok`` or the error that stopped this point.
    """
    axis: str
    value: float | str
    pulse_name: str
    infidelity: float
    status: str = "ok"

    def as_dict(self) -> dict[str, Any]:
        return {
            "axis": self.axis,
            "value": self.value,
            "pulse_name": self.pulse_name,
            "infidelity": self.infidelity,
            "status": self.status,
        }


class NoiseSweeper(DynamicProcessor):
    """
    Sweeps the noisy infidelity of a set of pulses along one physical axis.

    Axes are ``trap_frequency`` (ω_trap/2π in kHz), ``rabi_frequency`` (Ω_o/2π in MHz)
    and ``species_row`` (catalog keys ``species:n:j_mhz[:state_pair]``). A failing point is
    logged and recorded with its error as status while the sweep continues.

    :param axis: The axis to sweep.
    :param model: The gate model shared by all points. Replaced by the catalog row on ``species_row``.
    :param noise: The noise model each point modifies.
    :param threads: Workers used within each simulation.
    """

    __slots__ = ("model", "noise", "threads")

    @classmethod
    def _processor_method_fmt(cls, name: str) -> str:
        return name.strip().casefold().replace("-", "_").lstrip("_")

    @property
    def axis(self) -> str:
        return self._processor_name

    def __init__(self, axis: str, model: AtomModel, noise: NoiseModel, threads: int = 1):
        super().__init__()
        self.model = model
        self.noise = noise
        self.threads = threads
        self._set_processor_name(axis)

    def __call__(self, grid: Sequence[Any], pulses: Mapping[str, Pulse]) -> list[SweepRow]:
        return self.sweep(grid, pulses)

    def sweep(self, grid: Sequence[Any], pulses: Mapping[str, Pulse]) -> list[SweepRow]:
        """Simulate every pulse at every grid value in order"""
        log.debug(f"Noise sweep over {self.axis}: START")
        points = [(value, name, pulse) for value in grid for name, pulse in pulses.items()]

        rows = []
        for value, name, pulse in log.get_synchronous_iterator(points, desc=f"Sweeping {self.axis}", unit="points"):
            try:
                model, noise = self._processor_method(value)
                result = simulate_noisy_gate(pulse, model, noise, threads=self.threads)
                rows.append(SweepRow(axis=self.axis, value=value, pulse_name=name, infidelity=result.infidelity))
                log.stat(f"Noise sweep | {self.axis}={value} | {name} | infidelity={result.infidelity:.3e}")
            except (ForgeError, np.linalg.LinAlgError, ArithmeticError) as ex:
                log.warning(f"Noise sweep point {self.axis}={value} for {name} failed: {ex}")
                rows.append(SweepRow(
                    axis=self.axis, value=value, pulse_name=name, infidelity=np.nan, status=f"{type(ex).__name__}: {ex}"
                ))

        log.debug(f"Noise sweep over {self.axis}: DONE")
        return rows

    @dynamicprocessormethod("trap")
    def trap_frequency(self, value: float) -> tuple[AtomModel, NoiseModel]:
        return self.model, replace(self.noise, omega_trap=2 * np.pi * float(value) * 1e3)

    @dynamicprocessormethod("rabi")
    def rabi_frequency(self, value: float) -> tuple[AtomModel, NoiseModel]:
        return self.model, replace(self.noise, omega_o=2 * np.pi * float(value) * 1e6)

    @dynamicprocessormethod("species")
    def species_row(self, value: str) -> tuple[AtomModel, NoiseModel]:
        from forge.catalog import lookup_key

        row = lookup_key(value)
        omega_o_mhz = self.noise.omega_o / (2 * np.pi * 1e6)
        overrides = {
            "omega_trap": self.noise.omega_trap,
            "temperature": self.noise.temperature,
            "fock_cutoff": self.noise.fock_cutoff,
            "weight_floor": self.noise.weight_floor,
            "recoil": self.noise.recoil,
            "fluctuations": self.noise.fluctuations,
            "decay": self.noise.decay,
            "project_motion": self.noise.project_motion,
        }
        noise = NoiseModel.from_row(row, omega_o_mhz=omega_o_mhz, **overrides)

        gate = row.to_model(omega_o_mhz)
        if isinstance(self.model, TwoPhotonModel):
            return replace(self.model, gate=gate), noise
        return replace(gate, delta_o=self.model.delta_o), noise

    def as_dict(self) -> dict[str, Any]:
        return {"axis": self.axis, "model": self.model, "noise": self.noise, "threads": self.threads}


def sweep(
        axis: str,
        grid: Sequence[Any],
        pulses: Mapping[str, Pulse],
        model: AtomModel,
        noise: NoiseModel,
        threads: int = 1,
) -> list[SweepRow]:
    """Sweep the noisy infidelity of ``pulses`` over ``grid`` along ``axis``"""
    return NoiseSweeper(axis, model=model, noise=noise, threads=threads)(grid, pulses)

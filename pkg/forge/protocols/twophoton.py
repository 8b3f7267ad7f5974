"""
Transfer of a four-level pulse to a two-photon excitation of |r1> through a far-detuned intermediate level |e>.

The microwave controls of an optimised pulse are kept. The gate is refined at finite intermediate
detuning by re-optimising only the single-qubit angle θ and the gate time T.
"""
import logging
from dataclasses import dataclass, field
from typing import Any, Self

import numpy as np
from scipy.optimize import minimize

from forge.base import Result
from forge.logger import ForgeLogger
from forge.printer import PrettyPrinter
from forge.propagator import evolve, bell_fidelity
from forge.protocols.exception import ProtocolValidationError
from forge.statespace import GateModel, Pulse, HamiltonianFamily, SectorSteps, Sector, TWO_PHOTON_STATES
from forge.statespace.hamiltonian import combine

log: ForgeLogger = logging.getLogger(__name__)

#: Smallest allowed |Δ_e| in units of the largest single-photon Rabi frequency
MIN_DETUNING_RATIO = 10.0
#: Below this |Δ_e|/max Ω a warning is logged as adiabatic elimination degrades
WARN_DETUNING_RATIO = 20.0
#: Wavelengths of the lower and upper beams in m
PROBE_WAVELENGTH = 420e-9
COUPLING_WAVELENGTH = 1013e-9


@dataclass(frozen=True)
class TwoPhotonModel(PrettyPrinter):
    """
    A two-photon ladder |1> -> |e> -> |r1> driving the four-level gate.

    Frequencies are in units of the effective two-photon Rabi frequency when built
    through :py:meth:`from_physical`.

    :param omega_1: Rabi frequency Ω₁ of the |1> <-> |e> beam.
    :param omega_2: Rabi frequency Ω₂ of the |e> <-> |r1> beam.
    :param delta_e: Magnitude of the intermediate-state detuning Δ_e. The sign is set
        opposite to the optical detuning Δ_o of the driven pulse.
    :param tau_e: Lifetime of |e>. Infinite for no intermediate-state decay.
    :param gate: Interactions and Rydberg decay of the driven four-level model.
    """
    omega_1: float
    omega_2: float
    delta_e: float
    tau_e: float = np.inf
    gate: GateModel = field(default_factory=GateModel)

    def __post_init__(self):
        for name in ("omega_1", "omega_2", "delta_e"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ProtocolValidationError(name, "must be finite and > 0")
        if not self.tau_e > 0:
            raise ProtocolValidationError("tau_e", "must be > 0")

        ratio = self.delta_e / max(self.omega_1, self.omega_2)
        if ratio < MIN_DETUNING_RATIO:
            raise ProtocolValidationError(
                "delta_e", f"must be at least {MIN_DETUNING_RATIO:g} times the largest Rabi frequency, got {ratio:.2f}"
            )
        if ratio < WARN_DETUNING_RATIO:
            log.warning(f"Intermediate detuning is only {ratio:.1f} times the largest Rabi frequency")

    @property
    def omega_eff(self) -> float:
        """The effective two-photon Rabi frequency Ω₁Ω₂/(2Δ_e)"""
        return self.omega_1 * self.omega_2 / (2 * self.delta_e)

    @property
    def gamma_e(self) -> float:
        """Decay rate of |e>"""
        return 0.0 if np.isinf(self.tau_e) else 1.0 / self.tau_e

    def signed_delta_e(self, delta_o: float) -> float:
        """Δ_e with the sign opposite to ``delta_o``, positive when Δ_o = 0"""
        return -self.delta_e if delta_o > 0 else self.delta_e

    def light_shifts(self, delta_o: float = 0.0) -> tuple[float, float]:
        """The AC Stark shifts Ω₁²/(4Δ_e) of |1> and Ω₂²/(4Δ_e) of |r1> from the far-detuned |e>"""
        delta_e = self.signed_delta_e(delta_o)
        return self.omega_1 ** 2 / (4 * delta_e), self.omega_2 ** 2 / (4 * delta_e)

    def frame_phase(self, pulse: Pulse) -> float:
        """
        The single-qubit phase accumulated by the light shift of |1> over the gate.
        A four-level gate at angle θ maps onto the two-photon gate at θ minus this phase.
        """
        return self.light_shifts(pulse.delta_o)[0] * pulse.total_time

    def without_decay(self) -> Self:
        return TwoPhotonModel(
            omega_1=self.omega_1,
            omega_2=self.omega_2,
            delta_e=self.delta_e,
            tau_e=np.inf,
            gate=self.gate.without_decay(),
        )

    @classmethod
    def from_physical(
            cls,
            omega_1_mhz: float,
            omega_2_mhz: float,
            delta_e_mhz: float,
            tau_e_us: float = np.inf,
            gate: GateModel | None = None,
    ) -> Self:
        """
        Build a model from Ω₁/2π, Ω₂/2π and Δ_e/2π in MHz and τ_e in µs,
        rescaled so that the effective Rabi frequency is 1.
        """
        omega_eff_mhz = omega_1_mhz * omega_2_mhz / (2 * delta_e_mhz)
        tau_e = tau_e_us * 2 * np.pi * omega_eff_mhz
        return cls(
            omega_1=omega_1_mhz / omega_eff_mhz,
            omega_2=omega_2_mhz / omega_eff_mhz,
            delta_e=delta_e_mhz / omega_eff_mhz,
            tau_e=tau_e,
            gate=gate or GateModel(),
        )

    def as_dict(self) -> dict[str, Any]:
        return {
            "omega_1": self.omega_1,
            "omega_2": self.omega_2,
            "delta_e": self.delta_e,
            "tau_e": self.tau_e,
            "omega_eff": self.omega_eff,
            "gate": self.gate,
        }


class TwoPhotonFamily(HamiltonianFamily):
    """
    Two five-level atoms in the lab frame, driven by constant probe and coupling beams
    and the microwave phase and amplitude of a four-level pulse.

    The light shifts are compensated in the laser and microwave detunings, so the Rydberg levels
    keep their four-level energies in the frame where |1> carries its own light shift.
    """

    __slots__ = ("two_photon",)

    states = TWO_PHOTON_STATES
    controls = ("phi_mw", "omega_mw")

    def __init__(self, model: TwoPhotonModel, pulse: Pulse):
        super().__init__(model=model.gate, pulse=pulse)
        self.two_photon = model

    def steps(self, sector: Sector | str) -> SectorSteps:
        sector = Sector.parse(sector)
        labels, terms = self.sector_terms(sector)
        gate = self.model
        shift_1, shift_r1 = self.two_photon.light_shifts(self.pulse.delta_o)

        static = combine(terms, {
            "probe": self.two_photon.omega_1,
            "coupling": self.two_photon.omega_2,
            "e_detuning": self.two_photon.signed_delta_e(self.pulse.delta_o),
            "detuning": self.pulse.delta_o + shift_r1 - shift_1,
            "mw_detuning": -shift_r1,
            "exchange": 0.0 if gate.infinite_j else gate.j_exchange,
            "v11": gate.v11,
            "v12": gate.v12,
            "v22": gate.v22,
            "decay_1": gate.gamma_1,
            "decay_2": gate.gamma_2,
            "decay_e": self.two_photon.gamma_e,
        })

        phi, omega = self.pulse.phi_mw, self.pulse.omega_mw
        cos, sin = np.cos(phi)[:, None, None], np.sin(phi)[:, None, None]
        mw_x, mw_y = terms["mw_x"], terms["mw_y"]

        derivatives = {
            "phi_mw": omega[:, None, None] * (-sin * mw_x + cos * mw_y),
            "omega_mw": cos * mw_x + sin * mw_y,
        }
        varying = {"mw_x": (omega * np.cos(phi), mw_x), "mw_y": (omega * np.sin(phi), mw_y)}
        return self._uniform_steps(sector, labels, static, varying, derivatives, terms["detuning"])

    def as_dict(self) -> dict[str, Any]:
        return {"model": self.two_photon, "pulse": self.pulse}


@dataclass(frozen=True)
class TwoPhotonResult(Result):
    """
    A four-level pulse refined for a two-photon excitation.

    :param base_infidelity: Ideal infidelity of the unrefined pulse with the two-photon ladder.
    :param infidelity: Ideal infidelity after refining θ and T.
    """
    theta: float
    total_time: float
    base_infidelity: float
    infidelity: float
    iterations: int
    pulse: Pulse = field(repr=False)
    model: TwoPhotonModel = field(repr=False)


def two_photon_infidelity(pulse: Pulse, model: TwoPhotonModel) -> float:
    """Bell infidelity of ``pulse`` driven through the two-photon ladder"""
    family = TwoPhotonFamily(model=model, pulse=pulse)
    return 1.0 - bell_fidelity(evolve(pulse, model.gate, family=family), pulse.theta)


def two_photon_protocol(
        model: TwoPhotonModel, base_pulse: Pulse, max_iters: int = 400, tolerance: float = 1e-10
) -> TwoPhotonResult:
    """
    Re-optimise θ and T of a four-level pulse for a finite intermediate detuning.

    The microwave samples are kept on the normalised time grid while T varies.
    Decay is ignored during refinement. θ starts from the base angle corrected by the light-shift frame phase.
    """
    ideal = model.without_decay()

    def cost(x: np.ndarray) -> float:
        theta, total_time = x
        if total_time <= 0:
            return 1.0
        return two_photon_infidelity(base_pulse.with_time(total_time).with_scalars(theta=theta), ideal)

    start = np.array([base_pulse.theta - model.frame_phase(base_pulse), base_pulse.total_time])
    base_infidelity = cost(start)
    result = minimize(
        cost,
        start,
        method="Nelder-Mead",
        options={"maxiter": max_iters, "xatol": 1e-8, "fatol": tolerance},
    )
    theta, total_time = (float(v) for v in result.x)
    pulse = base_pulse.with_time(total_time).with_scalars(theta=theta)

    log.report(
        f"Two-photon refinement | T={total_time:.4f} | θ={theta:.4f} | "
        f"infidelity {base_infidelity:.3e} -> {result.fun:.3e}"
    )
    return TwoPhotonResult(
        theta=theta,
        total_time=total_time,
        base_infidelity=float(base_infidelity),
        infidelity=float(result.fun),
        iterations=int(result.nit),
        pulse=pulse,
        model=model,
    )

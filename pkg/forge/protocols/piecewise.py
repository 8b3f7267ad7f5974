"""
The piecewise protocol: an optical π-pulse, a detuned microwave segment with the laser off,
and a second optical π-pulse.

In the J -> ∞ limit the doubly excited |r1 r1> is frozen during the microwave segment while
|0 r1> completes a detuned Rabi cycle, so the gate phase is set by the microwave detuning alone.
"""
import logging
from collections.abc import Sequence
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from forge.base import Result
from forge.grape import OptimizationPlan, ConvergenceError, time_sweep, SweepPoint
from forge.logger import ForgeLogger
from forge.printer import PrettyPrinter
from forge.propagator import evolve, bell_fidelity, rydberg_time
from forge.protocols.exception import ProtocolValidationError, InfeasibleProtocolError
from forge.statespace import GateModel, Pulse, PiecewiseFamily
from forge.types import ForgeEnum, RealArray

log: ForgeLogger = logging.getLogger(__name__)

#: The finite-J sweep starts at this fraction of the analytic microwave segment time
FINITE_J_START_FRACTION = 0.95
#: The finite-J sweep gives up at this multiple of the analytic microwave segment time
FINITE_J_CEILING = 2.0
#: Half-width of the resonance search around Δ_mw = J in units of Ω_mw
RESONANCE_WINDOW = 0.5
#: Initial simplex steps of the resonance search in Δ_mw (units of Ω_mw) and θ
RESONANCE_STEP = (0.05, 0.05)


class PiecewiseBranch(ForgeEnum):
    """
    The exact solutions of the piecewise protocol, named by the microwave detuning they use.

    ``SQRT3_MINUS`` and ``SQRT3_PLUS`` set Δ_mw = ∓Ω_mw/√3 and reach CZ(3π/2) and CZ(π/2).
    ``NEAR_J`` sets Δ_mw ~ J so that |r1 r1> completes a Rabi cycle with the symmetric |r1 r2> state,
    reaching CZ(π). It needs a finite J.
    """
    SQRT3_MINUS = 0
    SQRT3_PLUS = 1
    NEAR_J = 2

    @property
    def area(self) -> float:
        """The microwave segment area Ω_mw·T_mw"""
        return np.sqrt(2) * np.pi if self == PiecewiseBranch.NEAR_J else np.sqrt(3) * np.pi

    @property
    def theta(self) -> float:
        """The single-qubit angle θ of the CZ(θ) gate this branch realises"""
        return {
            PiecewiseBranch.SQRT3_MINUS: 3 * np.pi / 2,
            PiecewiseBranch.SQRT3_PLUS: np.pi / 2,
            PiecewiseBranch.NEAR_J: np.pi,
        }[self]

    def detuning(self, omega_mw: float, j_exchange: float = np.inf) -> float:
        """The analytic microwave detuning of this branch"""
        match self:
            case PiecewiseBranch.SQRT3_MINUS:
                return -omega_mw / np.sqrt(3)
            case PiecewiseBranch.SQRT3_PLUS:
                return omega_mw / np.sqrt(3)
            case _:
                return j_exchange


@dataclass(frozen=True)
class PiecewiseSpec(PrettyPrinter):
    """
    Parameters of a piecewise gate.

    :param branch: Which exact solution to build.
    :param omega_mw_ratio: Ω_mw/Ω_o.
    :param laser_always_on: Keep the laser on through the microwave segment and search
        the total laser time instead of using π-pulses.
    :param detuning_modulation: Optional Δ_mw(t) samples in units of Ω_o for the microwave segment,
        e.g. a pulse refined at finite J. Constant Δ_mw at the branch value when not given.
    :param j_over_omega_mw: J/Ω_mw. Infinite for the blockade limit.
    :param n_steps: Number of steps of the microwave segment.
    """
    branch: PiecewiseBranch = PiecewiseBranch.SQRT3_MINUS
    omega_mw_ratio: float = 10.0
    laser_always_on: bool = False
    detuning_modulation: tuple[float, ...] | None = None
    j_over_omega_mw: float = np.inf
    n_steps: int = 100

    def __post_init__(self):
        object.__setattr__(self, "branch", PiecewiseBranch.parse(self.branch))
        if self.detuning_modulation is not None:
            object.__setattr__(self, "detuning_modulation", tuple(float(v) for v in self.detuning_modulation))

        if not (np.isfinite(self.omega_mw_ratio) and self.omega_mw_ratio > 0):
            raise ProtocolValidationError("omega_mw_ratio", "must be finite and > 0")
        if not self.j_over_omega_mw > 0:
            raise ProtocolValidationError("j_over_omega_mw", "must be > 0")
        if self.n_steps < 1:
            raise ProtocolValidationError("n_steps", "must be a positive integer")
        if self.branch == PiecewiseBranch.NEAR_J and not np.isfinite(self.j_over_omega_mw):
            raise ProtocolValidationError("j_over_omega_mw", "the near-J branch needs a finite J")
        if self.detuning_modulation is not None and not self.detuning_modulation:
            raise ProtocolValidationError("detuning_modulation", "must hold at least one sample")

    @property
    def omega_mw(self) -> float:
        """Ω_mw in units of Ω_o"""
        return float(self.omega_mw_ratio)

    @property
    def j_exchange(self) -> float:
        """J in units of Ω_o"""
        return self.j_over_omega_mw * self.omega_mw

    @property
    def mw_time(self) -> float:
        """Analytic microwave segment duration T_mw"""
        return self.branch.area / self.omega_mw

    @property
    def predicted_time(self) -> float:
        """Analytic gate time Ω_o·T = 2π + Ω_o·T_mw"""
        return 2 * np.pi + self.mw_time

    @property
    def predicted_rydberg_time(self) -> float:
        """Analytic time spent in the Rydberg manifold Ω_o·T^R = π + Ω_o·T_mw"""
        return np.pi + self.mw_time

    def model(self) -> GateModel:
        """The four-level model of this gate: the infinite-J projection in the blockade limit"""
        if np.isfinite(self.j_exchange):
            return GateModel(j_exchange=self.j_exchange)
        return GateModel(infinite_j=True)

    def as_dict(self) -> dict[str, Any]:
        return {
            "branch": self.branch,
            "omega_mw_ratio": self.omega_mw_ratio,
            "laser_always_on": self.laser_always_on,
            "detuning_modulation": self.detuning_modulation,
            "j_over_omega_mw": self.j_over_omega_mw,
            "n_steps": self.n_steps,
        }


###########################################################################
## Results
###########################################################################
@dataclass(frozen=True)
class PiecewiseSegment(PrettyPrinter):
    """One segment of the sequence. ``delta_mw`` is the mean detuning over the segment."""
    name: str
    duration: float
    laser: bool
    omega_mw: float
    delta_mw: float

    def as_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "duration": self.duration,
            "laser": self.laser,
            "omega_mw": self.omega_mw,
            "delta_mw": self.delta_mw,
        }


@dataclass(frozen=True)
class PiecewiseGate(Result):
    """
    A simulated piecewise gate with its analytic predictions.

    :param delta_mw: The microwave detuning used, the resonance search result for the near-J branch.
    :param theta: The single-qubit angle θ the fidelity is measured against, refined together with
        Δ_mw for the near-J branch.
    :param mw_time: Duration of the microwave segment.
    :param total_time: Simulated gate time. Differs from the prediction when the laser stays on.
    :param rydberg_time: Simulated time spent in the Rydberg manifold.
    """
    branch: PiecewiseBranch
    delta_mw: float
    mw_time: float
    theta: float
    predicted_theta: float
    predicted_time: float
    predicted_rydberg_time: float
    total_time: float
    fidelity: float
    infidelity: float
    rydberg_time: float
    segments: tuple[PiecewiseSegment, ...] = field(repr=False)
    pulse: Pulse = field(repr=False)


@dataclass(frozen=True)
class FiniteJSolution(Result):
    """
    A piecewise gate at finite J with an optimised microwave detuning Δ_mw(t).

    :param mw_time: Duration of the microwave segment in units of 1/Ω_o.
    :param mw_time_omega_mw: The same duration in units of 1/Ω_mw.
    :param pulse: The optimised microwave segment.
    :param trace: Every point visited by the segment time sweep.
    """
    branch: PiecewiseBranch
    j_over_omega_mw: float
    mw_time: float
    mw_time_omega_mw: float
    theta: float
    infidelity: float
    rydberg_time: float
    pulse: Pulse = field(repr=False)
    trace: tuple[SweepPoint, ...] = field(repr=False)

    @property
    def delta_mw(self) -> RealArray:
        """The optimised Δ_mw(t) samples"""
        return self.pulse.control("delta_mw")


###########################################################################
## Construction
###########################################################################
def piecewise_pulse(spec: PiecewiseSpec, delta_mw: float | None = None) -> Pulse:
    """
    The microwave segment of ``spec`` as a pulse with ``delta_mw`` and ``omega_mw`` controls.

    :param delta_mw: Constant detuning overriding the branch value.
        Ignored when ``spec`` carries a detuning modulation.
    """
    if spec.detuning_modulation is not None:
        modulation = np.asarray(spec.detuning_modulation)
        detuning = np.interp(
            (np.arange(spec.n_steps) + 0.5) / spec.n_steps,
            (np.arange(len(modulation)) + 0.5) / len(modulation),
            modulation,
        )
    else:
        value = spec.branch.detuning(spec.omega_mw, spec.j_exchange) if delta_mw is None else delta_mw
        detuning = np.full(spec.n_steps, value)

    return Pulse(
        total_time=spec.mw_time,
        controls={"delta_mw": detuning, "omega_mw": np.full(spec.n_steps, spec.omega_mw)},
        theta=spec.branch.theta,
    )


def _simulate(
        pulse: Pulse, model: GateModel, laser_in_middle: bool = False, outer_time: float | None = None
) -> tuple[float, float]:
    family = PiecewiseFamily(model=model, pulse=pulse, laser_in_middle=laser_in_middle, outer_time=outer_time)
    trajectory = evolve(pulse, model, family=family)
    return bell_fidelity(trajectory, pulse.theta), rydberg_time(trajectory)


def _resonance_search(spec: PiecewiseSpec, model: GateModel) -> tuple[float, float]:
    """
    Find the Δ_mw near J and the single-qubit angle θ that jointly maximise
    the Bell fidelity of the near-J branch.

    Δ_mw is held within ``RESONANCE_WINDOW``·Ω_mw of J.
    """
    pulse = piecewise_pulse(spec)
    half_width = RESONANCE_WINDOW * spec.omega_mw

    def infidelity(x: RealArray) -> float:
        delta_mw, theta = x
        if abs(delta_mw - spec.j_exchange) > half_width:
            return 1.0
        candidate = pulse.with_controls(delta_mw=np.full(spec.n_steps, delta_mw)).with_scalars(theta=theta)
        return 1.0 - _simulate(candidate, model)[0]

    start = np.array([spec.j_exchange, spec.branch.theta])
    step_delta, step_theta = RESONANCE_STEP
    simplex = np.array([start, start + [step_delta * spec.omega_mw, 0.0], start + [0.0, step_theta]])
    result = minimize(
        infidelity,
        start,
        method="Nelder-Mead",
        options={"initial_simplex": simplex, "maxiter": 2000, "xatol": 1e-10, "fatol": 1e-15},
    )
    delta_mw, theta = (float(v) for v in result.x)
    log.debug(f"Near-J resonance search | Δ_mw={delta_mw:.6f} | θ={theta:.6f} | infidelity={result.fun:.3e}")
    return delta_mw, theta


def _always_on_search(pulse: Pulse, model: GateModel) -> tuple[float, float, float]:
    """Search the duration of the outer laser segments with the laser kept on throughout"""
    def infidelity(outer_time: float) -> float:
        return 1.0 - _simulate(pulse, model, laser_in_middle=True, outer_time=outer_time)[0]

    result = minimize_scalar(infidelity, bounds=(np.pi / 2, 3 * np.pi / 2), method="bounded")
    outer_time = float(result.x)
    fidelity, t_r = _simulate(pulse, model, laser_in_middle=True, outer_time=outer_time)
    return outer_time, fidelity, t_r


def piecewise_gate(spec: PiecewiseSpec) -> PiecewiseGate:
    """
    Build and simulate a piecewise gate in the frame rotating with the microwave phase.

    The sqrt3 branches use the infinite-J projection unless ``spec`` sets a finite J.
    The near-J branch searches its detuning near Δ_mw = J together with θ.
    With ``laser_always_on`` the outer segments are stretched by a bounded search
    to maximise the Bell fidelity.
    """
    model = spec.model()
    pulse = piecewise_pulse(spec)
    if spec.branch == PiecewiseBranch.NEAR_J and spec.detuning_modulation is None:
        delta_mw, theta = _resonance_search(spec, model)
        pulse = piecewise_pulse(spec, delta_mw=delta_mw).with_scalars(theta=theta)

    if spec.laser_always_on:
        outer_time, fidelity, t_r = _always_on_search(pulse, model)
    else:
        outer_time = np.pi / model.omega_o
        fidelity, t_r = _simulate(pulse, model)

    mean_detuning = float(np.mean(pulse.control("delta_mw")))
    segments = (
        PiecewiseSegment(name="pi_1", duration=outer_time, laser=True, omega_mw=0.0, delta_mw=0.0),
        PiecewiseSegment(
            name="microwave",
            duration=pulse.total_time,
            laser=spec.laser_always_on,
            omega_mw=spec.omega_mw,
            delta_mw=mean_detuning,
        ),
        PiecewiseSegment(name="pi_2", duration=outer_time, laser=True, omega_mw=0.0, delta_mw=0.0),
    )

    gate = PiecewiseGate(
        branch=spec.branch,
        delta_mw=mean_detuning,
        mw_time=pulse.total_time,
        theta=pulse.theta,
        predicted_theta=spec.branch.theta,
        predicted_time=spec.predicted_time,
        predicted_rydberg_time=spec.predicted_rydberg_time,
        total_time=2 * outer_time + pulse.total_time,
        fidelity=fidelity,
        infidelity=1.0 - fidelity,
        rydberg_time=t_r,
        segments=segments,
        pulse=pulse,
    )
    log.report(
        f"Piecewise {spec.branch.name.lower()} | Ω_mw/Ω_o={spec.omega_mw_ratio:g} | "
        f"T={gate.total_time:.4f} | T^R={t_r:.4f} | infidelity={gate.infidelity:.3e}"
    )
    return gate


def laser_always_on_gate(
        omega_mw_ratio: float,
        j_over_omega_o: float,
        branch: PiecewiseBranch | str = PiecewiseBranch.SQRT3_MINUS,
        detuning_modulation: Sequence[float] | None = None,
) -> PiecewiseGate:
    """
    Run the piecewise gate without turning the laser off during the microwave segment.

    The optimal gate time approaches 2π/Ω_o and the fidelity approaches 1
    as both Ω_mw/Ω_o and J/Ω_o grow.
    """
    spec = PiecewiseSpec(
        branch=branch,
        omega_mw_ratio=omega_mw_ratio,
        laser_always_on=True,
        detuning_modulation=tuple(detuning_modulation) if detuning_modulation is not None else None,
        j_over_omega_mw=j_over_omega_o / omega_mw_ratio,
    )
    return piecewise_gate(spec)


###########################################################################
## Finite J
###########################################################################
def piecewise_finite_j(
        spec: PiecewiseSpec, j_over_omega_mw: float | None = None, plan: OptimizationPlan | None = None
) -> FiniteJSolution:
    """
    Optimise the microwave detuning Δ_mw(t) of the middle segment at finite J
    with the outer π-pulses fixed.

    The segment time is swept upward from just below its analytic value, warm-starting
    each point from the previous optimum, until the sequence reaches an exact gate.

    :param j_over_omega_mw: J/Ω_mw, defaulting to the value on ``spec``.
    :param plan: Supplies the sweep increment, regulariser schedule and optimiser settings.
    :raise InfeasibleProtocolError: When no exact gate is found below the sweep ceiling.
    """
    j_over_omega_mw = spec.j_over_omega_mw if j_over_omega_mw is None else j_over_omega_mw
    if not np.isfinite(j_over_omega_mw):
        raise ProtocolValidationError("j_over_omega_mw", "finite-J refinement needs a finite J")

    spec = replace(spec, j_over_omega_mw=j_over_omega_mw)
    model = spec.model()
    plan = replace(
        plan or OptimizationPlan(),
        n_steps=spec.n_steps,
        t_start=FINITE_J_START_FRACTION * spec.mw_time,
        t_max=FINITE_J_CEILING * spec.mw_time,
        controls=("delta_mw",),
    )

    log.info(
        f"Refining piecewise {spec.branch.name.lower()} at J/Ω_mw={j_over_omega_mw:g} "
        f"from T_mw={plan.t_start:.4f}"
    )
    try:
        result = time_sweep(model, plan, initial_pulse=piecewise_pulse(spec))
    except ConvergenceError as ex:
        best = min((point.infidelity for point in ex.trace), default=np.nan)
        raise InfeasibleProtocolError(
            f"No exact piecewise gate at J/Ω_mw={j_over_omega_mw:g} up to T_mw={plan.t_max:.4f}", best_infidelity=best
        ) from ex

    return FiniteJSolution(
        branch=spec.branch,
        j_over_omega_mw=j_over_omega_mw,
        mw_time=result.t_star,
        mw_time_omega_mw=result.t_star * spec.omega_mw,
        theta=result.pulse.theta,
        infidelity=result.infidelity,
        rydberg_time=result.rydberg_time,
        pulse=result.pulse,
        trace=result.trace,
    )

"""
Time-optimal gate search and robustness optimisation built on the GRAPE costs.
"""
import logging
from collections.abc import Collection
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from forge.base import Result
from forge.grape.cost import cost_regularized, cost_robust, fluctuation_profile, layout_for, fluctuation_nodes
from forge.grape.exception import ConvergenceError
from forge.grape.optimize import minimize, MinimizeResult
from forge.grape.plan import OptimizationPlan
from forge.logger import ForgeLogger
from forge.printer import PrettyPrinter
from forge.propagator import evolve, rydberg_time
from forge.statespace import GateModel, GateScheme, Pulse, default_controls
from forge.types import RealArray

log: ForgeLogger = logging.getLogger(__name__)


###########################################################################
## Initial pulses
###########################################################################
def half_sine(n_steps: int, peak: float = 1.0) -> RealArray:
    """A half-sine arch of height ``peak`` sampled on the midpoint grid"""
    return peak * np.sin(np.pi * (np.arange(n_steps) + 0.5) / n_steps)


def initial_pulse(
        model: GateModel, plan: OptimizationPlan, total_time: float, rng: np.random.Generator | None = None
) -> Pulse:
    """
    Build the starting pulse of a time sweep for the model's Hamiltonian family.

    Four-level: φ_mw ≡ 0 and a half-sine Ω_mw arch peaking at Ω_o.
    Effective model: a half-sine 1/τ arch. Blockade baseline: φ_o ≡ 0.
    All start at Δ_o = 0 and θ = π. With ``rng`` a seeded perturbation of scale
    ``plan.perturbation`` is added to every free control.
    """
    n_steps = plan.n_steps
    match model.scheme:
        case GateScheme.EFFECTIVE_VDW:
            controls = {"inv_tau": half_sine(n_steps, peak=model.omega_o)}
        case GateScheme.BLOCKADE:
            controls = {"phi_o": np.zeros(n_steps)}
        case _:
            controls = {"phi_mw": np.zeros(n_steps), "omega_mw": half_sine(n_steps, peak=model.omega_o)}

    if rng is not None and plan.perturbation > 0:
        for name in plan.controls or default_controls(model):
            if name not in controls:
                continue
            noise = plan.perturbation * rng.standard_normal(n_steps)
            controls[name] = controls[name] + (np.abs(noise) if name == "omega_mw" else noise)

    return Pulse(total_time=total_time, controls=controls, delta_o=0.0, theta=np.pi)


###########################################################################
## Results
###########################################################################
@dataclass(frozen=True)
class SweepPoint(PrettyPrinter):
    """One row of a time sweep trace"""
    total_time: float
    infidelity: float
    eta: float
    iterations: int
    converged: bool

    def as_dict(self) -> dict[str, Any]:
        return {
            "total_time": self.total_time,
            "infidelity": self.infidelity,
            "eta": self.eta,
            "iterations": self.iterations,
            "converged": self.converged,
        }


@dataclass(frozen=True)
class TimeSweepResult(Result):
    """
    The shortest gate time at which an exact gate was found.

    :param t_star: The time-optimal gate duration T*.
    :param pulse: The exact pulse at T*.
    :param infidelity: Bell infidelity of the pulse at T*.
    :param rydberg_time: Time T^R spent in the Rydberg manifold by the pulse at T*.
    :param trace: Every point visited by the sweep in order.
    """
    t_star: float
    pulse: Pulse = field(repr=False)
    infidelity: float
    rydberg_time: float
    trace: tuple[SweepPoint, ...] = field(repr=False)


@dataclass(frozen=True)
class RobustifyResult(Result):
    """
    A pulse re-optimised against relative distance fluctuations.

    :param pulse: The robust pulse at T* + δT*.
    :param robust_cost: 1 - mean F over the fluctuation window for the robust pulse.
    :param exact_robust_cost: The same cost for the exact input pulse.
    :param improved: Whether the robust cost went down.
    """
    pulse: Pulse = field(repr=False)
    total_time: float
    robust_cost: float
    exact_robust_cost: float
    improved: bool
    iterations: int
    converged: bool


###########################################################################
## Sweep
###########################################################################
def multistart(model: GateModel, plan: OptimizationPlan, total_time: float, eta: float) -> list[MinimizeResult]:
    """
    Optimise ``plan.restarts`` seeded starting pulses at ``total_time``.

    The first start is unperturbed. Results are returned in start order.
    """
    seeds = np.random.SeedSequence(plan.seed).spawn(plan.restarts)
    starts = [
        initial_pulse(model, plan, total_time, rng=None if i == 0 else np.random.default_rng(seed))
        for i, seed in enumerate(seeds)
    ]

    def run(pulse: Pulse) -> MinimizeResult:
        return _optimize_at(pulse, model, plan, eta)

    bar = log.get_synchronous_iterator(starts, desc="Restarts", unit="starts", disable=len(starts) == 1)
    if plan.threads <= 1:
        return [run(pulse) for pulse in bar]
    with ThreadPoolExecutor(max_workers=plan.threads) as executor:
        return list(executor.map(run, bar))


def _optimize_at(pulse: Pulse, model: GateModel, plan: OptimizationPlan, eta: float) -> MinimizeResult:
    layout = layout_for(model, pulse, plan.controls, omega_mw_min=plan.omega_mw_min)
    return minimize(
        lambda p: cost_regularized(p, model, eta=eta, controls=layout.controls), pulse, plan=plan, layout=layout
    )


def time_sweep(model: GateModel, plan: OptimizationPlan, initial_pulse: Pulse | None = None) -> TimeSweepResult:
    """
    Find the shortest gate time T* at which an exact gate exists.

    Starting at ``plan.t_start``, each point warm-starts from the previous optimum stretched to
    T + dT and sets the regulariser weight to ε times the previous infidelity.
    The first point is a multi-start run unless ``initial_pulse`` is given.

    :raise ConvergenceError: When T passes ``plan.t_max`` without an infidelity below
        ``plan.exact_threshold``. The error carries the trace.
    """
    log.debug("Time sweep: START")
    times = np.arange(plan.t_start, plan.t_max + plan.dT / 2, plan.dT)
    trace: list[SweepPoint] = []
    eta = plan.eta0
    pulse = initial_pulse.with_time(plan.t_start) if initial_pulse is not None else None

    for total_time in log.get_synchronous_iterator(times, desc="Time sweep", unit="T"):
        total_time = float(total_time)
        if pulse is None:
            result = min(multistart(model, plan, total_time, eta), key=lambda r: r.report.bell_infidelity)
        else:
            result = _optimize_at(pulse.with_time(total_time), model, plan, eta)

        infidelity = result.report.bell_infidelity
        trace.append(SweepPoint(
            total_time=total_time,
            infidelity=infidelity,
            eta=eta,
            iterations=result.iterations,
            converged=result.converged,
        ))
        log.stat(f"Time sweep | T={total_time:.4f} | infidelity={infidelity:.3e} | eta={eta:.2e}")

        if infidelity < plan.exact_threshold:
            t_r = rydberg_time(evolve(result.pulse, model))
            log.report(
                f"\33[92mExact gate found\33[0m at T*={total_time:.4f} "
                f"with infidelity {infidelity:.2e} and T^R={t_r:.4f}"
            )
            log.debug("Time sweep: DONE")
            return TimeSweepResult(
                t_star=total_time, pulse=result.pulse, infidelity=infidelity, rydberg_time=t_r, trace=tuple(trace)
            )

        eta = plan.epsilon * infidelity
        pulse = result.pulse

    best = min((point.infidelity for point in trace), default=np.nan)
    log.debug("Time sweep: DONE")
    raise ConvergenceError(
        f"No exact gate found up to T={plan.t_max} (best infidelity {best:.3e})",
        trace=trace,
    )


###########################################################################
## Robustness
###########################################################################
def robustify(
        exact_pulse: Pulse, model: GateModel, plan: OptimizationPlan, controls: Collection[str] | None = None
) -> RobustifyResult:
    """
    Re-optimise an exact pulse for robustness against relative distance fluctuations
    at total time T* + δT* with the robust cost and regulariser weight ``plan.eta_robust``.

    Warns when the robust cost of the result exceeds that of the input pulse.
    """
    log.debug("Robustify: START")
    controls = controls or plan.controls
    start = exact_pulse.with_time(exact_pulse.total_time + plan.delta_t_star)
    layout = layout_for(model, start, controls, omega_mw_min=plan.omega_mw_min)

    def cost(pulse: Pulse):
        return cost_robust(
            pulse,
            model,
            x_max=plan.x_max,
            k_points=plan.k_points,
            eta=plan.eta_robust,
            controls=layout.controls,
            threads=plan.threads,
        )

    exact_cost = cost_robust(
        exact_pulse, model, x_max=plan.x_max, k_points=plan.k_points, controls=layout.controls, threads=plan.threads
    ).bell_infidelity
    result = minimize(cost, start, plan=plan, layout=layout)
    robust_cost = result.report.bell_infidelity

    improved = robust_cost <= exact_cost
    if not improved:
        log.warning(f"Robust cost increased from {exact_cost:.3e} to {robust_cost:.3e}")
    else:
        log.report(f"Robust cost reduced from {exact_cost:.3e} to {robust_cost:.3e}")

    log.debug("Robustify: DONE")
    return RobustifyResult(
        pulse=result.pulse,
        total_time=result.pulse.total_time,
        robust_cost=robust_cost,
        exact_robust_cost=exact_cost,
        improved=improved,
        iterations=result.iterations,
        converged=result.converged,
    )


def window_infidelity(pulse: Pulse, model: GateModel, plan: OptimizationPlan) -> float:
    """Mean Bell infidelity over the robust cost's fluctuation nodes"""
    return float(np.mean(fluctuation_profile(pulse, model, fluctuation_nodes(plan.x_max, plan.k_points))))

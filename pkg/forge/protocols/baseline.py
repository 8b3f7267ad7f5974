"""
The single-Rydberg-level van der Waals baseline: a constant-amplitude laser whose phase φ_o(t)
is optimised for the shortest CZ gate at a finite blockade shift V.
"""
import logging
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np

from forge.base import Result
from forge.grape import OptimizationPlan, ConvergenceError, time_sweep, SweepPoint, TimeSweepResult
from forge.logger import ForgeLogger
from forge.printer import PrettyPrinter
from forge.protocols.exception import ProtocolValidationError, InfeasibleProtocolError
from forge.statespace import GateModel, GateScheme, Pulse

log: ForgeLogger = logging.getLogger(__name__)

#: Sweeps whose optimal times differ by more than this are archived as distinct branches
BRANCH_SEPARATION = 0.05
#: Default number of seeded sweeps searched for distinct branches
MIN_BRANCH_STARTS = 2


@dataclass(frozen=True)
class BaselineBranch(PrettyPrinter):
    """A local optimum of the baseline found from one seed"""
    seed: int
    t_star: float
    infidelity: float
    rydberg_time: float

    def as_dict(self) -> dict[str, Any]:
        return {
            "seed": self.seed,
            "t_star": self.t_star,
            "infidelity": self.infidelity,
            "rydberg_time": self.rydberg_time,
        }


@dataclass(frozen=True)
class BaselineResult(Result):
    """
    The time-optimal baseline gate at a given blockade shift.

    :param v_over_omega: The blockade shift V/Ω_o.
    :param t_star: The shortest gate time found over all branches.
    :param rydberg_time: Time spent in the Rydberg manifold by the fastest gate.
    :param branches: Every distinct branch found, fastest first.
    """
    v_over_omega: float
    t_star: float
    infidelity: float
    rydberg_time: float
    pulse: Pulse = field(repr=False)
    trace: tuple[SweepPoint, ...] = field(repr=False)
    branches: tuple[BaselineBranch, ...] = field(repr=False)


def baseline_model(v_over_omega: float) -> GateModel:
    """The blockade model at interaction V/Ω_o"""
    if not np.isfinite(v_over_omega):
        raise ProtocolValidationError("v_over_omega", "must be finite")
    return GateModel(scheme=GateScheme.BLOCKADE, v11=v_over_omega)


def vdw_baseline_optimize(
        v_over_omega: float, plan: OptimizationPlan | None = None, branch_starts: int | None = None
) -> BaselineResult:
    """
    Find the time-optimal phase-modulated gate of the single-level blockade model.

    Runs ``branch_starts`` time sweeps with consecutive seeds, each starting from its own
    multi-start optimisation, and archives every optimum whose gate time differs from all
    others by more than :py:data:`BRANCH_SEPARATION`.
    Defaults to ``plan.restarts`` sweeps, and never fewer than :py:data:`MIN_BRANCH_STARTS`.

    :raise InfeasibleProtocolError: When no sweep finds an exact gate below the sweep ceiling,
        as happens for V below about Ω_o.
    """
    plan = plan or OptimizationPlan()
    if branch_starts is None:
        branch_starts = max(MIN_BRANCH_STARTS, plan.restarts)
    if branch_starts < 1:
        raise ProtocolValidationError("branch_starts", "must be a positive integer")
    model = baseline_model(v_over_omega)
    log.info(f"Optimising the van der Waals baseline at V/Ω_o={v_over_omega:g}")

    found: list[tuple[int, TimeSweepResult]] = []
    best_failure = np.inf
    for i in range(branch_starts):
        seed = plan.seed + i
        try:
            found.append((seed, time_sweep(model, replace(plan, seed=seed))))
        except ConvergenceError as ex:
            best = min((point.infidelity for point in ex.trace), default=np.inf)
            best_failure = min(best_failure, best)
            log.warning(f"Baseline sweep with seed {seed} found no exact gate (best infidelity {best:.3e})")

    if not found:
        raise InfeasibleProtocolError(
            f"No exact baseline gate at V/Ω_o={v_over_omega:g} up to T={plan.t_max}",
            best_infidelity=float(best_failure) if np.isfinite(best_failure) else np.nan,
        )

    found.sort(key=lambda item: item[1].t_star)
    branches: list[BaselineBranch] = []
    for seed, result in found:
        if all(abs(result.t_star - branch.t_star) > BRANCH_SEPARATION for branch in branches):
            branches.append(BaselineBranch(
                seed=seed, t_star=result.t_star, infidelity=result.infidelity, rydberg_time=result.rydberg_time
            ))

    fastest = found[0][1]
    log.report(
        f"Baseline V/Ω_o={v_over_omega:g} | T*={fastest.t_star:.4f} | T^R={fastest.rydberg_time:.4f} | "
        f"{len(branches)} distinct branch{"es" if len(branches) != 1 else ""}"
    )
    return BaselineResult(
        v_over_omega=v_over_omega,
        t_star=fastest.t_star,
        infidelity=fastest.infidelity,
        rydberg_time=fastest.rydberg_time,
        pulse=fastest.pulse,
        trace=fastest.trace,
        branches=tuple(branches),
    )

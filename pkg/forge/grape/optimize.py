"""
Box-constrained quasi-Newton minimisation of GRAPE costs.
"""
import logging
from collections.abc import Callable, Collection, Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np
from scipy.optimize import minimize as scipy_minimize, OptimizeResult

from forge.base import Result
from forge.grape.cost import CostFunction, CostReport, ParameterLayout, layout_for
from forge.grape.plan import OptimizationPlan
from forge.logger import ForgeLogger
from forge.statespace import GateModel, Pulse
from forge.types import RealArray

log: ForgeLogger = logging.getLogger(__name__)

#: Number of correction pairs kept in the limited-memory Hessian approximation
HISTORY_LENGTH = 10


@dataclass(frozen=True)
class MinimizeResult(Result):
    """
    The outcome of a single L-BFGS-B run.

    :param pulse: The final pulse.
    :param report: The cost evaluated at the final pulse.
    :param converged: Whether a stopping tolerance was met before the iteration limit.
    :param iterations: Number of quasi-Newton iterations taken.
    :param message: The optimiser's termination message.
    """
    pulse: Pulse
    report: CostReport
    converged: bool
    iterations: int
    message: str


def lbfgsb(
        fun: Callable[[RealArray], tuple[float, RealArray]],
        x0: RealArray,
        bounds: Sequence[tuple[float | None, float | None]] | None = None,
        max_iters: int = 1000,
        grad_tol: float = 1e-10,
        cost_tol: float = 1e-15,
) -> OptimizeResult:
    """
    Minimise ``fun``, which returns both the value and the gradient, with L-BFGS-B.

    The run is deterministic for a given start and never raises on non-convergence.
    """
    return scipy_minimize(
        fun,
        np.asarray(x0, dtype=float),
        method="L-BFGS-B",
        jac=True,
        bounds=bounds,
        options={"maxcor": HISTORY_LENGTH, "maxiter": max_iters, "gtol": grad_tol, "ftol": cost_tol},
    )


def minimize(
        cost: CostFunction,
        pulse: Pulse,
        plan: OptimizationPlan | None = None,
        model: GateModel | None = None,
        controls: Collection[str] | None = None,
        layout: ParameterLayout | None = None,
) -> MinimizeResult:
    """
    Minimise a pulse cost over the free controls, Δ_o and θ with Ω_mw >= 0.

    :param cost: Maps a pulse to its :py:class:`CostReport`.
    :param pulse: The starting pulse. Its total time and any fixed controls are kept.
    :param plan: Supplies the iteration limit and tolerances.
    :param model: Used to choose the default free controls when neither ``controls`` nor ``layout`` are given.
    :param controls: The free controls.
    :param layout: The parameter layout, overriding ``controls``.
    """
    plan = plan or OptimizationPlan()
    if layout is None:
        layout = layout_for(model or GateModel(), pulse, controls or plan.controls, omega_mw_min=plan.omega_mw_min)

    last: dict[str, Any] = {}

    def evaluate(x: RealArray) -> tuple[float, RealArray]:
        report = cost(layout.unpack(x, pulse))
        last.update(x=x.copy(), report=report)
        return report.total, report.gradient

    result = lbfgsb(
        evaluate,
        layout.pack(pulse),
        bounds=layout.bounds(),
        max_iters=plan.max_iters,
        grad_tol=plan.grad_tol,
        cost_tol=plan.cost_tol,
    )

    final = layout.unpack(result.x, pulse)
    if "x" in last and np.array_equal(last["x"], result.x):
        report = last["report"]
    else:
        report = cost(final)
    message = result.message if isinstance(result.message, str) else result.message.decode()

    log.stat(
        f"L-BFGS-B | T={pulse.total_time:.4f} | cost={report.total:.3e} | "
        f"infidelity={report.bell_infidelity:.3e} | iterations={result.nit} | {message}"
    )
    return MinimizeResult(
        pulse=final,
        report=report,
        converged=bool(result.success),
        iterations=int(result.nit),
        message=message,
    )

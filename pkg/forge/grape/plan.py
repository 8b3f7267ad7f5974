"""
Hyperparameters of the GRAPE optimisation pipeline.
"""
from dataclasses import dataclass, fields
from typing import Any

from forge.grape.exception import PlanValidationError
from forge.printer import PrettyPrinter

#: The smallest regulariser schedule factor that keeps optimal pulses independent of the time step
PRODUCTION_MIN_EPSILON = 1e-3


@dataclass(frozen=True)
class OptimizationPlan(PrettyPrinter):
    """
    Settings for a GRAPE run, a time sweep and robustification.

    :param n_steps: Number of piecewise-constant steps N.
    :param epsilon: Regulariser schedule factor: after every sweep point η <- ε·(previous infidelity).
    :param eta0: Regulariser weight at the first sweep point.
    :param dT: Time sweep increment in 1/Ω_o.
    :param t_start: First gate time of the sweep.
    :param t_max: Sweep ceiling. Passing it without an exact gate aborts the sweep.
    :param k_points: Number of equally spaced displacement nodes in the robust cost. Must be odd.
    :param x_max: Largest relative distance fluctuation δR/R averaged over by the robust cost.
    :param delta_t_star: Extra gate time granted for robustification.
    :param eta_robust: Regulariser weight during robustification.
    :param max_iters: Iteration limit of each L-BFGS-B run.
    :param grad_tol: Projected-gradient tolerance of each L-BFGS-B run.
    :param cost_tol: Relative cost reduction tolerance of each L-BFGS-B run.
    :param exact_threshold: Bell infidelity below which a gate is declared exact.
    :param restarts: Number of starts at the first sweep point. The best is kept.
    :param perturbation: Scale of the seeded random perturbation added to restarted initial pulses.
    :param seed: Seed for all random perturbations.
    :param threads: Worker threads for restarts and robust nodes.
    :param controls: The free controls. Defaults to the controls of the Hamiltonian family.
    :param omega_mw_min: Lower bound of the microwave amplitude samples.
    :param production: Enforce ε >= 1e-3.
    """
    n_steps: int = 200
    epsilon: float = 1e-3
    eta0: float = 1e-6
    dT: float = 0.002
    t_start: float = 5.5
    t_max: float = 9.0
    k_points: int = 15
    x_max: float = 0.033
    delta_t_star: float = 0.0
    eta_robust: float = 1e-7
    max_iters: int = 1000
    grad_tol: float = 1e-10
    cost_tol: float = 1e-15
    exact_threshold: float = 1e-6
    restarts: int = 8
    perturbation: float = 0.1
    seed: int = 0
    threads: int = 1
    controls: tuple[str, ...] | None = None
    omega_mw_min: float = 0.0
    production: bool = False

    def __post_init__(self):
        if self.controls is not None:
            object.__setattr__(self, "controls", tuple(self.controls))
        self.validate()

    def validate(self) -> None:
        """
        Check every field.

        :raise PlanValidationError: Naming the first invalid field.
        """
        for name in ("n_steps", "k_points", "max_iters", "restarts", "threads"):
            if int(getattr(self, name)) < 1:
                raise PlanValidationError(name, "must be a positive integer")
        if self.k_points % 2 == 0:
            raise PlanValidationError("k_points", "must be odd so that x = 0 is a node")

        for name in ("epsilon", "eta0", "eta_robust", "x_max", "delta_t_star", "perturbation", "omega_mw_min"):
            if getattr(self, name) < 0:
                raise PlanValidationError(name, "must be >= 0")
        for name in ("dT", "grad_tol", "cost_tol"):
            if not getattr(self, name) > 0:
                raise PlanValidationError(name, "must be > 0")

        if self.t_start <= 0:
            raise PlanValidationError("t_start", "must be > 0")
        if self.t_max < self.t_start:
            raise PlanValidationError("t_max", f"must be >= t_start ({self.t_start})")
        if not 0 < self.exact_threshold < 1:
            raise PlanValidationError("exact_threshold", "must be in (0, 1)")
        if self.production and self.epsilon < PRODUCTION_MIN_EPSILON:
            raise PlanValidationError("epsilon", f"production runs need epsilon >= {PRODUCTION_MIN_EPSILON}")

    def as_dict(self) -> dict[str, Any]:
        return {f.name: getattr(self, f.name) for f in fields(self)}

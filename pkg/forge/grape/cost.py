"""
GRAPE cost functions: exact-gate infidelity with endpoint constraints, the smoothness
regulariser and the distance-fluctuation robust cost, all with exact gradients.
"""
import logging
from collections.abc import Callable, Collection, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from forge.base import Result
from forge.grape.exception import PlanValidationError
from forge.grape.gradient import fidelity_gradient, FidelityGradient
from forge.logger import ForgeLogger
from forge.printer import PrettyPrinter
from forge.propagator import evolve, bell_fidelity
from forge.statespace import GateModel, Pulse, family_for, default_controls
from forge.statespace.exception import ModelValidationError
from forge.types import RealArray

log: ForgeLogger = logging.getLogger(__name__)

type CostFunction = Callable[[Pulse], "CostReport"]


###########################################################################
## Parameter layout
###########################################################################
@dataclass(frozen=True)
class ParameterLayout(PrettyPrinter):
    """
    Packs a :py:class:`Pulse` into the flat optimiser vector and back.

    The vector holds the N samples of each free control in order, then Δ_o, then θ.
    """
    controls: tuple[str, ...]
    n_steps: int
    omega_mw_min: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "controls", tuple(self.controls))
        if not self.controls:
            raise PlanValidationError("controls", "at least one control must be free")
        if not (np.isfinite(self.omega_mw_min) and self.omega_mw_min >= 0):
            raise PlanValidationError("omega_mw_min", "the lower bound of Ω_mw must be finite and >= 0")

    @property
    def size(self) -> int:
        return len(self.controls) * self.n_steps + 2

    def index(self, control: str) -> slice:
        """The positions of the samples of ``control`` in the vector"""
        i = self.controls.index(control)
        return slice(i * self.n_steps, (i + 1) * self.n_steps)

    def pack(self, pulse: Pulse) -> RealArray:
        return np.concatenate([pulse.control(name) for name in self.controls] + [[pulse.delta_o, pulse.theta]])

    def unpack(self, x: RealArray, template: Pulse) -> Pulse:
        """Build a pulse from ``x``, taking any fixed controls and the total time from ``template``"""
        controls = {name: x[self.index(name)] for name in self.controls}
        if "omega_mw" in controls:
            controls["omega_mw"] = np.maximum(controls["omega_mw"], self.omega_mw_min)
        return template.with_controls(**controls).with_scalars(delta_o=float(x[-2]), theta=float(x[-1]))

    def gradient(self, fidelity: FidelityGradient) -> RealArray:
        """The gradient of the infidelity 1 - F in vector order"""
        parts = [fidelity.controls[name] for name in self.controls]
        return -np.concatenate(parts + [[fidelity.delta_o, fidelity.theta]])

    def bounds(self) -> list[tuple[float | None, float | None]]:
        """L-BFGS-B bounds: Ω_mw >= ``omega_mw_min`` and everything else unbounded"""
        bounds = []
        for name in self.controls:
            bounds.extend([(self.omega_mw_min, None) if name == "omega_mw" else (None, None)] * self.n_steps)
        return bounds + [(None, None), (None, None)]

    def as_dict(self) -> dict[str, Any]:
        return {"controls": self.controls, "n_steps": self.n_steps, "omega_mw_min": self.omega_mw_min, "size": self.size}


def layout_for(
        model: GateModel, pulse: Pulse, controls: Collection[str] | None = None, omega_mw_min: float = 0.0
) -> ParameterLayout:
    """The layout of the free ``controls``, defaulting to the family's own"""
    controls = tuple(controls) if controls else tuple(default_controls(model, pulse))
    return ParameterLayout(controls=controls, n_steps=pulse.n_steps, omega_mw_min=omega_mw_min)


###########################################################################
## Cost report
###########################################################################
@dataclass(frozen=True)
class CostReport(Result):
    """
    The value and gradient of a GRAPE cost.

    :param bell_infidelity: 1 - F, or 1 - mean F over the nodes of the robust cost.
    :param endpoint_penalty: (Ω_mw(t_0)/Ω_o)² + (Ω_mw(t_{N-1})/Ω_o)² when Ω_mw is free.
    :param smoothness_penalty: The unweighted N·Σ_f Σ_i (f_{i+1} - f_i)².
    :param eta: Weight of the smoothness penalty.
    :param total: bell_infidelity + endpoint_penalty + η·smoothness_penalty.
    :param gradient: ∂total over the free controls, then Δ_o, then θ.
    """
    bell_infidelity: float
    endpoint_penalty: float
    smoothness_penalty: float
    eta: float
    total: float
    gradient: RealArray = field(repr=False)
    layout: ParameterLayout = field(repr=False)


def _check_decay_free(model: GateModel) -> None:
    if model.has_decay:
        raise ModelValidationError("gamma_1", "GRAPE costs need a decay-free model")


def endpoint_penalty(pulse: Pulse, model: GateModel, layout: ParameterLayout) -> tuple[float, RealArray]:
    """The endpoint constraint on the microwave amplitude and its gradient in vector order"""
    gradient = np.zeros(layout.size)
    if "omega_mw" not in layout.controls:
        return 0.0, gradient

    omega = pulse.omega_mw
    scale = model.omega_o ** 2
    index = layout.index("omega_mw")
    penalty = (omega[0] ** 2 + omega[-1] ** 2) / scale

    gradient[index.start] += 2 * omega[0] / scale
    gradient[index.stop - 1] += 2 * omega[-1] / scale
    return float(penalty), gradient


def smoothness_penalty(pulse: Pulse, layout: ParameterLayout) -> tuple[float, RealArray]:
    """The unweighted regulariser N·Σ_f Σ_i (f_{i+1} - f_i)² over the free controls and its gradient"""
    gradient = np.zeros(layout.size)
    penalty = 0.0
    n_steps = pulse.n_steps

    for name in layout.controls:
        differences = np.diff(pulse.control(name))
        penalty += n_steps * float(np.sum(differences ** 2))

        grad = np.zeros(n_steps)
        grad[:-1] -= 2 * n_steps * differences
        grad[1:] += 2 * n_steps * differences
        gradient[layout.index(name)] = grad

    return penalty, gradient


def _assemble(
        pulse: Pulse,
        model: GateModel,
        layout: ParameterLayout,
        infidelity: float,
        infidelity_gradient: RealArray,
        eta: float,
) -> CostReport:
    endpoint, endpoint_grad = endpoint_penalty(pulse, model, layout)
    smooth, smooth_grad = smoothness_penalty(pulse, layout)

    return CostReport(
        bell_infidelity=infidelity,
        endpoint_penalty=endpoint,
        smoothness_penalty=smooth,
        eta=eta,
        total=infidelity + endpoint + eta * smooth,
        gradient=infidelity_gradient + endpoint_grad + eta * smooth_grad,
        layout=layout,
    )


def _infidelity(pulse: Pulse, model: GateModel, layout: ParameterLayout) -> tuple[float, RealArray]:
    result = fidelity_gradient(family_for(model, pulse), layout.controls)
    return 1.0 - result.fidelity, layout.gradient(result)


###########################################################################
## Costs
###########################################################################
def cost_exact(pulse: Pulse, model: GateModel, controls: Collection[str] | None = None) -> CostReport:
    """
    Evaluate C = 1 - F + (Ω_mw(t_0)/Ω_o)² + (Ω_mw(t_{N-1})/Ω_o)² with its exact gradient.

    :param controls: The free controls. Defaults to the controls of the Hamiltonian family.
    """
    return cost_regularized(pulse, model, eta=0.0, controls=controls)


def cost_regularized(
        pulse: Pulse, model: GateModel, eta: float, controls: Collection[str] | None = None
) -> CostReport:
    """Evaluate the exact cost plus η·N·Σ_f Σ_i (f_{i+1} - f_i)² over the free controls"""
    if eta < 0:
        raise PlanValidationError("eta", "must be >= 0")
    _check_decay_free(model)

    layout = layout_for(model, pulse, controls)
    infidelity, gradient = _infidelity(pulse, model, layout)
    return _assemble(pulse, model, layout, infidelity, gradient, eta)


def fluctuation_nodes(x_max: float, k_points: int) -> RealArray:
    """K equally spaced relative distance fluctuations spanning [-x_max, x_max]"""
    if k_points < 1 or k_points % 2 == 0:
        raise PlanValidationError("k_points", "must be a positive odd integer")
    if k_points == 1 or x_max == 0:
        return np.zeros(1)
    return np.linspace(-x_max, x_max, k_points)


def cost_robust(
        pulse: Pulse,
        model: GateModel,
        x_max: float,
        k_points: int,
        eta: float = 0.0,
        controls: Collection[str] | None = None,
        threads: int = 1,
) -> CostReport:
    """
    Evaluate C = 1 - mean_x F(x) over equally spaced relative distance fluctuations x in [-x_max, x_max],
    where each node rescales J -> J(1 - 3x) and V_ij -> V_ij(1 - 6x).

    The endpoint and smoothness terms are added once. Nodes are evaluated on ``threads`` workers
    and reduced in node order.
    """
    if x_max < 0:
        raise PlanValidationError("x_max", "must be >= 0")
    if eta < 0:
        raise PlanValidationError("eta", "must be >= 0")
    _check_decay_free(model)

    layout = layout_for(model, pulse, controls)
    nodes = fluctuation_nodes(x_max, k_points)

    def evaluate(x: float) -> tuple[float, RealArray]:
        return _infidelity(pulse, model.with_fluctuation(x), layout)

    results = _map_ordered(evaluate, nodes, threads)
    infidelity = float(np.mean([value for value, _ in results]))
    gradient = np.mean([grad for _, grad in results], axis=0)
    return _assemble(pulse, model, layout, infidelity, gradient, eta)


def _map_ordered[T](func: Callable[[Any], T], items: Sequence[Any], threads: int) -> list[T]:
    if threads <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as executor:
        return list(executor.map(func, items))


def fluctuation_profile(pulse: Pulse, model: GateModel, xs: Sequence[float], threads: int = 1) -> RealArray:
    """The Bell infidelity 1 - F(x) of ``pulse`` at each relative distance fluctuation in ``xs``"""
    def infidelity(x: float) -> float:
        return 1.0 - bell_fidelity(evolve(pulse, model.with_fluctuation(x)), pulse.theta)

    return np.array(_map_ordered(infidelity, list(xs), threads))

from pathlib import Path
from typing import Any

import numpy as np

from forge.statespace import Pulse
from forge.types import ForgeEnum

path_tests = Path(__file__).parent
path_root = path_tests.parent
path_resources = path_tests.joinpath("__resources")

path_configs = path_resources.joinpath("configs")
path_golden_record = path_resources.joinpath("golden_run").with_suffix(".json")
path_golden_pulse = path_resources.joinpath("golden_pulse").with_suffix(".json")


def idfn(value: Any) -> str | None:
    """Generate readable test IDs for enum and float parameters"""
    if isinstance(value, ForgeEnum):
        return value.name
    elif isinstance(value, float):
        return f"{value:g}"
    return value


def random_pulse(n_steps: int = 10, total_time: float = 5.0, seed: int = 0) -> Pulse:
    """Generates a four-level pulse with random phase and non-negative amplitude samples"""
    rng = np.random.default_rng(seed)
    return Pulse(
        total_time=total_time,
        controls={"phi_mw": rng.uniform(-np.pi, np.pi, n_steps), "omega_mw": rng.uniform(0, 3, n_steps)},
        delta_o=float(rng.uniform(-0.5, 0.5)),
        theta=float(rng.uniform(0, 2 * np.pi)),
    )


def finite_difference(func, x: np.ndarray, step: float = 1e-6) -> np.ndarray:
    """Central finite-difference gradient of the scalar ``func`` at ``x``"""
    gradient = np.zeros_like(x)
    for i in range(len(x)):
        shift = np.zeros_like(x)
        shift[i] = step
        gradient[i] = (func(x + shift) - func(x - shift)) / (2 * step)
    return gradient

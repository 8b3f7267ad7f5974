from dataclasses import replace

import numpy as np
import pytest

from forge.grape import ParameterLayout, PlanValidationError, layout_for, fluctuation_nodes, fluctuation_profile
from forge.grape import cost_exact, cost_regularized, cost_robust, endpoint_penalty, smoothness_penalty
from forge.grape import amplitude_gradient
from forge.printer import PrettyPrinter
from forge.propagator import evolve, bell_fidelity
from forge.statespace import GateModel, GateScheme, Pulse, Sector, ModelValidationError, FourLevelFamily
from tests.testers import PrettyPrinterTester
from tests.utils import random_pulse, finite_difference


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    return float(np.linalg.norm(analytic - numeric) / max(np.linalg.norm(numeric), 1e-12))


def numeric_gradient(cost, pulse: Pulse, layout: ParameterLayout) -> np.ndarray:
    return finite_difference(lambda x: cost(layout.unpack(x, pulse)).total, layout.pack(pulse))


###########################################################################
## Layout
###########################################################################
class TestParameterLayout(PrettyPrinterTester):

    @pytest.fixture
    def obj(self) -> PrettyPrinter:
        return ParameterLayout(controls=["phi_mw", "omega_mw"], n_steps=12, omega_mw_min=0.1)

    def test_pack_unpack(self, obj: ParameterLayout, pulse: Pulse):
        x = obj.pack(pulse)
        assert obj.size == 2 * 12 + 2
        assert len(x) == obj.size
        assert np.array_equal(x[obj.index("omega_mw")], pulse.omega_mw)
        assert x[-2] == pulse.delta_o
        assert x[-1] == pulse.theta

        restored = obj.unpack(x, pulse)
        assert np.array_equal(restored.phi_mw, pulse.phi_mw)
        assert restored.delta_o == pulse.delta_o
        assert restored.theta == pulse.theta
        assert restored.total_time == pulse.total_time

    def test_unpack_clamps_amplitude(self, obj: ParameterLayout, pulse: Pulse):
        x = obj.pack(pulse)
        x[obj.index("omega_mw")] = -1.0
        assert np.all(obj.unpack(x, pulse).omega_mw == 0.1)

    def test_bounds(self, obj: ParameterLayout):
        bounds = obj.bounds()
        assert len(bounds) == obj.size
        assert bounds[0] == (None, None)
        assert bounds[12] == (0.1, None)
        assert bounds[-1] == (None, None)

    def test_fixed_controls_come_from_template(self, pulse: Pulse):
        layout = ParameterLayout(controls=["phi_mw"], n_steps=12)
        x = layout.pack(pulse)
        x[:12] = 0.0
        restored = layout.unpack(x, pulse)
        assert np.array_equal(restored.omega_mw, pulse.omega_mw)
        assert np.all(restored.phi_mw == 0)

    def test_validation(self):
        with pytest.raises(PlanValidationError):
            ParameterLayout(controls=[], n_steps=4)
        with pytest.raises(PlanValidationError):
            ParameterLayout(controls=["omega_mw"], n_steps=4, omega_mw_min=-0.5)

    def test_layout_for(self, model: GateModel, pulse: Pulse):
        assert layout_for(model, pulse).controls == ("phi_mw", "omega_mw")
        assert layout_for(model, pulse, controls=["phi_mw"]).controls == ("phi_mw",)


###########################################################################
## Penalties
###########################################################################
def test_endpoint_penalty(model: GateModel):
    pulse = Pulse(total_time=1.0, controls={"phi_mw": np.zeros(4), "omega_mw": [0.5, 1.0, 1.0, 2.0]})
    layout = ParameterLayout(controls=["phi_mw", "omega_mw"], n_steps=4)
    penalty, gradient = endpoint_penalty(pulse, model, layout)
    assert penalty == pytest.approx(0.25 + 4.0)
    assert gradient[4] == pytest.approx(1.0)
    assert gradient[7] == pytest.approx(4.0)
    assert np.count_nonzero(gradient) == 2

    penalty, gradient = endpoint_penalty(pulse, model, ParameterLayout(controls=["phi_mw"], n_steps=4))
    assert penalty == 0
    assert not gradient.any()


def test_smoothness_penalty():
    pulse = Pulse(total_time=1.0, controls={"phi_mw": [0.0, 1.0, 3.0], "omega_mw": [1.0, 1.0, 1.0]})
    layout = ParameterLayout(controls=["phi_mw", "omega_mw"], n_steps=3)
    penalty, gradient = smoothness_penalty(pulse, layout)

    assert penalty == pytest.approx(3 * (1.0 + 4.0))
    numeric = finite_difference(lambda x: smoothness_penalty(layout.unpack(x, pulse), layout)[0], layout.pack(pulse))
    assert np.allclose(gradient, numeric, atol=1e-6)


###########################################################################
## Costs
###########################################################################
def test_cost_exact_terms(model: GateModel, pulse: Pulse):
    report = cost_exact(pulse, model)
    infidelity = 1 - bell_fidelity(evolve(pulse, model), pulse.theta)

    assert report.bell_infidelity == pytest.approx(infidelity, abs=1e-12)
    assert report.eta == 0
    assert report.total == pytest.approx(report.bell_infidelity + report.endpoint_penalty)
    assert report.gradient.shape == (report.layout.size,)


@pytest.mark.parametrize("seed", range(10))
def test_exact_gradient_four_level(model: GateModel, seed: int):
    pulse = random_pulse(n_steps=6, total_time=4.0, seed=seed)
    report = cost_exact(pulse, model)
    numeric = numeric_gradient(lambda p: cost_exact(p, model), pulse, report.layout)
    assert relative_error(report.gradient, numeric) < 1e-6


def test_regularized_gradient(model: GateModel, pulse: Pulse):
    report = cost_regularized(pulse, model, eta=1e-2)
    assert report.total == pytest.approx(
        report.bell_infidelity + report.endpoint_penalty + 1e-2 * report.smoothness_penalty
    )

    numeric = numeric_gradient(lambda p: cost_regularized(p, model, eta=1e-2), pulse, report.layout)
    assert relative_error(report.gradient, numeric) < 1e-6


def test_gradient_infinite_j(model: GateModel, pulse: Pulse):
    infinite = replace(model, infinite_j=True)
    report = cost_exact(pulse, infinite)
    numeric = numeric_gradient(lambda p: cost_exact(p, infinite), pulse, report.layout)
    assert relative_error(report.gradient, numeric) < 1e-6


def test_gradient_single_control(model: GateModel, pulse: Pulse):
    report = cost_exact(pulse, model, controls=["phi_mw"])
    assert report.layout.size == pulse.n_steps + 2
    assert report.endpoint_penalty == 0

    numeric = numeric_gradient(lambda p: cost_exact(p, model, controls=["phi_mw"]), pulse, report.layout)
    assert relative_error(report.gradient, numeric) < 1e-6


def test_gradient_effective():
    model = GateModel(scheme=GateScheme.EFFECTIVE_VDW)
    rng = np.random.default_rng(3)
    pulse = Pulse(total_time=7.0, controls={"inv_tau": rng.normal(0, 2, 8)}, delta_o=0.2, theta=1.3)

    report = cost_regularized(pulse, model, eta=1e-3)
    numeric = numeric_gradient(lambda p: cost_regularized(p, model, eta=1e-3), pulse, report.layout)
    assert relative_error(report.gradient, numeric) < 1e-6


def test_gradient_blockade():
    model = GateModel(scheme=GateScheme.BLOCKADE, v11=3.0)
    rng = np.random.default_rng(4)
    pulse = Pulse(total_time=8.0, controls={"phi_o": rng.uniform(-1, 1, 8)}, delta_o=-0.1, theta=2.0)

    report = cost_exact(pulse, model)
    numeric = numeric_gradient(lambda p: cost_exact(p, model), pulse, report.layout)
    assert relative_error(report.gradient, numeric) < 1e-6


def test_gradient_piecewise(model: GateModel):
    pulse = Pulse(
        total_time=0.4,
        controls={"delta_mw": np.linspace(-3, 3, 5), "omega_mw": np.full(5, 10.0)},
        theta=3 * np.pi / 2,
    )
    report = cost_exact(pulse, model)
    assert report.layout.controls == ("delta_mw",)

    numeric = numeric_gradient(lambda p: cost_exact(p, model), pulse, report.layout)
    assert relative_error(report.gradient, numeric) < 1e-6


def test_decay_is_rejected(pulse: Pulse):
    model = GateModel(gamma_1=1e-3)
    with pytest.raises(ModelValidationError):
        cost_exact(pulse, model)
    with pytest.raises(ModelValidationError):
        cost_robust(pulse, model, x_max=0.01, k_points=3)
    with pytest.raises(ModelValidationError):
        amplitude_gradient(FourLevelFamily(model, pulse).steps(Sector.S01), ["phi_mw"])


def test_negative_eta_is_rejected(model: GateModel, pulse: Pulse):
    with pytest.raises(PlanValidationError):
        cost_regularized(pulse, model, eta=-1.0)


###########################################################################
## Robust cost
###########################################################################
def test_fluctuation_nodes():
    assert np.array_equal(fluctuation_nodes(0.0, 1), [0.0])
    assert np.array_equal(fluctuation_nodes(0.0, 5), [0.0])
    assert np.allclose(fluctuation_nodes(0.03, 5), [-0.03, -0.015, 0.0, 0.015, 0.03])

    with pytest.raises(PlanValidationError):
        fluctuation_nodes(0.03, 4)


def test_robust_cost_single_node_matches_regularized(model: GateModel, pulse: Pulse):
    robust = cost_robust(pulse, model, x_max=0.0, k_points=1, eta=1e-3)
    regular = cost_regularized(pulse, model, eta=1e-3)
    assert robust.total == pytest.approx(regular.total, abs=1e-14)
    assert np.allclose(robust.gradient, regular.gradient, atol=1e-14)


def test_robust_cost_is_mean_over_nodes(model: GateModel, pulse: Pulse):
    report = cost_robust(pulse, model, x_max=0.03, k_points=3)
    profile = fluctuation_profile(pulse, model, fluctuation_nodes(0.03, 3))
    assert report.bell_infidelity == pytest.approx(np.mean(profile), abs=1e-12)

    numeric = numeric_gradient(lambda p: cost_robust(p, model, x_max=0.03, k_points=3), pulse, report.layout)
    assert relative_error(report.gradient, numeric) < 1e-6


def test_robust_cost_is_thread_independent(model: GateModel, pulse: Pulse):
    single = cost_robust(pulse, model, x_max=0.03, k_points=5, threads=1)
    threaded = cost_robust(pulse, model, x_max=0.03, k_points=5, threads=3)
    assert single.total == threaded.total
    assert np.array_equal(single.gradient, threaded.gradient)


def test_fluctuation_profile(model: GateModel, pulse: Pulse):
    profile = fluctuation_profile(pulse, model, [0.0, 0.02], threads=2)
    assert profile[0] == pytest.approx(1 - bell_fidelity(evolve(pulse, model), pulse.theta))
    assert profile[1] == pytest.approx(1 - bell_fidelity(evolve(pulse, model.with_fluctuation(0.02)), pulse.theta))

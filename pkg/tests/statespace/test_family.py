from dataclasses import replace

import numpy as np
import pytest

from forge.statespace import GateModel, GateScheme, Pulse, Sector, SectorError, ModelValidationError
from forge.statespace import FourLevelFamily, EffectiveVdwFamily, BlockadeFamily, PiecewiseFamily
from forge.statespace import family_for, default_controls, lab_frame_block, blockade_block
from forge.statespace import EffectiveVdwControls, build_effective_vdw_blocks, rotated_frame_block
from tests.utils import idfn


@pytest.fixture
def piecewise_pulse() -> Pulse:
    return Pulse(total_time=0.5, controls={"delta_mw": np.linspace(-1, 1, 5), "omega_mw": np.full(5, 10.0)})


def test_family_dispatch(model: GateModel, pulse: Pulse, piecewise_pulse: Pulse):
    assert isinstance(family_for(model, pulse), FourLevelFamily)
    assert isinstance(family_for(model, piecewise_pulse), PiecewiseFamily)
    assert family_for(model, piecewise_pulse, laser_in_middle=True).laser_in_middle

    effective = Pulse(total_time=1.0, controls={"inv_tau": [0.0, 1.0]})
    assert isinstance(family_for(model, effective), EffectiveVdwFamily)
    assert isinstance(family_for(replace(model, scheme=GateScheme.EFFECTIVE_VDW), effective), EffectiveVdwFamily)

    blockade = Pulse(total_time=1.0, controls={"phi_o": [0.0, 1.0]})
    assert isinstance(family_for(model, blockade), BlockadeFamily)
    assert isinstance(family_for(GateModel(scheme=GateScheme.BLOCKADE, v11=5.0), blockade), BlockadeFamily)


def test_missing_controls(model: GateModel, pulse: Pulse):
    with pytest.raises(ModelValidationError):
        BlockadeFamily(model, pulse)
    with pytest.raises(ModelValidationError):
        family_for(replace(model, scheme=GateScheme.EFFECTIVE_VDW), pulse)


def test_default_controls(model: GateModel, piecewise_pulse: Pulse):
    assert tuple(default_controls(model)) == ("phi_mw", "omega_mw")
    assert tuple(default_controls(model, piecewise_pulse)) == ("delta_mw",)
    assert tuple(default_controls(replace(model, scheme=GateScheme.EFFECTIVE_VDW))) == ("inv_tau",)
    assert tuple(default_controls(GateModel(scheme=GateScheme.BLOCKADE))) == ("phi_o",)


@pytest.mark.parametrize("sector", [Sector.S01, Sector.S10, Sector.S11, Sector.FULL], ids=idfn)
def test_four_level_steps_match_builders(model: GateModel, pulse: Pulse, sector: Sector):
    steps = FourLevelFamily(model, pulse).steps(sector)
    shifted = replace(model, delta_o=pulse.delta_o)

    assert steps.n_steps == pulse.n_steps
    assert steps.control_slice == slice(0, pulse.n_steps)
    assert np.allclose(steps.dts, pulse.dt)
    for n in range(pulse.n_steps):
        expected = lab_frame_block(shifted, omega_mw=pulse.omega_mw[n], phi_mw=pulse.phi_mw[n], sector=sector)
        assert steps.labels == expected.labels
        assert np.allclose(steps.hamiltonians[n], expected.matrix)


def test_four_level_derivatives(model: GateModel, pulse: Pulse):
    steps = FourLevelFamily(model, pulse).steps(Sector.S11)
    step, h = 3, 1e-6

    for name in ("phi_mw", "omega_mw"):
        def shifted(delta: float) -> np.ndarray:
            values = pulse.control(name).copy()
            values[step] += delta
            return FourLevelFamily(model, pulse.with_controls(**{name: values})).steps(Sector.S11).hamiltonians[step]

        numeric = (shifted(h) - shifted(-h)) / (2 * h)
        assert np.allclose(steps.derivatives[name][step], numeric, atol=1e-8)

    plus = FourLevelFamily(model, pulse.with_scalars(delta_o=pulse.delta_o + h)).steps(Sector.S11).hamiltonians[0]
    minus = FourLevelFamily(model, pulse.with_scalars(delta_o=pulse.delta_o - h)).steps(Sector.S11).hamiltonians[0]
    assert np.allclose(steps.delta_o_operator, (plus - minus) / (2 * h), atol=1e-8)


def test_four_level_infinite_j(model: GateModel, pulse: Pulse):
    family = FourLevelFamily(replace(model, infinite_j=True), pulse)
    assert family.steps(Sector.S11).dim == 4
    assert family.steps(Sector.S01).dim == 3
    assert family.steps(Sector.S10).dim == 3


def test_effective_steps_match_builders():
    controls = EffectiveVdwControls(inv_tau=[-3.0, 0.0, 2.5], delta_o=0.4)
    pulse = controls.to_pulse(total_time=3.0)
    family = EffectiveVdwFamily(GateModel(scheme=GateScheme.EFFECTIVE_VDW), pulse)

    single, double = family.steps("01"), family.steps("11")
    for n in range(controls.n_steps):
        block_01, block_11 = build_effective_vdw_blocks(controls, omega_o=1.0, step=n)
        assert np.allclose(single.hamiltonians[n], block_01.matrix)
        assert np.allclose(double.hamiltonians[n], block_11.matrix)

    # the derivative is the same for every step
    derivative = double.derivatives["inv_tau"]
    assert np.allclose(derivative[0], (double.hamiltonians[2] - double.hamiltonians[1]) / 2.5)


def test_blockade_steps_match_builders():
    model = GateModel(scheme=GateScheme.BLOCKADE, v11=4.0, gamma_1=0.01)
    pulse = Pulse(total_time=2.0, controls={"phi_o": [0.0, 0.5, -1.0]}, delta_o=0.2)
    steps = BlockadeFamily(model, pulse).steps(Sector.S11)

    for n, phi in enumerate(pulse.control("phi_o")):
        expected = blockade_block(1.0, delta=0.2, v=4.0, sector=Sector.S11, phi_o=phi, gamma=0.01)
        assert np.allclose(steps.hamiltonians[n], expected.matrix)


def test_piecewise_steps(model: GateModel, piecewise_pulse: Pulse):
    family = PiecewiseFamily(model, piecewise_pulse)
    steps = family.steps(Sector.S11)
    n_steps = piecewise_pulse.n_steps

    assert family.pi_time == pytest.approx(np.pi)
    assert steps.n_steps == n_steps + 2
    assert steps.control_slice == slice(1, n_steps + 1)
    assert steps.dts[0] == steps.dts[-1] == pytest.approx(np.pi)
    assert np.allclose(steps.dts[1:-1], 0.1)
    assert steps.derivatives["delta_mw"].shape == (n_steps, 6, 6)

    laser_on = rotated_frame_block(model, omega_mw=0.0, delta_mw=0.0, sector=Sector.S11)
    assert np.allclose(steps.hamiltonians[0], laser_on.matrix)
    assert np.allclose(steps.hamiltonians[-1], laser_on.matrix)

    middle = rotated_frame_block(model, omega_mw=10.0, delta_mw=-1.0, sector=Sector.S11, laser=False)
    assert np.allclose(steps.hamiltonians[1], middle.matrix)

    always_on = PiecewiseFamily(model, piecewise_pulse, laser_in_middle=True, outer_time=0.0).steps(Sector.S11)
    middle = rotated_frame_block(model, omega_mw=10.0, delta_mw=1.0, sector=Sector.S11, laser=True)
    assert np.allclose(always_on.hamiltonians[-2], middle.matrix)
    assert always_on.dts[0] == 0.0


def test_piecewise_validation(model: GateModel, piecewise_pulse: Pulse):
    with pytest.raises(ModelValidationError):
        PiecewiseFamily(replace(model, omega_o=0.0), piecewise_pulse)
    with pytest.raises(ModelValidationError):
        PiecewiseFamily(model, piecewise_pulse, outer_time=-1.0)


def test_initial_state(model: GateModel, pulse: Pulse):
    steps = FourLevelFamily(model, pulse).steps(Sector.S11)
    assert np.array_equal(steps.initial_state(), np.eye(6)[0])
    assert np.array_equal(steps.initial_state("r1r1"), np.eye(6)[3])
    assert np.array_equal(steps.excitations, [0, 1, 1, 2, 2, 2])

    with pytest.raises(SectorError):
        steps.initial_state("01")


def test_effective_model_is_the_large_microwave_limit():
    from forge.propagator import evolve, bell_fidelity, final_amplitudes

    rng = np.random.default_rng(11)
    n_steps = 20
    omega_mw = 1e3
    inv_tau = rng.uniform(0.5, 3.0, n_steps) * rng.choice([-1.0, 1.0], n_steps)
    model = GateModel(infinite_j=True)

    effective = EffectiveVdwControls(inv_tau=inv_tau, delta_o=0.1, theta=np.pi).to_pulse(total_time=7.0)
    dressed = Pulse(
        total_time=7.0,
        controls={"delta_mw": omega_mw ** 2 / inv_tau, "omega_mw": np.full(n_steps, omega_mw)},
        delta_o=0.1,
        theta=np.pi,
    )
    family = PiecewiseFamily(model=model, pulse=dressed, laser_in_middle=True, outer_time=0.0)

    expected = evolve(effective, model)
    actual = evolve(dressed, model, family=family)
    assert np.allclose(final_amplitudes(actual), final_amplitudes(expected), atol=1e-3)
    assert bell_fidelity(actual, np.pi) == pytest.approx(bell_fidelity(expected, np.pi), abs=1e-3)

import numpy as np
import pytest
from pytest_mock import MockerFixture

from forge.grape import ConvergenceError, OptimizationPlan, SweepPoint, TimeSweepResult
from forge.protocols import BaselineResult, baseline_model, vdw_baseline_optimize
from forge.protocols import ProtocolValidationError, InfeasibleProtocolError
from forge.statespace import GateScheme, Pulse


def sweep_result(t_star: float, rydberg_time: float = 3.0) -> TimeSweepResult:
    pulse = Pulse(total_time=t_star, controls={"phi_o": np.zeros(4)}, theta=np.pi)
    point = SweepPoint(total_time=t_star, infidelity=1e-7, eta=0.0, iterations=5, converged=True)
    return TimeSweepResult(t_star=t_star, pulse=pulse, infidelity=1e-7, rydberg_time=rydberg_time, trace=(point,))


def test_baseline_model():
    model = baseline_model(2.5)
    assert model.scheme == GateScheme.BLOCKADE
    assert model.v11 == 2.5

    with pytest.raises(ProtocolValidationError):
        baseline_model(np.inf)


def test_branches_are_deduplicated(mocker: MockerFixture):
    times = {0: 7.80, 1: 7.62, 2: 7.64, 3: 8.10}
    sweep = mocker.patch(
        "forge.protocols.baseline.time_sweep", side_effect=lambda model, plan: sweep_result(times[plan.seed])
    )
    result = vdw_baseline_optimize(5.0, plan=OptimizationPlan(n_steps=4), branch_starts=4)

    assert sweep.call_count == 4
    assert isinstance(result, BaselineResult)
    assert result.t_star == pytest.approx(7.62)
    assert result.v_over_omega == 5.0
    assert [branch.t_star for branch in result.branches] == pytest.approx([7.62, 7.80, 8.10])
    assert [branch.seed for branch in result.branches] == [1, 0, 3]
    assert result.pulse.total_time == pytest.approx(7.62)


def test_failed_starts_are_skipped(mocker: MockerFixture):
    def sweep(model, plan) -> TimeSweepResult:
        if plan.seed == 0:
            raise ConvergenceError("no gate", trace=[])
        return sweep_result(7.7)

    mocker.patch("forge.protocols.baseline.time_sweep", side_effect=sweep)
    result = vdw_baseline_optimize(5.0, plan=OptimizationPlan(n_steps=4), branch_starts=2)
    assert len(result.branches) == 1
    assert result.branches[0].seed == 1


def test_infeasible(mocker: MockerFixture):
    point = SweepPoint(total_time=9.0, infidelity=0.02, eta=0.0, iterations=20, converged=True)
    mocker.patch("forge.protocols.baseline.time_sweep", side_effect=ConvergenceError("no gate", trace=[point]))

    with pytest.raises(InfeasibleProtocolError) as exc:
        vdw_baseline_optimize(0.2, plan=OptimizationPlan(n_steps=4))
    assert exc.value.best_infidelity == pytest.approx(0.02)

    with pytest.raises(ProtocolValidationError):
        vdw_baseline_optimize(5.0, branch_starts=0)


def test_default_starts_follow_restarts(mocker: MockerFixture):
    sweep = mocker.patch(
        "forge.protocols.baseline.time_sweep", side_effect=lambda model, plan: sweep_result(7.6 + 0.1 * plan.seed)
    )
    result = vdw_baseline_optimize(5.0, plan=OptimizationPlan(n_steps=4, restarts=3))
    assert sweep.call_count == 3
    assert [branch.seed for branch in result.branches] == [0, 1, 2]

    sweep.reset_mock()
    vdw_baseline_optimize(5.0, plan=OptimizationPlan(n_steps=4, restarts=1))
    assert sweep.call_count == 2


@pytest.mark.slow
def test_baseline_runs_several_starts(mocker: MockerFixture):
    import forge.protocols.baseline

    spy = mocker.spy(forge.protocols.baseline, "time_sweep")
    plan = OptimizationPlan(n_steps=30, t_start=7.4, t_max=8.5, dT=0.05, restarts=2, max_iters=300)
    result = vdw_baseline_optimize(50.0, plan=plan)

    assert spy.call_count == 2
    assert [call.args[1].seed for call in spy.call_args_list] == [0, 1]
    assert 1 <= len(result.branches) <= 2
    assert [branch.t_star for branch in result.branches] == sorted(branch.t_star for branch in result.branches)
    assert result.t_star == pytest.approx(result.branches[0].t_star)
    assert result.infidelity < plan.exact_threshold


@pytest.mark.manual
def test_strong_blockade_baseline():
    plan = OptimizationPlan(n_steps=60, t_start=7.0, t_max=8.5, dT=0.01, restarts=4)
    result = vdw_baseline_optimize(100.0, plan=plan)
    assert result.t_star == pytest.approx(7.6, abs=0.1)
    assert result.infidelity < 1e-6


@pytest.mark.manual
def test_moderate_blockade_baseline():
    plan = OptimizationPlan(n_steps=60, t_start=6.5, t_max=8.0, dT=0.01, restarts=4)
    result = vdw_baseline_optimize(1.3, plan=plan)
    assert result.t_star == pytest.approx(7.0, abs=0.1)
    assert result.infidelity < 1e-6

"""
Dispatches CLI commands onto the package operations and writes their outputs.
"""
import logging
from collections.abc import Mapping, Sequence
from dataclasses import replace
from datetime import datetime
from pathlib import Path
from typing import Any

import numpy as np
from dateutil import tz

from forge.catalog import (
    ROWS, RunRecord, lookup, checksum, read_pulse, write_pulse, write_record, write_csv,
)
from forge.cli.config import RunConfig, SWEEP_AXES
from forge.cli.exception import ConfigError
from forge.exception import ForgeError
from forge.grape import ConvergenceError, SweepPoint, time_sweep, fluctuation_profile
from forge.grape import robustify as robustify_pulse
from forge.logger import ForgeLogger
from forge.noise import simulate_noisy_gate
from forge.noise import sweep as noise_sweep
from forge.processors import DynamicProcessor, dynamicprocessormethod
from forge.protocols import (
    InfeasibleProtocolError, piecewise_gate, piecewise_finite_j, vdw_baseline_optimize, two_photon_protocol,
)
from forge.report import report_catalog_rows, report_thermal_configurations, report_sweep
from forge.statespace import Pulse

log: ForgeLogger = logging.getLogger(__name__)

#: Exit code of a successful run
EXIT_OK = 0
#: Exit code of a run stopped by a configuration or validation error
EXIT_INVALID = 2
#: Exit code of a run that did not converge
EXIT_NOT_CONVERGED = 3

#: The config sections each command reads
COMMAND_SECTIONS: Mapping[str, tuple[str, ...]] = {
    "optimize": ("model", "plan", "pulse"),
    "robustify": ("model", "plan", "pulse"),
    "simulate": ("model", "noise", "pulse"),
    "sweep": ("model", "noise", "sweep", "pulse"),
    "piecewise": ("piecewise", "plan"),
    "baseline": ("baseline", "plan"),
    "twophoton": ("model", "twophoton", "noise", "pulse"),
    "tables": ("tables",),
}
#: Header suffix of each control in pulse shape tables
CONTROL_UNITS: Mapping[str, str] = {
    "phi_mw": "_rad",
    "omega_mw": "_omega_o",
    "inv_tau": "_omega_o",
    "phi_o": "_rad",
    "delta_mw": "_omega_o",
}
#: The infidelity-vs-displacement table spans this multiple of the robust window
DISPLACEMENT_SPAN = 2.0
DISPLACEMENT_POINTS = 41

TRACE_COLUMNS = ("total_time_inv_omega_o", "infidelity_1", "eta_1", "iterations", "converged")


###########################################################################
## Table rows
###########################################################################
def trace_rows(trace: Sequence[SweepPoint]) -> list[dict[str, Any]]:
    """Rows of an infidelity-vs-time table"""
    return [
        {
            "total_time_inv_omega_o": point.total_time,
            "infidelity_1": point.infidelity,
            "eta_1": point.eta,
            "iterations": point.iterations,
            "converged": point.converged,
        }
        for point in trace
    ]


def pulse_shape(pulse: Pulse) -> tuple[list[dict[str, Any]], list[str]]:
    """Rows and columns of a pulse shape table sampled at the step midpoints"""
    columns = ["t_inv_omega_o"] + [f"{name}{CONTROL_UNITS.get(name, "_1")}" for name in pulse.controls]
    rows = []
    for i, t in enumerate(pulse.midpoints()):
        row = {"t_inv_omega_o": float(t)}
        row |= {column: float(pulse.controls[name][i]) for column, name in zip(columns[1:], pulse.controls)}
        rows.append(row)
    return rows, columns


def _pulse_metrics(pulse: Pulse) -> dict[str, float]:
    return {"total_time_inv_omega_o": pulse.total_time, "delta_o_omega_o": pulse.delta_o, "theta_rad": pulse.theta}


###########################################################################
## Runner
###########################################################################
class CommandRunner(DynamicProcessor):
    """
    Runs one CLI command from a validated :py:class:`RunConfig`.

    Every section the command reads is validated before any output is written.
    The run record is written last so that its presence marks a completed run.

    :param command: The command to run.
    :param config: The run configuration.
    """

    __slots__ = ("config",)

    @property
    def command(self) -> str:
        return self._processor_name

    @property
    def output_dir(self) -> Path:
        return self.config.output_dir

    def __init__(self, command: str, config: RunConfig):
        super().__init__()
        self.config = config
        self._set_processor_name(command)

    def __call__(self) -> RunRecord:
        log.debug(f"Run {self.command}: START")
        log.info(f"Run {self.command} started at {datetime.now(tz=tz.UTC).isoformat(timespec="seconds")}")
        resolved = self.config.resolved(COMMAND_SECTIONS[self.command])
        record = self._processor_method(resolved)
        write_record(self.output_dir.joinpath("run.json"), record)
        log.info(f"\33[92mWrote outputs of {self.command} to {self.output_dir}\33[0m")
        log.debug(f"Run {self.command}: DONE")
        return record

    def _record(
            self,
            resolved: Mapping[str, Any],
            pulse: Pulse | None,
            metrics: Mapping[str, Any],
            cost_trace: Sequence[Any] = (),
    ) -> RunRecord:
        return RunRecord(
            command=self.command,
            pulse=pulse,
            metrics=dict(metrics),
            cost_trace=tuple(item.json() if hasattr(item, "json") else dict(item) for item in cost_trace),
            config=dict(resolved),
            seed=self.config.seed,
        )

    def _read_pulses(self, required: bool = True) -> dict[str, Pulse]:
        pulses = {}
        for name, path in self.config.pulse_paths(required=required).items():
            try:
                pulses[name] = read_pulse(path)
            except FileNotFoundError as ex:
                raise ConfigError("pulse.path", f"no such file: {path}") from ex
        return pulses

    def _write_pulse_outputs(self, pulse: Pulse) -> None:
        write_pulse(self.output_dir.joinpath("pulse.json"), pulse)
        write_csv(self.output_dir.joinpath("pulse_shape.csv"), *pulse_shape(pulse))

    ###########################################################################
    ## Commands
    ###########################################################################
    @dynamicprocessormethod
    def optimize(self, resolved: Mapping[str, Any]) -> RunRecord:
        """Find the time-optimal exact pulse, optionally warm-started from ``[pulse] path``"""
        model, plan = self.config.model().without_decay(), self.config.plan()
        initial = next(iter(self._read_pulses(required=False).values()), None)

        result = time_sweep(model, plan, initial_pulse=initial)
        self._write_pulse_outputs(result.pulse)
        write_csv(self.output_dir.joinpath("infidelity_vs_time.csv"), trace_rows(result.trace), TRACE_COLUMNS)

        metrics = {
            "t_star_inv_omega_o": result.t_star,
            "rydberg_time_inv_omega_o": result.rydberg_time,
            "infidelity_1": result.infidelity,
        }
        return self._record(resolved, result.pulse, metrics | _pulse_metrics(result.pulse), result.trace)

    @dynamicprocessormethod
    def robustify(self, resolved: Mapping[str, Any]) -> RunRecord:
        """Robustify the pulse at ``[pulse] path``, or the time-optimal pulse when none is given"""
        model, plan = self.config.model().without_decay(), self.config.plan()
        exact = next(iter(self._read_pulses(required=False).values()), None)
        trace: tuple[SweepPoint, ...] = ()
        if exact is None:
            found = time_sweep(model, plan)
            exact, trace = found.pulse, found.trace

        result = robustify_pulse(exact, model, plan)
        self._write_pulse_outputs(result.pulse)

        span = DISPLACEMENT_SPAN * plan.x_max
        xs = np.linspace(-span, span, DISPLACEMENT_POINTS)
        exact_profile = fluctuation_profile(exact, model, xs, threads=plan.threads)
        robust_profile = fluctuation_profile(result.pulse, model, xs, threads=plan.threads)
        rows = [
            {"x_1": float(x), "exact_infidelity_1": float(e), "robust_infidelity_1": float(r)}
            for x, e, r in zip(xs, exact_profile, robust_profile)
        ]
        write_csv(
            self.output_dir.joinpath("infidelity_vs_displacement.csv"),
            rows,
            ("x_1", "exact_infidelity_1", "robust_infidelity_1"),
        )

        metrics = {
            "robust_cost_1": result.robust_cost,
            "exact_robust_cost_1": result.exact_robust_cost,
            "improved": result.improved,
            "iterations": result.iterations,
            "converged": result.converged,
        }
        return self._record(resolved, result.pulse, metrics | _pulse_metrics(result.pulse), trace)

    @dynamicprocessormethod
    def simulate(self, resolved: Mapping[str, Any]) -> RunRecord:
        """Simulate the pulse at ``[pulse] path`` with atomic motion and Rydberg decay"""
        pulse = next(iter(self._read_pulses().values()))
        result = simulate_noisy_gate(
            pulse,
            self.config.model(),
            self.config.noise(),
            check_cutoff=self.config.check_cutoff,
            threads=self.config.thread_count,
        )
        report_thermal_configurations(result)

        table = result.table()
        write_csv(self.output_dir.joinpath("thermal_configurations.csv"), table, list(table[0]))

        metrics = {
            "infidelity_1": result.infidelity,
            "fidelity_1": result.fidelity,
            "fock_cutoff": result.fock_cutoff,
            "cutoff_sensitivity_1": result.cutoff_sensitivity,
        }
        return self._record(resolved, pulse, metrics, table)

    @dynamicprocessormethod
    def sweep(self, resolved: Mapping[str, Any]) -> RunRecord:
        """Sweep the noisy infidelity of the configured pulses along one physical axis"""
        settings = self.config.sweep()
        pulses = self._read_pulses()
        rows = noise_sweep(
            settings["axis"],
            settings["grid"],
            pulses,
            model=self.config.model(),
            noise=self.config.noise(),
            threads=self.config.thread_count,
        )
        report_sweep(rows)

        value_column = SWEEP_AXES[settings["axis"]]
        columns = (value_column, "pulse", "infidelity_1", "status")
        table = [
            {value_column: row.value, "pulse": row.pulse_name, "infidelity_1": row.infidelity, "status": row.status}
            for row in rows
        ]
        write_csv(self.output_dir.joinpath(f"infidelity_vs_{settings["axis"]}.csv"), table, columns)

        metrics = {"points": len(rows), "failed": sum(row.status != "ok" for row in rows)}
        return self._record(resolved, None, metrics, rows)

    @dynamicprocessormethod
    def piecewise(self, resolved: Mapping[str, Any]) -> RunRecord:
        """Build the piecewise gate and optionally refine it at finite J"""
        spec = self.config.piecewise()
        gate = piecewise_gate(spec)
        pulse = gate.pulse
        metrics = {
            "branch": gate.branch,
            "delta_mw_omega_o": gate.delta_mw,
            "mw_time_inv_omega_o": gate.mw_time,
            "theta_rad": gate.theta,
            "predicted_theta_rad": gate.predicted_theta,
            "predicted_time_inv_omega_o": gate.predicted_time,
            "predicted_rydberg_time_inv_omega_o": gate.predicted_rydberg_time,
            "total_time_inv_omega_o": gate.total_time,
            "rydberg_time_inv_omega_o": gate.rydberg_time,
            "infidelity_1": gate.infidelity,
        }

        trace: tuple[SweepPoint, ...] = ()
        if self.config.refine_piecewise and np.isfinite(spec.j_over_omega_mw):
            solution = piecewise_finite_j(spec, plan=self.config.plan())
            pulse, trace = solution.pulse, solution.trace
            metrics |= {
                "refined_mw_time_inv_omega_o": solution.mw_time,
                "refined_mw_time_omega_mw": solution.mw_time_omega_mw,
                "refined_theta_rad": solution.theta,
                "refined_infidelity_1": solution.infidelity,
                "refined_rydberg_time_inv_omega_o": solution.rydberg_time,
            }

        write_csv(self.output_dir.joinpath("pulse_shape.csv"), *pulse_shape(pulse))
        segments = [
            {
                "segment": segment.name,
                "duration_inv_omega_o": segment.duration,
                "laser": segment.laser,
                "omega_mw_omega_o": segment.omega_mw,
                "delta_mw_omega_o": segment.delta_mw,
            }
            for segment in gate.segments
        ]
        write_csv(self.output_dir.joinpath("piecewise_segments.csv"), segments, list(segments[0]))
        return self._record(resolved, pulse, metrics, trace)

    @dynamicprocessormethod
    def baseline(self, resolved: Mapping[str, Any]) -> RunRecord:
        """Find the time-optimal phase-modulated gate of the single-level blockade model"""
        settings = self.config.baseline()
        result = vdw_baseline_optimize(
            settings["v_over_omega"], plan=self.config.plan(), branch_starts=settings.get("branch_starts")
        )

        write_pulse(self.output_dir.joinpath("pulse.json"), result.pulse)
        write_csv(self.output_dir.joinpath("infidelity_vs_time.csv"), trace_rows(result.trace), TRACE_COLUMNS)
        branches = [
            {
                "seed": branch.seed,
                "t_star_inv_omega_o": branch.t_star,
                "infidelity_1": branch.infidelity,
                "rydberg_time_inv_omega_o": branch.rydberg_time,
            }
            for branch in result.branches
        ]
        write_csv(self.output_dir.joinpath("baseline_branches.csv"), branches, list(branches[0]))

        metrics = {
            "v_over_omega_1": result.v_over_omega,
            "t_star_inv_omega_o": result.t_star,
            "rydberg_time_inv_omega_o": result.rydberg_time,
            "infidelity_1": result.infidelity,
            "branches": len(result.branches),
        }
        return self._record(resolved, result.pulse, metrics, result.trace)

    @dynamicprocessormethod
    def twophoton(self, resolved: Mapping[str, Any]) -> RunRecord:
        """Refine the pulse at ``[pulse] path`` for a two-photon excitation and optionally simulate it with noise"""
        settings = self.config.two_photon_settings()
        model = self.config.two_photon()
        base = next(iter(self._read_pulses().values()))

        result = two_photon_protocol(model, base, max_iters=settings["max_iters"], tolerance=settings["tolerance"])
        self._write_pulse_outputs(result.pulse)

        omega_eff_mhz = settings["omega_1_mhz"] * settings["omega_2_mhz"] / (2 * settings["delta_e_mhz"])
        metrics = {
            "omega_eff_mhz": omega_eff_mhz,
            "theta_rad": result.theta,
            "total_time_inv_omega_o": result.total_time,
            "base_infidelity_1": result.base_infidelity,
            "infidelity_1": result.infidelity,
            "iterations": result.iterations,
        }

        if settings["simulate"]:
            noise = self.config.noise()
            if "omega_o" not in self.config.section("noise"):
                noise = replace(noise, omega_o=2 * np.pi * omega_eff_mhz * 1e6)
            noisy = simulate_noisy_gate(result.pulse, model, noise, threads=self.config.thread_count)
            report_thermal_configurations(noisy)
            metrics["noisy_infidelity_1"] = noisy.infidelity

        return self._record(resolved, result.pulse, metrics)

    @dynamicprocessormethod
    def tables(self, resolved: Mapping[str, Any]) -> RunRecord:
        """Report the selected catalog row, or every row, and write them as a table"""
        key = self.config.table_key()
        rows = [lookup(*key)] if key is not None else list(ROWS)
        report_catalog_rows(rows)

        table = [
            {
                "species": row.species,
                "n": row.n,
                "state_pair": row.state_pair.label,
                "distance_um": row.distance_um,
                "j_mhz": row.j_mhz,
                "v11_over_j_1": row.v11_over_j,
                "v12_over_j_1": row.v12_over_j,
                "v22_over_j_1": row.v22_over_j,
                "gamma1_inv_us": row.gamma1_inv_us,
                "gamma2_inv_us": row.gamma2_inv_us,
            }
            for row in rows
        ]
        write_csv(self.output_dir.joinpath("interactions.csv"), table, list(table[0]))
        return self._record(resolved, None, {"rows": len(rows), "checksum": checksum(rows)})

    def as_dict(self) -> dict[str, Any]:
        return {"command": self.command, "config": self.config}


###########################################################################
## Entry
###########################################################################
def run(
        command: str,
        config_path: str | Path | None,
        overrides: Sequence[str] = (),
        output_dir: str | Path | None = None,
        seed: int | None = None,
        threads: int | None = None,
) -> int:
    """
    Run ``command`` with the configuration at ``config_path`` and return the exit code.

    0 on success, 2 on a configuration or validation error and 3 when an optimisation does not converge.
    Errors are logged and never raised.
    """
    try:
        config = RunConfig.load(config_path, overrides=overrides, output_dir=output_dir, seed=seed, threads=threads)
        CommandRunner(command, config)()
    except (ConvergenceError, InfeasibleProtocolError) as ex:
        log.error(f"{command} did not converge: {ex}")
        return EXIT_NOT_CONVERGED
    except ForgeError as ex:
        log.error(f"{command} failed: {type(ex).__name__}: {ex}")
        return EXIT_INVALID
    return EXIT_OK

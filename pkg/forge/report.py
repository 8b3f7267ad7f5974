"""
Meta-functions for providing aligned reports to the user on catalog rows and noise simulations.
"""
import logging
from collections.abc import Iterable

import numpy as np

from forge.catalog import SpeciesRow
from forge.logger import ForgeLogger
from forge.noise import NoisyGateResult, SweepRow
from forge.utils import column_width, fit_to_width, format_float


def report_catalog_rows(rows: Iterable[SpeciesRow]) -> list[SpeciesRow]:
    """
    Report the interaction strengths and lifetimes of the given catalog ``rows``.

    :return: The reported rows.
    """
    # noinspection PyTypeChecker
    logger: ForgeLogger = logging.getLogger(__name__)
    rows = list(rows)
    max_width = column_width([row.key for row in rows], min_width=10, max_width=20)

    logger.info(f"\33[1;95m ->\33[1;97m Reporting on {len(rows)} interaction catalog rows \33[0m")
    logger.print_line()
    for row in rows:
        logger.report(
            f"\33[97m{fit_to_width(row.key, max_width)} \33[0m|"
            f"\33[94m R={row.distance_um:5.2f} µm \33[0m|"
            f"\33[96m J/2π={row.j_mhz:4.0f} MHz \33[0m|"
            f"\33[92m V11/J={row.v11_over_j:+.3f} V12/J={row.v12_over_j:+.3f} V22/J={row.v22_over_j:+.3f} \33[0m|"
            f"\33[93m 1/Γ1={row.gamma1_inv_us:4.0f} µs 1/Γ2={row.gamma2_inv_us:4.0f} µs \33[0m"
        )

    logger.print_line()
    return rows


def report_thermal_configurations(result: NoisyGateResult) -> NoisyGateResult:
    """Report the infidelity of every thermal configuration of a noisy simulation and their weighted mean"""
    # noinspection PyTypeChecker
    logger: ForgeLogger = logging.getLogger(__name__)
    logger.debug("Report thermal configurations: START")

    for row in result.table():
        logger.report(
            f"\33[97m|{row["n_a"]},{row["n_b"]}> \33[0m|"
            f"\33[94m weight {format_float(row["weight_1"], 4)} \33[0m|"
            f"\33[93m infidelity {format_float(row["infidelity_1"], 4)} \33[0m"
        )

    colour = "\33[92m" if result.cutoff_sensitivity is None or result.cutoff_sensitivity < 1e-4 else "\33[91m"
    logger.report(
        f"\33[1;97mThermal average over {len(result.configurations)} configurations \33[0m|"
        f"{colour} infidelity {format_float(result.infidelity, 4)} \33[0m"
    )
    logger.print_line()
    logger.debug("Report thermal configurations: DONE")
    return result


def report_sweep(rows: Iterable[SweepRow]) -> dict[str, dict[str | float, float]]:
    """
    Report the noisy infidelity of every pulse across a sweep.

    :return: Map of pulse name to a map of axis value to infidelity.
    """
    # noinspection PyTypeChecker
    logger: ForgeLogger = logging.getLogger(__name__)
    logger.debug("Report noise sweep: START")

    by_pulse: dict[str, dict[str | float, float]] = {}
    failed: dict[str, int] = {}
    axis = ""
    for row in rows:
        axis = row.axis
        by_pulse.setdefault(row.pulse_name, {})[row.value] = row.infidelity
        failed[row.pulse_name] = failed.get(row.pulse_name, 0) + (row.status != "ok")

    max_width = column_width(by_pulse)
    logger.info(f"\33[1;95m ->\33[1;97m Reporting on noise sweep over {axis} \33[0m")
    for name, values in by_pulse.items():
        finite = {value: infidelity for value, infidelity in values.items() if not np.isnan(infidelity)}
        best = min(finite.items(), key=lambda item: item[1]) if finite else (None, np.nan)
        logger.report(
            f"\33[97m{fit_to_width(name, max_width)} \33[0m|"
            f"\33[94m{len(values):>4} points \33[0m|"
            f"\33[91m{failed[name]:>4} failed \33[0m|"
            f"\33[92m best {format_float(best[1], 4)} at {best[0]} \33[0m"
        )

    logger.print_line()
    logger.debug("Report noise sweep: DONE")
    return by_pulse

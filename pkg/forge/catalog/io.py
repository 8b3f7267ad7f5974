"""
Versioned JSON persistence of pulses and run records, and tidy CSV tables.

Floats keep 17 significant digits of precision, written as their shortest exact representation,
so every file round-trips bit for bit. Run records carry no wall-clock time unless one is given,
so repeated runs write identical files. Timestamps are ISO-8601 in UTC.
"""
import csv
import json
import logging
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from datetime import datetime
from importlib.metadata import version as package_version, PackageNotFoundError
from pathlib import Path
from typing import Any, Literal

from dateutil import tz
from dateutil.parser import isoparse

from forge import MODULE_ROOT
from forge.catalog.exception import SchemaError, CatalogError
from forge.exception import FieldValidationError
from forge.logger import ForgeLogger
from forge.printer import PrettyPrinter, JSON
from forge.statespace import Pulse

log: ForgeLogger = logging.getLogger(__name__)

#: The schema version written to every file
FORMAT_VERSION = 1
#: Header suffixes that state the unit of every CSV column
UNIT_SUFFIXES = ("_omega_o", "_inv_omega_o", "_rad", "_khz", "_mhz", "_um", "_us", "_1")
#: Label columns that carry no physical unit
_UNITLESS_COLUMNS = frozenset({
    "species", "state_pair", "pulse", "status", "branch", "segment", "laser", "seed",
    "n", "n_a", "n_b", "iterations", "converged",
})


def program_version() -> str:
    """The installed version of this package"""
    try:
        return package_version(MODULE_ROOT)
    except PackageNotFoundError:
        return "0.0.0"


###########################################################################
## Schema helpers
###########################################################################
def _require(data: Mapping[str, Any], key: str) -> Any:
    try:
        return data[key]
    except KeyError:
        raise SchemaError(key, "missing key")


def _check_version(data: Mapping[str, Any]) -> None:
    version = _require(data, "format_version")
    if not isinstance(version, int) or isinstance(version, bool) or version != FORMAT_VERSION:
        raise SchemaError("format_version", f"unsupported version {version!r}, expected {FORMAT_VERSION}")


def _as_float(data: Mapping[str, Any], key: str) -> float:
    value = _require(data, key)
    if isinstance(value, bool) or not isinstance(value, int | float):
        raise SchemaError(key, f"expected a number, got {value!r}")
    return float(value)


###########################################################################
## Pulses
###########################################################################
def pulse_to_json(pulse: Pulse) -> JSON:
    """The versioned JSON form of ``pulse``"""
    return {
        "format_version": FORMAT_VERSION,
        "n_steps": pulse.n_steps,
        "total_time_inv_omega_o": pulse.total_time,
        "delta_o_omega_o": pulse.delta_o,
        "theta_rad": pulse.theta,
        "controls": {name: [float(v) for v in values] for name, values in pulse.controls.items()},
    }


def pulse_from_json(data: Mapping[str, Any]) -> Pulse:
    """
    Rebuild a pulse from its versioned JSON form.

    :raise SchemaError: Naming the field with a bad version, a missing key or the wrong number of samples.
    """
    _check_version(data)
    n_steps = _require(data, "n_steps")
    if not isinstance(n_steps, int) or n_steps < 1:
        raise SchemaError("n_steps", f"expected a positive integer, got {n_steps!r}")

    controls = _require(data, "controls")
    if not isinstance(controls, Mapping) or not controls:
        raise SchemaError("controls", "expected a non-empty map of control samples")
    for name, values in controls.items():
        if not isinstance(values, Sequence) or isinstance(values, str):
            raise SchemaError(name, "expected a list of samples")
        if len(values) != n_steps:
            raise SchemaError(name, f"expected {n_steps} samples, got {len(values)}")

    try:
        return Pulse(
            total_time=_as_float(data, "total_time_inv_omega_o"),
            controls=controls,
            delta_o=_as_float(data, "delta_o_omega_o"),
            theta=_as_float(data, "theta_rad"),
        )
    except FieldValidationError as ex:
        if isinstance(ex, SchemaError):
            raise
        raise SchemaError(ex.field, ex.message) from ex


def write_pulse(path: str | Path, pulse: Pulse) -> Path:
    """Write ``pulse`` to ``path`` as versioned JSON"""
    return _write_json(path, pulse_to_json(pulse))


def read_pulse(path: str | Path) -> Pulse:
    """Read a pulse written by :py:func:`write_pulse`"""
    return pulse_from_json(_read_json(path))


###########################################################################
## Run records
###########################################################################
@dataclass(frozen=True, eq=False)
class RunRecord(PrettyPrinter):
    """
    The persisted outcome of one CLI run.

    :param command: The command that was run.
    :param pulse: The final pulse, if the command produced or consumed one.
    :param metrics: Scalar results e.g. ``t_star_inv_omega_o`` or ``infidelity_1``.
    :param cost_trace: One map per sweep point or iteration.
    :param config: The resolved configuration with every default expanded.
    :param version: The version of this package that produced the record.
    :param seed: The random seed of the run.
    :param created: Optional UTC time the record was created. Left out of the file when not set.
    """
    command: str
    pulse: Pulse | None
    metrics: Mapping[str, Any]
    cost_trace: tuple[Mapping[str, Any], ...]
    config: Mapping[str, Any]
    version: str = field(default_factory=program_version)
    seed: int = 0
    created: datetime | None = None
    format_version: int = FORMAT_VERSION

    def as_dict(self) -> dict[str, Any]:
        data = {
            "format_version": self.format_version,
            "command": self.command,
            "version": self.version,
            "seed": self.seed,
            "config": self.config,
            "metrics": self.metrics,
            "cost_trace": self.cost_trace,
            "pulse": None if self.pulse is None else pulse_to_json(self.pulse),
        }
        if self.created is not None:
            data["created"] = self.created.astimezone(tz.UTC)
        return data


def record_from_json(data: Mapping[str, Any]) -> RunRecord:
    """
    Rebuild a run record from its versioned JSON form.

    :raise SchemaError: Naming the offending field.
    """
    _check_version(data)
    created = data.get("created")
    if created is not None:
        try:
            created = isoparse(created)
        except (TypeError, ValueError) as ex:
            raise SchemaError("created", "expected an ISO-8601 timestamp") from ex
        if created.tzinfo is None:
            raise SchemaError("created", "timestamp must carry a UTC offset")
        created = created.astimezone(tz.UTC)

    pulse = _require(data, "pulse")
    seed = _require(data, "seed")
    if not isinstance(seed, int) or seed < 0:
        raise SchemaError("seed", f"expected a non-negative integer, got {seed!r}")

    return RunRecord(
        command=str(_require(data, "command")),
        pulse=None if pulse is None else pulse_from_json(pulse),
        metrics=dict(_require(data, "metrics")),
        cost_trace=tuple(_require(data, "cost_trace")),
        config=dict(_require(data, "config")),
        version=str(_require(data, "version")),
        seed=seed,
        created=created,
        format_version=FORMAT_VERSION,
    )


def write_record(path: str | Path, record: RunRecord) -> Path:
    """Write ``record`` to ``path`` as versioned JSON"""
    return _write_json(path, record.json())


def read_record(path: str | Path) -> RunRecord:
    """Read a run record written by :py:func:`write_record`"""
    return record_from_json(_read_json(path))


def pulse_io(
        path: str | Path, mode: Literal["read", "write"], obj: Pulse | RunRecord | None = None
) -> Pulse | RunRecord | Path:
    """
    Read or write a pulse or run record at ``path``.

    When reading, the kind of object is taken from the file: files with a ``command`` key are run records.
    When writing, returns the path written to.
    """
    if mode == "write":
        if isinstance(obj, Pulse):
            return write_pulse(path, obj)
        elif isinstance(obj, RunRecord):
            return write_record(path, obj)
        raise CatalogError(f"Cannot write object of type {type(obj).__name__}")
    elif mode != "read":
        raise CatalogError(f"Unknown mode {mode!r}. Choose from: read, write")

    data = _read_json(path)
    return record_from_json(data) if "command" in data else pulse_from_json(data)


###########################################################################
## Files
###########################################################################
def _write_json(path: str | Path, data: JSON) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as file:
        json.dump(data, file, indent=2)
        file.write("\n")

    log.debug(f"Wrote {path}")
    return path


def _read_json(path: str | Path) -> dict[str, Any]:
    with open(path, "r", encoding="utf-8") as file:
        try:
            data = json.load(file)
        except json.JSONDecodeError as ex:
            raise SchemaError("file", f"{path} is not valid JSON: {ex.msg}") from ex

    if not isinstance(data, dict):
        raise SchemaError("file", f"{path} does not contain a JSON object")
    return data


def write_csv(path: str | Path, rows: Iterable[Mapping[str, Any]], columns: Sequence[str]) -> Path:
    """
    Write a tidy CSV table of ``rows`` with the given ``columns``.

    :raise SchemaError: When a column header does not end in a unit suffix.
    """
    for column in columns:
        if not column.endswith(UNIT_SUFFIXES) and column not in _UNITLESS_COLUMNS:
            raise SchemaError(column, f"column headers must end in one of: {", ".join(UNIT_SUFFIXES)}")

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as file:
        writer = csv.DictWriter(file, fieldnames=list(columns), extrasaction="ignore", lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({key: repr(value) if isinstance(value, float) else value for key, value in row.items()})

    log.debug(f"Wrote {path}")
    return path


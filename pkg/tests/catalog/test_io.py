import json
from dataclasses import replace
from datetime import datetime
from pathlib import Path

import numpy as np
import pytest
from dateutil import tz

from forge.catalog import FORMAT_VERSION, RunRecord, SchemaError, CatalogError
from forge.catalog import pulse_io, read_pulse, write_pulse, read_record, write_record, write_csv
from forge.catalog import pulse_to_json, pulse_from_json, record_from_json, program_version
from forge.printer import PrettyPrinter
from forge.statespace import Pulse
from tests.testers import PrettyPrinterTester
from tests.utils import random_pulse, path_golden_pulse, path_golden_record


def assert_pulses_identical(actual: Pulse, expected: Pulse):
    assert actual.total_time == expected.total_time
    assert actual.delta_o == expected.delta_o
    assert actual.theta == expected.theta
    assert tuple(actual.controls) == tuple(expected.controls)
    for name, values in expected.controls.items():
        assert np.array_equal(actual.control(name), values)


###########################################################################
## Pulses
###########################################################################
def test_pulse_file_is_bit_exact(tmp_path: Path):
    pulse = random_pulse(n_steps=25, seed=42)
    path = write_pulse(tmp_path.joinpath("nested", "pulse.json"), pulse)

    assert path.is_file()
    assert_pulses_identical(read_pulse(path), pulse)

    with open(path, "r", encoding="utf-8") as file:
        data = json.load(file)
    assert data["format_version"] == FORMAT_VERSION
    assert data["n_steps"] == 25
    assert data["total_time_inv_omega_o"] == pulse.total_time


def test_pulse_floats_keep_full_precision(tmp_path: Path):
    pulse = Pulse(total_time=0.1 + 0.2, controls={"omega_mw": [1 / 3, 2 / 3, np.pi]}, theta=np.e)
    path = write_pulse(tmp_path.joinpath("pulse.json"), pulse)

    text = path.read_text(encoding="utf-8")
    assert "0.30000000000000004" in text
    assert "0.3333333333333333" in text
    assert_pulses_identical(read_pulse(path), pulse)


def test_read_golden_pulse():
    pulse = read_pulse(path_golden_pulse)
    assert pulse.n_steps == 4
    assert pulse.total_time == 5.5
    assert pulse.theta == np.pi
    assert np.array_equal(pulse.phi_mw, [0.0, 0.1, -0.25, 0.5])
    assert np.array_equal(pulse.omega_mw, [0.5, 1.0, 1.0, 0.5])


@pytest.mark.parametrize("change,field", [
    ({"format_version": 2}, "format_version"),
    ({"format_version": True}, "format_version"),
    ({"n_steps": 0}, "n_steps"),
    ({"controls": {}}, "controls"),
    ({"total_time_inv_omega_o": "6"}, "total_time_inv_omega_o"),
    ({"total_time_inv_omega_o": -1.0}, "total_time"),
])
def test_pulse_schema_errors(pulse: Pulse, change: dict, field: str):
    with pytest.raises(SchemaError) as exc:
        pulse_from_json(pulse_to_json(pulse) | change)
    assert exc.value.field == field


@pytest.mark.parametrize("sample", ["fast", {"value": 1.0}, [1.0, 2.0]])
def test_pulse_samples_must_be_numbers(pulse: Pulse, sample: object):
    data = pulse_to_json(pulse)
    data["controls"]["omega_mw"][3] = sample

    with pytest.raises(SchemaError) as exc:
        pulse_from_json(data)
    assert exc.value.field == "omega_mw"
    assert "samples must be numbers" in str(exc.value)


def test_pulse_wrong_length_names_control(pulse: Pulse):
    data = pulse_to_json(pulse)
    data["controls"]["omega_mw"] = data["controls"]["omega_mw"][:-1]

    with pytest.raises(SchemaError) as exc:
        pulse_from_json(data)
    assert exc.value.field == "omega_mw"
    assert f"expected {pulse.n_steps} samples, got {pulse.n_steps - 1}" in str(exc.value)


def test_pulse_missing_key(pulse: Pulse):
    data = pulse_to_json(pulse)
    data.pop("theta_rad")

    with pytest.raises(SchemaError) as exc:
        pulse_from_json(data)
    assert exc.value.field == "theta_rad"


def test_invalid_files(tmp_path: Path):
    path = tmp_path.joinpath("broken.json")
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(SchemaError) as exc:
        read_pulse(path)
    assert exc.value.field == "file"

    path.write_text("[1, 2, 3]", encoding="utf-8")
    with pytest.raises(SchemaError):
        read_pulse(path)


###########################################################################
## Run records
###########################################################################
class TestRunRecord(PrettyPrinterTester):

    @pytest.fixture
    def obj(self, pulse: Pulse) -> PrettyPrinter:
        return RunRecord(
            command="optimize",
            pulse=pulse,
            metrics={"t_star_inv_omega_o": 7.1, "infidelity_1": 3.2e-9},
            cost_trace=({"total_time_inv_omega_o": 7.0, "infidelity_1": 0.01},),
            config={"model": {"j_exchange": 10.0}},
            seed=3,
        )

    def test_defaults(self, obj: RunRecord):
        assert obj.version == program_version()
        assert obj.format_version == FORMAT_VERSION
        assert obj.created is None
        assert "created" not in obj.json()

    def test_file_is_bit_exact(self, obj: RunRecord, pulse: Pulse, tmp_path: Path):
        path = write_record(tmp_path.joinpath("run.json"), obj)
        record = read_record(path)

        assert record.command == obj.command
        assert record.metrics == obj.metrics
        assert record.cost_trace == obj.cost_trace
        assert record.config == obj.config
        assert record.seed == 3
        assert record.version == obj.version
        assert record.created == obj.created
        assert_pulses_identical(record.pulse, pulse)

        first = path.read_bytes()
        assert write_record(tmp_path.joinpath("again.json"), record).read_bytes() == first

    def test_stamped_record(self, obj: RunRecord, tmp_path: Path):
        stamped = replace(obj, created=datetime(2026, 3, 1, 12, 30, tzinfo=tz.UTC))
        assert stamped.json()["created"] == "2026-03-01T12:30:00+00:00"

        record = read_record(write_record(tmp_path.joinpath("run.json"), stamped))
        assert record.created == stamped.created

    def test_record_without_pulse(self, tmp_path: Path):
        record = RunRecord(command="tables", pulse=None, metrics={}, cost_trace=(), config={})
        assert read_record(write_record(tmp_path.joinpath("run.json"), record)).pulse is None

    @pytest.mark.parametrize("change,field", [
        ({"seed": -1}, "seed"),
        ({"created": "yesterday"}, "created"),
        ({"created": "2026-01-01T12:00:00"}, "created"),
        ({"format_version": 0}, "format_version"),
    ])
    def test_schema_errors(self, obj: RunRecord, change: dict, field: str):
        data = obj.json() | change
        with pytest.raises(SchemaError) as exc:
            record_from_json(data)
        assert exc.value.field == field

    def test_timestamps_are_utc(self, obj: RunRecord):
        data = obj.json() | {"created": "2026-03-01T14:30:00+02:00"}
        record = record_from_json(data)
        assert record.created == datetime(2026, 3, 1, 12, 30, tzinfo=tz.UTC)
        assert record.created.utcoffset().total_seconds() == 0


def test_read_golden_record():
    record = read_record(path_golden_record)
    assert record.command == "optimize"
    assert record.seed == 0
    assert record.metrics["t_star_inv_omega_o"] == 5.5
    assert record.pulse.n_steps == 4
    assert record.created.tzinfo is not None


###########################################################################
## Dispatch
###########################################################################
def test_pulse_io(pulse: Pulse, tmp_path: Path):
    pulse_path = pulse_io(tmp_path.joinpath("pulse.json"), "write", pulse)
    assert_pulses_identical(pulse_io(pulse_path, "read"), pulse)

    record = RunRecord(command="evaluate", pulse=pulse, metrics={}, cost_trace=(), config={})
    record_path = pulse_io(tmp_path.joinpath("run.json"), "write", record)
    assert isinstance(pulse_io(record_path, "read"), RunRecord)

    with pytest.raises(CatalogError):
        pulse_io(tmp_path.joinpath("other.json"), "write", {"not": "a pulse"})
    with pytest.raises(CatalogError):
        pulse_io(pulse_path, "append")


###########################################################################
## CSV
###########################################################################
def test_write_csv(tmp_path: Path):
    rows = [
        {"pulse": "smooth", "total_time_inv_omega_o": 0.1 + 0.2, "infidelity_1": 1e-7, "extra": "dropped"},
        {"pulse": "piecewise", "total_time_inv_omega_o": 6.5, "infidelity_1": 0.0},
    ]
    path = write_csv(tmp_path.joinpath("trace.csv"), rows, columns=("pulse", "total_time_inv_omega_o", "infidelity_1"))

    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "pulse,total_time_inv_omega_o,infidelity_1"
    assert lines[1] == "smooth,0.30000000000000004,1e-07"
    assert lines[2] == "piecewise,6.5,0.0"


def test_write_csv_requires_units(tmp_path: Path):
    with pytest.raises(SchemaError) as exc:
        write_csv(tmp_path.joinpath("trace.csv"), [], columns=("pulse", "total_time"))
    assert exc.value.field == "total_time"
    assert not tmp_path.joinpath("trace.csv").exists()

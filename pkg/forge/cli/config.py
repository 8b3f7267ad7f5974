"""
Loading, overriding and validating the TOML configuration of a single run.
"""
import tomllib
from collections.abc import Callable, Collection, Mapping, Sequence
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Self

import numpy as np

from forge.catalog import SpeciesRow, StatePair, lookup, lookup_key
from forge.cli.exception import ConfigError
from forge.exception import FieldValidationError
from forge.grape import OptimizationPlan
from forge.noise import NoiseModel
from forge.printer import PrettyPrinter, to_json_value
from forge.protocols import PiecewiseSpec, TwoPhotonModel
from forge.statespace import GateModel
from forge.utils import set_nested

#: Keys of ``[model]`` that select a catalog row instead of setting a model field
CATALOG_KEYS = ("species", "n", "j_mhz", "state_pair", "omega_o_mhz")
#: Ω_o/2π in MHz when not configured
DEFAULT_OMEGA_O_MHZ = 5.0
#: Accepted sweep axes and the header of their value column
SWEEP_AXES: Mapping[str, str] = {
    "trap_frequency": "trap_frequency_khz",
    "rabi_frequency": "rabi_frequency_mhz",
    "species_row": "species",
}


def _dataclass_keys(cls: type) -> frozenset[str]:
    return frozenset(f.name for f in fields(cls))


#: The accepted keys of every section
SECTION_KEYS: Mapping[str, frozenset[str]] = {
    "model": _dataclass_keys(GateModel) | frozenset(CATALOG_KEYS),
    "plan": _dataclass_keys(OptimizationPlan) - {"seed", "threads"},
    "noise": _dataclass_keys(NoiseModel) | {"species", "check_cutoff"},
    "pulse": frozenset({"path", "name"}),
    "piecewise": _dataclass_keys(PiecewiseSpec) | {"refine"},
    "baseline": frozenset({"v_over_omega", "branch_starts"}),
    "twophoton": frozenset({
        "omega_1_mhz", "omega_2_mhz", "delta_e_mhz", "tau_e_us", "max_iters", "tolerance", "simulate",
    }),
    "sweep": frozenset({"axis", "grid", "pulses"}),
    "tables": frozenset({"species", "n", "j_mhz", "state_pair"}),
    "run": frozenset({"output_dir", "seed", "threads"}),
}

#: Default ladder parameters: Ω₁/2π = Ω₂/2π = 278 MHz, Δ_e/2π = 7.75 GHz and τ_e = 110 ns
TWO_PHOTON_DEFAULTS: Mapping[str, Any] = {
    "omega_1_mhz": 278.0,
    "omega_2_mhz": 278.0,
    "delta_e_mhz": 7750.0,
    "tau_e_us": 0.110,
    "max_iters": 400,
    "tolerance": 1e-10,
    "simulate": False,
}


###########################################################################
## Parsing
###########################################################################
def parse_value(value: str) -> Any:
    """Parse an override value as a TOML literal, falling back to the raw string"""
    try:
        return tomllib.loads(f"value = {value}")["value"]
    except tomllib.TOMLDecodeError:
        return value


def parse_override(override: str) -> tuple[str, Any]:
    """
    Split a ``section.key=value`` override into its dotted key and parsed value.

    :raise ConfigError: When the override is not of that form.
    """
    key, sep, value = override.partition("=")
    key = key.strip()
    if not sep or "." not in key:
        raise ConfigError(override, "overrides must be of the form section.key=value")
    return key, parse_value(value.strip())


def load_raw_config(path: str | Path | None, overrides: Sequence[str] = ()) -> dict[str, Any]:
    """
    Read the TOML file at ``path`` and apply ``overrides`` in order.

    :raise ConfigError: When the file cannot be parsed or holds unknown sections or keys.
    """
    raw: dict[str, Any] = {}
    if path is not None:
        try:
            with open(path, "rb") as file:
                raw = tomllib.load(file)
        except FileNotFoundError as ex:
            raise ConfigError("config", f"no such file: {path}") from ex
        except tomllib.TOMLDecodeError as ex:
            raise ConfigError("config", f"invalid TOML in {path}: {ex}") from ex

    for override in overrides:
        set_nested(raw, *parse_override(override))

    for section, values in raw.items():
        if section not in SECTION_KEYS:
            raise ConfigError(section, f"unknown section. Choose from: {", ".join(SECTION_KEYS)}")
        if not isinstance(values, Mapping):
            raise ConfigError(section, "must be a table")
        unknown = sorted(set(values) - SECTION_KEYS[section])
        if unknown:
            raise ConfigError(f"{section}.{unknown[0]}", "unknown key")

    return raw


###########################################################################
## Resolved configuration
###########################################################################
def _build[T](section: str, factory: Callable[..., T], **kwargs: Any) -> T:
    """Build a domain object, naming the config key on any validation failure"""
    try:
        return factory(**kwargs)
    except FieldValidationError as ex:
        if isinstance(ex, ConfigError):
            raise
        raise ConfigError(f"{section}.{ex.field}", ex.message) from ex
    except (TypeError, ValueError) as ex:
        raise ConfigError(section, str(ex)) from ex


@dataclass(frozen=True)
class RunConfig(PrettyPrinter):
    """
    The configuration of one run: the raw sections of the file with overrides applied,
    and the run-level settings taken from the command line or the ``[run]`` section.

    Each accessor validates its section into the corresponding domain object.

    :param sections: Map of section name to its keys.
    :param output_dir: Directory all outputs are written to.
    :param seed: Seed of every random choice in the run.
    :param thread_count: Worker threads used by the optimiser and the noise simulation.
    """
    sections: Mapping[str, Mapping[str, Any]] = field(default_factory=dict)
    output_dir: Path = Path("forge_output")
    seed: int = 0
    thread_count: int = 1

    def __post_init__(self):
        object.__setattr__(self, "output_dir", Path(self.output_dir))
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2 ** 64:
            raise ConfigError("run.seed", "must be an unsigned 64-bit integer")
        if not isinstance(self.thread_count, int) or self.thread_count < 1:
            raise ConfigError("run.threads", "must be a positive integer")

    @classmethod
    def load(
            cls,
            path: str | Path | None,
            overrides: Sequence[str] = (),
            output_dir: str | Path | None = None,
            seed: int | None = None,
            threads: int | None = None,
    ) -> Self:
        """Load a run configuration, with the command line arguments taking precedence over ``[run]``"""
        raw = load_raw_config(path, overrides)
        run = raw.pop("run", {})
        return cls(
            sections=raw,
            output_dir=Path(output_dir if output_dir is not None else run.get("output_dir", "forge_output")),
            seed=seed if seed is not None else run.get("seed", 0),
            thread_count=threads if threads is not None else run.get("threads", 1),
        )

    def section(self, name: str) -> dict[str, Any]:
        """A copy of the keys of section ``name``, empty when the section is absent"""
        return dict(self.sections.get(name, {}))

    def require(self, section: str, *keys: str) -> dict[str, Any]:
        """Get section ``section`` and check that ``keys`` are present"""
        values = self.section(section)
        for key in keys:
            if values.get(key) is None:
                raise ConfigError(f"{section}.{key}", "required for this command")
        return values

    ###########################################################################
    ## Domain objects
    ###########################################################################
    @property
    def omega_o_mhz(self) -> float:
        """Ω_o/2π in MHz, the unit of every dimensionless quantity of the run"""
        value = self.section("model").get("omega_o_mhz", DEFAULT_OMEGA_O_MHZ)
        if not isinstance(value, int | float) or not value > 0:
            raise ConfigError("model.omega_o_mhz", "must be > 0")
        return float(value)

    def catalog_row(self) -> SpeciesRow | None:
        """The catalog row selected by ``[model] species``, if any"""
        values = self.section("model")
        if "species" not in values:
            return None

        for key in ("n", "j_mhz"):
            if key not in values:
                raise ConfigError(f"model.{key}", "required when model.species is set")
        return lookup(values["species"], values["n"], values["j_mhz"], values.get("state_pair", StatePair.P_S))

    def model(self) -> GateModel:
        """The gate model, filled from the catalog row when one is selected"""
        values = {k: v for k, v in self.section("model").items() if k not in CATALOG_KEYS}
        row = self.catalog_row()
        if row is not None:
            return _build("model", row.to_model, omega_o_mhz=self.omega_o_mhz, **values)
        return _build("model", GateModel, **values)

    def plan(self) -> OptimizationPlan:
        values = self.section("plan")
        if "controls" in values and values["controls"] is not None:
            values["controls"] = tuple(values["controls"])
        return _build("plan", OptimizationPlan, seed=self.seed, threads=self.thread_count, **values)

    def noise(self) -> NoiseModel:
        """
        The noise model. Defaults come from the selected catalog row, else from ``[noise] species``,
        with Ω_o taken from ``[model] omega_o_mhz``.
        """
        values = self.section("noise")
        values.pop("check_cutoff", None)
        species = values.pop("species", None)
        values.setdefault("omega_o", 2 * np.pi * self.omega_o_mhz * 1e6)

        row = self.catalog_row()
        if row is not None:
            return _build("noise", NoiseModel.from_row, row=row, omega_o_mhz=self.omega_o_mhz, **values)
        elif species is not None:
            return _build("noise", NoiseModel.for_species, species=species, **values)
        return _build("noise", NoiseModel, **values)

    @property
    def check_cutoff(self) -> bool:
        return bool(self.section("noise").get("check_cutoff", False))

    def piecewise(self) -> PiecewiseSpec:
        values = self.section("piecewise")
        values.pop("refine", None)
        return _build("piecewise", PiecewiseSpec, **values)

    @property
    def refine_piecewise(self) -> bool:
        return bool(self.section("piecewise").get("refine", False))

    def baseline(self) -> dict[str, Any]:
        """The keyword arguments of the baseline optimisation"""
        values = self.require("baseline", "v_over_omega")
        starts = values.get("branch_starts")
        if starts is not None and (not isinstance(starts, int) or isinstance(starts, bool) or starts < 1):
            raise ConfigError("baseline.branch_starts", "must be a positive integer")
        if not isinstance(values["v_over_omega"], int | float):
            raise ConfigError("baseline.v_over_omega", "must be a number")
        return values

    def two_photon_settings(self) -> dict[str, Any]:
        """The ``[twophoton]`` section with defaults expanded"""
        return dict(TWO_PHOTON_DEFAULTS) | self.section("twophoton")

    def two_photon(self) -> TwoPhotonModel:
        settings = self.two_photon_settings()
        return _build(
            "twophoton",
            TwoPhotonModel.from_physical,
            omega_1_mhz=settings["omega_1_mhz"],
            omega_2_mhz=settings["omega_2_mhz"],
            delta_e_mhz=settings["delta_e_mhz"],
            tau_e_us=settings["tau_e_us"],
            gate=self.model(),
        )

    def sweep(self) -> dict[str, Any]:
        """The ``[sweep]`` section with the axis checked against the available sweeps"""
        values = self.require("sweep", "axis", "grid")
        axis = str(values["axis"]).strip().casefold().replace("-", "_")
        if axis not in SWEEP_AXES:
            raise ConfigError("sweep.axis", f"unknown axis {values["axis"]!r}. Choose from: {", ".join(SWEEP_AXES)}")
        if not isinstance(values["grid"], list) or not values["grid"]:
            raise ConfigError("sweep.grid", "must be a non-empty list")
        if axis == "species_row":
            for key in values["grid"]:
                lookup_key(str(key))

        pulses = values.get("pulses") or {}
        if not isinstance(pulses, Mapping):
            raise ConfigError("sweep.pulses", "must map pulse names to files")
        return {"axis": axis, "grid": list(values["grid"]), "pulses": dict(pulses)}

    def pulse_paths(self, required: bool = True) -> dict[str, Path]:
        """
        The input pulse files by name: ``[sweep] pulses`` when given, else ``[pulse] path``.

        :raise ConfigError: When ``required`` and no pulse is configured.
        """
        pulses = self.section("sweep").get("pulses") or {}
        if pulses:
            return {str(name): Path(path) for name, path in pulses.items()}

        values = self.section("pulse")
        if values.get("path") is None:
            if required:
                raise ConfigError("pulse.path", "an input pulse is required for this command")
            return {}
        return {str(values.get("name", "pulse")): Path(values["path"])}

    def table_key(self) -> tuple[str, int, float, str] | None:
        """The row selected by ``[tables]``, or None to select every row"""
        values = self.section("tables")
        if not values:
            return None
        values = self.require("tables", "species", "n", "j_mhz")
        return values["species"], values["n"], values["j_mhz"], values.get("state_pair", "P-S")

    def resolved(self, sections: Collection[str]) -> dict[str, Any]:
        """
        The resolved configuration of ``sections`` with every default expanded.

        Validates each section on the way.
        """
        resolvers = {
            "model": lambda: self.model().json() | self._catalog_json(),
            "plan": lambda: self.plan().json(),
            "noise": lambda: self.noise().json() | {"check_cutoff": self.check_cutoff},
            "pulse": lambda: {name: str(path) for name, path in self.pulse_paths(required=False).items()},
            "piecewise": lambda: self.piecewise().json() | {"refine": self.refine_piecewise},
            "baseline": self.baseline,
            "twophoton": lambda: self.two_photon_settings() | {"model": self.two_photon().json()},
            "sweep": lambda: {k: v for k, v in self.sweep().items() if k != "pulses"},
            "tables": lambda: {"key": self.table_key()},
        }

        resolved = {name: to_json_value(resolvers[name]()) for name in sections}
        resolved["run"] = {"output_dir": str(self.output_dir), "seed": self.seed, "threads": self.thread_count}
        return resolved

    def _catalog_json(self) -> dict[str, Any]:
        row = self.catalog_row()
        if row is None:
            return {}
        return {"catalog_row": row.key, "omega_o_mhz": self.omega_o_mhz}

    def as_dict(self) -> dict[str, Any]:
        return {
            "sections": self.sections,
            "output_dir": self.output_dir,
            "seed": self.seed,
            "thread_count": self.thread_count,
        }

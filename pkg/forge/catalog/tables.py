"""
Interaction strengths and lifetimes of the Rydberg state pairs, and conversions to internal units.

Rows are keyed by (species, n, J/2π, state pair). P-S rows pair |nP_3/2> with |nS_1/2>,
D-P rows pair |nD_5/2> with |(n+1)P_3/2>. Frequencies are J/2π in MHz, distances in µm
and lifetimes in µs.
"""
import csv
import hashlib
from collections.abc import Iterable, Collection
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any

import numpy as np

from forge.catalog.exception import CatalogLookupError, SchemaError
from forge.exception import ForgeEnumError
from forge.printer import PrettyPrinter
from forge.statespace import GateModel
from forge.types import ForgeEnum

#: The CSV mirror of the embedded rows
CATALOG_CSV = Path(__file__).parent.joinpath("data", "interactions.csv")


class StatePair(ForgeEnum):
    """The pair of Rydberg states coupled by the resonant exchange"""
    P_S = 0
    D_P = 1

    @property
    def label(self) -> str:
        return self.name.replace("_", "-")


###########################################################################
## Unit conversions
###########################################################################
def mhz_to_dimensionless(value_mhz: float, omega_o_mhz: float) -> float:
    """Convert a frequency given as f = ω/2π in MHz to units of Ω_o, with Ω_o/2π in MHz"""
    return value_mhz / omega_o_mhz


def dimensionless_to_mhz(value: float, omega_o_mhz: float) -> float:
    """Convert a frequency in units of Ω_o to ω/2π in MHz"""
    return value * omega_o_mhz


def lifetime_us_to_rate(tau_us: float, omega_o_mhz: float) -> float:
    """Convert a lifetime in µs to a decay rate in units of Ω_o. Infinite lifetimes give zero."""
    return 1 / (tau_us * 2 * np.pi * omega_o_mhz)


def rate_to_lifetime_us(rate: float, omega_o_mhz: float) -> float:
    """Convert a decay rate in units of Ω_o to a lifetime in µs. Zero rates give an infinite lifetime."""
    if rate == 0:
        return np.inf
    return 1 / (rate * 2 * np.pi * omega_o_mhz)


###########################################################################
## Rows
###########################################################################
@dataclass(frozen=True)
class SpeciesRow(PrettyPrinter):
    """
    One pair of Rydberg states at the distance that gives the listed exchange strength.

    :param species: The atomic species, ``Rb`` or ``Cs``.
    :param n: The principal quantum number.
    :param state_pair: The coupled pair of Rydberg states.
    :param distance_um: Interatomic distance R in µm.
    :param j_mhz: Resonant exchange J/2π in MHz.
    :param v11_over_j: van der Waals shift of |r1 r1> relative to J.
    :param v12_over_j: van der Waals shift of |r1 r2> relative to J.
    :param v22_over_j: van der Waals shift of |r2 r2> relative to J.
    :param gamma1_inv_us: Lifetime of |r1> in µs.
    :param gamma2_inv_us: Lifetime of |r2> in µs.
    """
    species: str
    n: int
    state_pair: StatePair
    distance_um: float
    j_mhz: float
    v11_over_j: float
    v12_over_j: float
    v22_over_j: float
    gamma1_inv_us: float
    gamma2_inv_us: float

    @property
    def key(self) -> str:
        """The lookup key ``species:n:j_mhz:state_pair`` of this row"""
        return f"{self.species}:{self.n}:{self.j_mhz:g}:{self.state_pair.label}"

    def to_model(self, omega_o_mhz: float = 5.0, **overrides: Any) -> GateModel:
        """
        The dimensionless four-level model of this row.

        :param omega_o_mhz: Ω_o/2π in MHz, the unit of the returned model.
        :param overrides: Fields of :py:class:`GateModel` to set instead of the row values.
        """
        j = mhz_to_dimensionless(self.j_mhz, omega_o_mhz)
        values = {
            "j_exchange": j,
            "v11": self.v11_over_j * j,
            "v12": self.v12_over_j * j,
            "v22": self.v22_over_j * j,
            "gamma_1": lifetime_us_to_rate(self.gamma1_inv_us, omega_o_mhz),
            "gamma_2": lifetime_us_to_rate(self.gamma2_inv_us, omega_o_mhz),
        }
        return GateModel(**values | overrides)

    def as_dict(self) -> dict[str, Any]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


# (n, R, J/2π, V11/J, V12/J, V22/J)
_INTERACTIONS_PS: dict[str, tuple[tuple[int, float, float, float, float, float], ...]] = {
    "Rb": (
        (40, 2.51, 50, 0.007, 0.016, 0.079),
        (40, 2.25, 70, 0.010, 0.022, 0.110),
        (50, 3.45, 50, 0.015, 0.037, 0.182),
        (50, 3.08, 70, 0.020, 0.052, 0.255),
        (60, 4.45, 50, 0.027, 0.076, 0.354),
        (60, 3.98, 70, 0.037, 0.107, 0.496),
    ),
    "Cs": (
        (40, 2.43, 50, -0.011, 0.007, 0.064),
        (40, 2.17, 70, -0.015, 0.010, 0.089),
        (50, 3.36, 50, -0.021, 0.020, 0.150),
        (50, 3.00, 70, -0.030, 0.028, 0.210),
        (60, 4.35, 50, -0.038, 0.045, 0.295),
        (60, 3.89, 70, -0.053, 0.062, 0.413),
        (70, 5.41, 50, -0.062, 0.087, 0.514),
        (70, 4.84, 70, -0.086, 0.121, 0.720),
    ),
}
# (n, R, J/2π, V11/J, V12/J, V22/J)
_INTERACTIONS_DP: dict[str, tuple[tuple[int, float, float, float, float, float], ...]] = {
    "Rb": (
        (40, 3.07, 50, 0.002, 0.002, -0.009),
        (50, 4.20, 50, 0.004, 0.005, -0.108),
        (60, 5.42, 50, 0.008, 0.010, -0.142),
        (70, 6.70, 50, 0.014, 0.018, -0.207),
    ),
}
# (species, n, state pair) -> (1/Γ1, 1/Γ2)
_LIFETIMES: dict[tuple[str, int, StatePair], tuple[float, float]] = {
    ("Rb", 40, StatePair.P_S): (118, 69),
    ("Rb", 50, StatePair.P_S): (239, 141),
    ("Rb", 60, StatePair.P_S): (423, 252),
    ("Cs", 40, StatePair.P_S): (151, 60),
    ("Cs", 50, StatePair.P_S): (313, 126),
    ("Cs", 60, StatePair.P_S): (560, 227),
    ("Cs", 70, StatePair.P_S): (913, 372),
    ("Rb", 40, StatePair.D_P): (55, 118),
    ("Rb", 50, StatePair.D_P): (111, 239),
    ("Rb", 60, StatePair.D_P): (196, 423),
    ("Rb", 70, StatePair.D_P): (317, 684),
}


def _join() -> tuple[SpeciesRow, ...]:
    rows = []
    for state_pair, table in ((StatePair.P_S, _INTERACTIONS_PS), (StatePair.D_P, _INTERACTIONS_DP)):
        for species, entries in table.items():
            for n, distance, j, v11, v12, v22 in entries:
                gamma1_inv, gamma2_inv = _LIFETIMES[species, n, state_pair]
                rows.append(SpeciesRow(
                    species=species,
                    n=n,
                    state_pair=state_pair,
                    distance_um=float(distance),
                    j_mhz=float(j),
                    v11_over_j=float(v11),
                    v12_over_j=float(v12),
                    v22_over_j=float(v22),
                    gamma1_inv_us=float(gamma1_inv),
                    gamma2_inv_us=float(gamma2_inv),
                ))
    return tuple(rows)


#: Every embedded row, P-S pairs first
ROWS: tuple[SpeciesRow, ...] = _join()


###########################################################################
## Lookup
###########################################################################
def lookup(
        species: str, n: int, j_target: float, state_pair: StatePair | str = StatePair.P_S
) -> SpeciesRow:
    """
    Get the row for ``species`` at principal quantum number ``n`` and exchange J/2π = ``j_target`` MHz.

    :raise CatalogLookupError: When no row matches, listing the available keys.
    """
    state_pair = StatePair.parse(state_pair)
    for row in ROWS:
        if (
                row.species.casefold() == str(species).casefold()
                and row.n == int(n)
                and row.state_pair == state_pair
                and np.isclose(row.j_mhz, float(j_target))
        ):
            return row

    key = f"{species}:{n}:{j_target:g}:{state_pair.label}"
    raise CatalogLookupError(key, available=(row.key for row in ROWS))


def lookup_key(key: str) -> SpeciesRow:
    """
    Get a row from a key of the form ``species:n:j_mhz`` or ``species:n:j_mhz:state_pair``
    e.g. ``Cs:60:50`` or ``Rb:40:50:D-P``.
    """
    parts = key.strip().split(":")
    if len(parts) not in (3, 4):
        raise CatalogLookupError(key, available=(row.key for row in ROWS))

    species, n, j_target, *state_pair = parts
    try:
        return lookup(species, int(n), float(j_target), *state_pair)
    except (ValueError, ForgeEnumError) as ex:
        raise CatalogLookupError(key, available=(row.key for row in ROWS)) from ex


###########################################################################
## Checksums and CSV mirror
###########################################################################
#: Column names of the CSV mirror with their units
CSV_COLUMNS: tuple[str, ...] = (
    "species", "n", "state_pair", "distance_um", "j_mhz", "v11_over_j", "v12_over_j", "v22_over_j",
    "gamma1_inv_us", "gamma2_inv_us",
)


def _canonical(row: SpeciesRow) -> str:
    values = [row.species, str(row.n), row.state_pair.label]
    values.extend(repr(float(getattr(row, name))) for name in CSV_COLUMNS[3:])
    return ",".join(values)


def checksum(rows: Iterable[SpeciesRow] = ROWS) -> str:
    """sha256 hex digest over the canonical form of ``rows`` in the given order"""
    digest = hashlib.sha256()
    for row in rows:
        digest.update(_canonical(row).encode("utf-8"))
        digest.update(b"\n")
    return digest.hexdigest()


def row_from_csv(record: dict[str, str]) -> SpeciesRow:
    """
    Parse one record of the CSV mirror.

    :raise SchemaError: Naming the missing or malformed column.
    """
    values = {}
    for column in CSV_COLUMNS:
        if record.get(column) in (None, ""):
            raise SchemaError(column, "missing value")
        values[column] = record[column].strip()

    parsed: dict[str, Any] = {"species": values["species"]}
    for column, parser in (("n", int), ("state_pair", StatePair.parse)) + tuple((c, float) for c in CSV_COLUMNS[3:]):
        try:
            parsed[column] = parser(values[column])
        except (ValueError, ForgeEnumError) as ex:
            raise SchemaError(column, f"cannot parse {values[column]!r}") from ex

    return SpeciesRow(**parsed)


def load_csv(path: str | Path = CATALOG_CSV) -> tuple[SpeciesRow, ...]:
    """Load the rows of a catalog CSV file"""
    with open(path, "r", encoding="utf-8", newline="") as file:
        return tuple(row_from_csv(record) for record in csv.DictReader(file))


def table_rows(rows: Collection[SpeciesRow] = ROWS) -> list[dict[str, Any]]:
    """Rows as flat maps keyed by :py:data:`CSV_COLUMNS` for tabular output"""
    return [
        {column: row.state_pair.label if column == "state_pair" else getattr(row, column) for column in CSV_COLUMNS}
        for row in rows
    ]

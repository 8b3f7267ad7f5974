import numpy as np
import pytest

from forge.catalog import ROWS, CATALOG_CSV, CSV_COLUMNS, SpeciesRow, StatePair, CatalogLookupError, SchemaError
from forge.catalog import lookup, lookup_key, checksum, load_csv, table_rows
from forge.catalog import mhz_to_dimensionless, dimensionless_to_mhz, lifetime_us_to_rate, rate_to_lifetime_us
from forge.catalog.tables import row_from_csv
from forge.printer import PrettyPrinter
from tests.testers import PrettyPrinterTester, EnumTester


class TestStatePair(EnumTester):

    @property
    def cls(self) -> type[StatePair]:
        return StatePair

    def test_labels(self):
        assert StatePair.P_S.label == "P-S"
        assert StatePair.parse("D-P") == StatePair.D_P


class TestSpeciesRow(PrettyPrinterTester):

    @pytest.fixture
    def obj(self) -> PrettyPrinter:
        return lookup("Rb", 40, 50)

    def test_values(self, obj: SpeciesRow):
        assert obj.distance_um == 2.51
        assert obj.v11_over_j == 0.007
        assert obj.v12_over_j == 0.016
        assert obj.v22_over_j == 0.079
        assert obj.key == "Rb:40:50:P-S"

    def test_to_model(self, obj: SpeciesRow):
        model = obj.to_model(omega_o_mhz=5.0)
        assert model.j_exchange == pytest.approx(10.0)
        assert model.v22 == pytest.approx(0.79)
        assert model.gamma_1 == pytest.approx(1 / (118 * 2 * np.pi * 5.0))
        assert model.gamma_2 == pytest.approx(1 / (69 * 2 * np.pi * 5.0))

        assert obj.to_model(gamma_1=0.0, gamma_2=0.0).gamma_1 == 0


@pytest.mark.parametrize("key,column,expected", [
    ("Rb:40:50", "v12_over_j", 0.016),
    ("Cs:70:70", "v11_over_j", -0.086),
    ("Cs:70:70", "v22_over_j", 0.720),
    ("Rb:40:50:D-P", "distance_um", 3.07),
    ("Rb:40:50:D-P", "v22_over_j", -0.009),
    ("Rb:40:50:D-P", "gamma1_inv_us", 55),
    ("Rb:40:50:D-P", "gamma2_inv_us", 118),
    ("Cs:60:50", "distance_um", 4.35),
    ("Cs:60:50", "v11_over_j", -0.038),
])
def test_embedded_values(key: str, column: str, expected: float):
    assert getattr(lookup_key(key), column) == pytest.approx(expected)


def test_lookup():
    assert lookup("cs", 60, 50.0) is lookup_key("Cs:60:50")
    assert lookup("Rb", 40, 50, state_pair="D-P").state_pair == StatePair.D_P

    with pytest.raises(CatalogLookupError) as exc:
        lookup("Rb", 45, 50)
    assert exc.value.key == "Rb:45:50:P-S"
    assert "Rb:40:50:P-S" in exc.value.available

    with pytest.raises(CatalogLookupError):
        lookup_key("Rb:40")
    with pytest.raises(CatalogLookupError):
        lookup_key("Rb:forty:50")
    with pytest.raises(CatalogLookupError):
        lookup_key("Rb:40:50:S-S")


def test_rows():
    assert len(ROWS) == 18
    assert len({row.key for row in ROWS}) == len(ROWS)
    assert all(row.state_pair == StatePair.P_S for row in ROWS[:14])
    assert all(row.gamma1_inv_us > 0 and row.gamma2_inv_us > 0 for row in ROWS)


def test_van_der_waals_sign_convention():
    cesium = [row for row in ROWS if row.species == "Cs"]
    rubidium = [row for row in ROWS if row.species == "Rb" and row.state_pair == StatePair.P_S]

    assert len(cesium) == 8
    assert len(rubidium) == 6
    assert all(row.v11_over_j < 0 for row in cesium)
    assert all(row.v11_over_j > 0 for row in rubidium)


###########################################################################
## CSV mirror
###########################################################################
def test_csv_mirror_matches_embedded_rows():
    mirrored = load_csv(CATALOG_CSV)
    assert mirrored == ROWS
    assert checksum(mirrored) == checksum(ROWS)


def test_checksum():
    digest = checksum()
    assert len(digest) == 64
    assert digest == checksum(ROWS)
    assert checksum(ROWS[::-1]) != digest
    assert checksum(ROWS[1:]) != digest


def test_row_from_csv():
    record = {column: str(value) for column, value in table_rows(ROWS[:1])[0].items()}
    assert row_from_csv(record) == ROWS[0]

    with pytest.raises(SchemaError) as exc:
        row_from_csv(record | {"distance_um": ""})
    assert exc.value.field == "distance_um"

    with pytest.raises(SchemaError) as exc:
        row_from_csv(record | {"n": "forty"})
    assert exc.value.field == "n"

    with pytest.raises(SchemaError) as exc:
        row_from_csv(record | {"state_pair": "S-S"})
    assert exc.value.field == "state_pair"


def test_table_rows():
    rows = table_rows()
    assert len(rows) == len(ROWS)
    assert tuple(rows[0]) == CSV_COLUMNS
    assert rows[-1]["state_pair"] == "D-P"


###########################################################################
## Units
###########################################################################
@pytest.mark.parametrize("omega_o_mhz", [0.5, 5.0, 17.3])
def test_conversions_round_trip(omega_o_mhz: float):
    for value in (0.0, 1e-3, 1.0, 50.0, 1234.5):
        assert dimensionless_to_mhz(mhz_to_dimensionless(value, omega_o_mhz), omega_o_mhz) == pytest.approx(
            value, rel=1e-12, abs=1e-12
        )
    for tau in (1.0, 55.0, 913.0):
        rate = lifetime_us_to_rate(tau, omega_o_mhz)
        assert rate_to_lifetime_us(rate, omega_o_mhz) == pytest.approx(tau, rel=1e-12)


def test_conversion_limits():
    assert mhz_to_dimensionless(50.0, 5.0) == 10.0
    assert lifetime_us_to_rate(np.inf, 5.0) == 0
    assert rate_to_lifetime_us(0.0, 5.0) == np.inf

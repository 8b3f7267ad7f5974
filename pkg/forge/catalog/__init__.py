"""
Embedded interaction and lifetime data of Rydberg state pairs, and persistence of pulses and run records.
"""
from .exception import CatalogError, CatalogLookupError, SchemaError
from .io import (
    FORMAT_VERSION, RunRecord, pulse_io, read_pulse, write_pulse, read_record, write_record,
    pulse_to_json, pulse_from_json, record_from_json, write_csv, program_version,
)
from .tables import (
    ROWS, CATALOG_CSV, CSV_COLUMNS, SpeciesRow, StatePair, lookup, lookup_key, checksum, load_csv, table_rows,
    mhz_to_dimensionless, dimensionless_to_mhz, lifetime_us_to_rate, rate_to_lifetime_us,
)

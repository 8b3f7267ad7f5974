from forge.catalog import ROWS, lookup_key
from forge.report import report_catalog_rows

report_catalog_rows(ROWS)

row = lookup_key("Cs:60:50")
print(row.key, row.distance_um, row.v11_over_j)

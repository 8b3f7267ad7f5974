from forge.catalog import lookup, read_pulse
from forge.noise import NoiseModel

row = lookup("Rb", 40, 50)
model = row.to_model(omega_o_mhz=5.0)
noise = NoiseModel.from_row(row, omega_o_mhz=5.0, temperature=2e-6, fock_cutoff=8)

from forge.noise import sweep
from forge.report import report_sweep

pulses = {"exact": read_pulse("exact.json"), "robust": read_pulse("robust.json")}
rows = sweep("trap_frequency", [25.0, 50.0, 100.0, 200.0], pulses, model=model, noise=noise, threads=3)
report_sweep(rows)

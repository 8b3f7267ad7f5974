from forge.catalog import lookup, read_pulse
from forge.noise import NoiseModel

row = lookup("Rb", 40, 50)
model = row.to_model(omega_o_mhz=5.0)
pulse = read_pulse("exact.json")
noise = NoiseModel.from_row(row, omega_o_mhz=5.0, temperature=2e-6, fock_cutoff=8)

from forge.noise import simulate_noisy_gate
from forge.report import report_thermal_configurations

result = simulate_noisy_gate(pulse, model, noise, check_cutoff=True, threads=3)
report_thermal_configurations(result)

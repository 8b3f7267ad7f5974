from forge.catalog import lookup, read_pulse
from forge.noise import NoiseModel

row = lookup("Rb", 40, 50)
model = row.to_model(omega_o_mhz=5.0)
pulse = read_pulse("exact.json")

noise = NoiseModel.from_row(row, omega_o_mhz=5.0, temperature=2e-6, fock_cutoff=8)
print(noise)

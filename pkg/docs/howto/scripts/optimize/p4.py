from forge.catalog import lookup
from forge.grape import OptimizationPlan, time_sweep

model = lookup("Rb", 40, 50).to_model(omega_o_mhz=5.0)
result = time_sweep(model, OptimizationPlan(n_steps=200, t_start=5.5, dT=0.01))

from forge.catalog import read_pulse, write_pulse

path = write_pulse("exact.json", result.pulse)
assert read_pulse(path).total_time == result.pulse.total_time

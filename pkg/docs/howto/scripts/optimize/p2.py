from forge.catalog import lookup

model = lookup("Rb", 40, 50).to_model(omega_o_mhz=5.0)

from forge.grape import OptimizationPlan, time_sweep

plan = OptimizationPlan(n_steps=200, t_start=5.5, dT=0.01, restarts=4, seed=0, threads=4)
result = time_sweep(model, plan)

print(f"T* = {result.t_star:.3f} / Ω_o, infidelity = {result.infidelity:.2e}")

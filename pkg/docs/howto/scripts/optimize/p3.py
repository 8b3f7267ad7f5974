from forge.catalog import lookup
from forge.grape import OptimizationPlan, time_sweep

model = lookup("Rb", 40, 50).to_model(omega_o_mhz=5.0)
plan = OptimizationPlan(n_steps=200, t_start=5.5, dT=0.01, restarts=4, seed=0, threads=4)
result = time_sweep(model, plan)

from dataclasses import replace

from forge.grape import robustify

robust = robustify(result.pulse, model, replace(plan, delta_t_star=0.5))
print(f"robust cost {robust.exact_robust_cost:.2e} -> {robust.robust_cost:.2e}")

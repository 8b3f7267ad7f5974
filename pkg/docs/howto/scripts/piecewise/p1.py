from forge.protocols import PiecewiseSpec, piecewise_gate

spec = PiecewiseSpec(branch="sqrt3_plus", omega_mw_ratio=20.0, n_steps=100)
gate = piecewise_gate(spec)

print(f"infidelity {gate.infidelity:.2e} in {gate.total_time:.3f} / Ω_o (predicted {gate.predicted_time:.3f})")
for segment in gate.segments:
    print(segment)

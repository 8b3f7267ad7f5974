from forge.catalog import lookup

row = lookup("Rb", 40, 50)
model = row.to_model(omega_o_mhz=5.0)
print(model)

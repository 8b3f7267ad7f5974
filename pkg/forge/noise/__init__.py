"""
Noise-limited gate fidelities: thermal atomic motion, photon recoil, distance fluctuations and Rydberg decay.
"""
from .exception import NoiseError, NoiseModelError, CutoffConvergenceWarning
from .generator import NoisyGenerator, noisy_generator, build_noisy_generator, free_motion
from .generator import annihilation, position, kinetic, displacement_operator, displacement_unitarity_error
from .model import NoiseModel, ThermalConfiguration, thermal_weights, thermal_configurations, species_mass
from .model import SPECIES_MASS_U, OPTICAL_WAVELENGTH, MICROWAVE_WAVELENGTH
from .simulate import NoisyGateResult, SweepRow, NoiseSweeper, simulate_noisy_gate, sweep

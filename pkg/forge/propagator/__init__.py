"""
Piecewise-constant time evolution of the computational states and the gate metrics built on it.
"""
from .evolve import Trajectory, evolve, evolve_steps, propagate, step_propagator, step_propagators, is_hermitian
from .evolve import bell_fidelity, bell_overlap, final_amplitudes, rydberg_time, leakage
from .exception import PropagatorError

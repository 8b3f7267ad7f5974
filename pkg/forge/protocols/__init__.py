"""
Gate protocols built on top of the Hamiltonian families: the analytic piecewise sequence,
the van der Waals baseline and the two-photon transfer.
"""
from .baseline import BaselineResult, BaselineBranch, baseline_model, vdw_baseline_optimize
from .exception import ProtocolError, ProtocolValidationError, InfeasibleProtocolError
from .piecewise import PiecewiseBranch, PiecewiseSpec, PiecewiseSegment, PiecewiseGate, FiniteJSolution
from .piecewise import piecewise_pulse, piecewise_gate, piecewise_finite_j, laser_always_on_gate
from .twophoton import TwoPhotonModel, TwoPhotonFamily, TwoPhotonResult
from .twophoton import two_photon_protocol, two_photon_infidelity, PROBE_WAVELENGTH, COUPLING_WAVELENGTH

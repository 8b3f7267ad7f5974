"""
Two-atom Hilbert spaces, the gate model, and every Hamiltonian family with its frame and sector reductions.
"""
from .basis import FOUR_LEVEL_STATES, BLOCKADE_STATES, TWO_PHOTON_STATES
from .basis import product_labels, sector_isometry, swap_operator
from .exception import StateSpaceError, SectorError, ModelValidationError
from .family import HamiltonianFamily, SectorSteps, family_for, default_controls
from .family import FourLevelFamily, EffectiveVdwFamily, BlockadeFamily, PiecewiseFamily
from .hamiltonian import build_full_hamiltonian, lab_frame_block, rotated_frame_block, blockade_block
from .hamiltonian import build_effective_vdw_blocks, project_infinite_j, phase_to_detuning
from .hamiltonian import operator_terms, sector_terms
from .model import GateModel, GateScheme, Pulse, EffectiveVdwControls, HamiltonianBlock, Sector

"""
Exceptions relating to Hilbert space, model and Hamiltonian construction.
"""
from forge.exception import ForgeError, FieldValidationError


class StateSpaceError(ForgeError):
    """Exception raised for errors related to state space construction."""


class SectorError(StateSpaceError):
    """Exception raised when an unknown or unsupported sector is requested."""


class ModelValidationError(FieldValidationError, StateSpaceError):
    """Exception raised when a :py:class:`GateModel` or :py:class:`Pulse` field is invalid."""

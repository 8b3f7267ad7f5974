"""
Exceptions relating to time evolution.
"""
from forge.exception import ForgeError


class PropagatorError(ForgeError):
    """Exception raised for errors related to propagating states in time."""

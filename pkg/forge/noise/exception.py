"""
Exceptions and warnings relating to noisy gate simulations.
"""
from forge.exception import ForgeError, FieldValidationError


class NoiseError(ForgeError):
    """Exception raised for errors related to noisy gate simulations."""


class NoiseModelError(FieldValidationError, NoiseError):
    """Exception raised when a :py:class:`NoiseModel` field is invalid."""


class CutoffConvergenceWarning(UserWarning):
    """Warning issued when a result changes noticeably on raising the Fock cutoff."""

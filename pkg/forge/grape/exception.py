"""
Exceptions relating to pulse optimisation.
"""
from collections.abc import Sequence
from typing import Any

from forge.exception import ForgeError, FieldValidationError


class GrapeError(ForgeError):
    """Exception raised for errors related to gradient-based pulse optimisation."""


class PlanValidationError(FieldValidationError, GrapeError):
    """Exception raised when an :py:class:`OptimizationPlan` field is invalid."""


class ConvergenceError(GrapeError):
    """
    Exception raised when a time sweep exceeds its ceiling without finding an exact gate.

    :param message: Explanation of the error.
    :param trace: The rows of the sweep recorded before aborting.
    """

    def __init__(self, message: str, trace: Sequence[Any] = ()):
        self.message = message
        self.trace = tuple(trace)
        super().__init__(message)

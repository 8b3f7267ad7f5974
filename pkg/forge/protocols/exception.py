"""
Exceptions relating to gate protocols.
"""
from forge.exception import ForgeError, FieldValidationError


class ProtocolError(ForgeError):
    """Exception raised for errors related to gate protocols."""


class ProtocolValidationError(FieldValidationError, ProtocolError):
    """Exception raised when a protocol parameter is invalid."""


class InfeasibleProtocolError(ProtocolError):
    """
    Exception raised when a protocol cannot reach an exact gate below its time ceiling.

    :param message: Explanation of the error.
    :param best_infidelity: The lowest infidelity reached before giving up.
    """

    def __init__(self, message: str, best_infidelity: float = float("nan")):
        self.message = message
        self.best_infidelity = best_infidelity
        super().__init__(f"{message} (best infidelity {best_infidelity:.3e})")

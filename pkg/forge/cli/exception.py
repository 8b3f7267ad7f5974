"""
Exceptions relating to the command line front end.
"""
from forge.exception import ForgeError, FieldValidationError


class CLIError(ForgeError):
    """Exception raised for errors related to the command line front end."""


class ConfigError(FieldValidationError, CLIError):
    """Exception raised when a run configuration is malformed. ``field`` is the dotted ``section.key``."""

"""
Exceptions shared by every subpackage. Each subpackage derives its own errors from these.
"""
from typing import Any


class ForgeError(Exception):
    """Base of every error raised by forge"""


class ForgeKeyError(ForgeError, KeyError):
    """A lookup by name or label found nothing"""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else ""


class ForgeTypeError(ForgeError, TypeError):
    """An argument has a type forge cannot work with"""


class FieldValidationError(ForgeError, ValueError):
    """
    A named field of a model, plan, config or persisted file holds an unusable value.

    :param field: Name of the offending field, dotted for nested fields.
    :param message: What is wrong with its value.
    """

    def __init__(self, field: str, message: str = "invalid value"):
        self.field = field
        self.message = message
        super().__init__(f"{field}: {message}")


class ForgeEnumError(ForgeError, LookupError):
    """
    No unique :py:class:`.ForgeEnum` member matches a query.

    :param value: The query, or the ambiguous matches.
    :param message: Why the lookup failed.
    """

    def __init__(self, value: Any, message: str = "no matching member"):
        self.value = value
        self.message = message
        super().__init__(f"{message}: {value}")

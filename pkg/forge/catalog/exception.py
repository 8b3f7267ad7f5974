"""
Exceptions relating to the interaction catalog and persisted files.
"""
from collections.abc import Iterable
from typing import Any

from forge.exception import ForgeError, ForgeKeyError, FieldValidationError


class CatalogError(ForgeError):
    """Exception raised for errors related to the interaction catalog and persisted files."""


class CatalogLookupError(ForgeKeyError, CatalogError):
    """
    Exception raised when no catalog row matches a lookup.

    :param key: The key that was looked up.
    :param available: The keys that are available.
    """

    def __init__(self, key: Any, available: Iterable[str] = ()):
        self.key = key
        self.available = tuple(available)
        super().__init__(f"No catalog row for {key}. Available: {", ".join(self.available)}")


class SchemaError(FieldValidationError, CatalogError):
    """Exception raised when a persisted file does not match its schema."""

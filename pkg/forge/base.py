"""
Base class for the immutable result objects returned by optimisers, protocols and simulations.
"""
from dataclasses import dataclass, fields
from typing import Any

from forge.printer import PrettyPrinter


@dataclass(frozen=True)
class Result(PrettyPrinter):
    """
    Frozen record of what an operation produced.

    Printing and JSON conversion cover every dataclass field declared with ``repr=True``.
    """

    def as_dict(self) -> dict[str, Any]:
        return {field.name: getattr(self, field.name) for field in fields(self) if field.repr}

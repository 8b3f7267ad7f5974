"""
Pretty printing and JSON conversion for the package's parameter and result objects.
"""
from abc import ABCMeta, abstractmethod
from collections.abc import Mapping
from datetime import date
from enum import Enum
from functools import singledispatch
from pathlib import Path
from typing import Any

import numpy as np

from forge.types import ForgeEnum

type JSON_VALUE = str | int | float | bool | None | list[JSON_VALUE] | dict[str, JSON_VALUE]
type JSON = dict[str, JSON_VALUE]


@singledispatch
def to_json_value(value: Any) -> JSON_VALUE:
    """Convert ``value`` to builtin JSON types. Values of unregistered types pass through unchanged."""
    return value


@to_json_value.register(Mapping)
def _(value: Mapping) -> JSON:
    return {str(key): to_json_value(item) for key, item in value.items()}


@to_json_value.register(list)
@to_json_value.register(tuple)
@to_json_value.register(set)
@to_json_value.register(frozenset)
def _(value) -> list[JSON_VALUE]:
    return [to_json_value(item) for item in value]


@to_json_value.register
def _(value: np.ndarray) -> list[JSON_VALUE]:
    return to_json_value(value.tolist())


@to_json_value.register
def _(value: np.generic) -> JSON_VALUE:
    return to_json_value(value.item())


@to_json_value.register
def _(value: complex) -> list[float]:
    return [float(value.real), float(value.imag)]


@to_json_value.register
def _(value: Enum) -> str:
    return value.name.lower()


@to_json_value.register
def _(value: date) -> str:
    return value.isoformat()


@to_json_value.register
def _(value: Path) -> str:
    return str(value)


class PrettyPrinter(metaclass=ABCMeta):
    """
    Base for objects that print as an aligned block of their key attributes and convert to JSON.

    Subclasses only implement :py:meth:`as_dict`.
    """

    __slots__ = ()

    #: Words kept upper case in printed labels
    _upper_key_words = frozenset({"csv", "json", "mw", "id"})
    #: Widest single-line rendering before attributes are broken onto separate lines
    _max_val_width = 120
    #: Arrays longer than this are summarised when printing
    _max_array_print = 6

    @abstractmethod
    def as_dict(self) -> dict[str, Any]:
        """
        The key attributes of this object.

        Drives :py:meth:`json`, ``str()`` and ``repr()``.
        """
        raise NotImplementedError

    def _json_attributes(self) -> Mapping[str, Any]:
        return self.as_dict()

    def json(self) -> JSON:
        """The key attributes of this object converted to builtin JSON types"""
        return to_json_value(self._json_attributes())

    @classmethod
    def _label(cls, key: Any) -> str:
        words = str(key).split("_")
        return " ".join(word.upper() if word.casefold() in cls._upper_key_words else word.title() for word in words)

    @classmethod
    def _format_value(cls, value: Any, indent: int, increment: int) -> str:
        if isinstance(value, PrettyPrinter):
            return value.__str__(indent=indent, increment=increment)
        elif isinstance(value, np.ndarray):
            if value.size <= cls._max_array_print:
                return np.array2string(value, precision=6, separator=", ")
            head = np.array2string(value.ravel()[:3], precision=6, separator=", ").strip("[]")
            return f"[{head}, ...] (shape={value.shape})"
        elif isinstance(value, ForgeEnum):
            return value.name.lower()
        elif isinstance(value, date):
            return str(value)
        elif isinstance(value, Mapping) and value:
            return "{" + ", ".join(cls._to_str(value, indent=indent, increment=increment)) + "}"
        return repr(value)

    @classmethod
    def _to_str(cls, attributes: Mapping[str, Any], indent: int = 2, increment: int = 2) -> list[str]:
        labels = {key: cls._label(key) for key in attributes}
        width = max(map(len, labels.values()), default=0) + 1
        width += width % increment

        lines = []
        for key, value in attributes.items():
            rendered = cls._format_value(value, indent=indent + increment, increment=increment)
            line = f"{labels[key]} = {rendered}"
            if len(attributes) > 1 or len(line) > cls._max_val_width - width:
                line = f"{labels[key]:<{width}}= {rendered}"
            lines.append(line)
        return lines

    def __str__(self, indent: int = 2, increment: int = 2) -> str:
        name = type(self).__name__
        attributes = self.as_dict()
        if not attributes:
            return f"{name}()"

        body = "\n".join(" " * indent + line for line in self._to_str(attributes, indent=indent, increment=increment))
        return f"{name}(\n{body}\n{" " * (indent - increment)})"

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.as_dict()!r})"


@to_json_value.register
def _(value: PrettyPrinter) -> JSON:
    return value.json()

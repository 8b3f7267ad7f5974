"""
Small helpers shared across the package: column alignment for console reports,
number formatting and nested config updates.
"""
import unicodedata
from collections.abc import Iterable, Mapping, MutableMapping, Sized
from typing import Any

from forge.exception import ForgeTypeError


###########################################################################
## Text
###########################################################################
def display_width(text: str) -> int:
    """Columns taken by ``text`` in a fixed-width terminal, counting wide characters twice and combining marks not at all"""
    width = 0
    for char in text:
        if unicodedata.combining(char) or unicodedata.category(char) in {"Mn", "Mc"}:
            continue
        width += 2 if unicodedata.east_asian_width(char) in {"W", "F"} or unicodedata.category(char) == "So" else 1
    return width


def column_width(values: Iterable[Any], min_width: int = 15, max_width: int = 50) -> int:
    """Width of a column holding ``values`` plus one separating space, clamped to ``[min_width, max_width]``"""
    widest = max((display_width(str(value)) for value in values), default=None)
    if widest is None:
        return min_width
    return clamp(widest + 1, min_width, max_width)


def fit_to_width(value: Any, width: int) -> str:
    """
    Render ``value`` in exactly ``width`` terminal columns.

    Short values are padded with spaces on the right.
    Long values are cut and end with up to three dots.
    """
    text = str(value)
    if width <= 0:
        return ""

    overflow = display_width(text) > width
    if overflow:
        dots = clamp(width - 3, 0, 3)
        while text and display_width(text) > width - dots:
            text = text[:-1]
        text += "." * dots

    return text + " " * (width - display_width(text))


def format_float(value: float, digits: int = 6) -> str:
    """Fixed-point for moderate magnitudes, scientific notation below 1e-3 or from 1e5 upwards"""
    if value != 0 and not 1e-3 <= abs(value) < 1e5:
        return f"{value:.{digits - 2}e}"
    return f"{value:.{digits}f}"


def clamp[T: int | float](value: T, floor: T, ceil: T) -> T:
    """``value`` limited to the closed range ``[floor, ceil]``"""
    return floor if value < floor else ceil if value > ceil else value


###########################################################################
## Containers
###########################################################################
def as_list(value: Any) -> list | None:
    """
    ``value`` as a list, or None for None.

    Strings, bytes and mappings count as single items.
    """
    if value is None:
        return None
    if isinstance(value, (str, bytes, Mapping)) or not isinstance(value, Iterable):
        return [value]
    if not isinstance(value, Sized):
        raise ForgeTypeError(f"Refusing to exhaust an unsized iterable: {value!r}")
    return list(value)


def set_nested(target: MutableMapping, dotted_key: str, value: Any) -> MutableMapping:
    """
    Set ``value`` in ``target`` at ``dotted_key`` such as ``model.j_exchange``.

    Missing tables along the way are created and scalars in their place are replaced.
    """
    *path, leaf = dotted_key.split(".")
    table = target
    for key in path:
        if not isinstance(table.get(key), MutableMapping):
            table[key] = {}
        table = table[key]
    table[leaf] = value
    return target

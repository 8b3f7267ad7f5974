"""
Type aliases for the numerical arrays and the enum base used across the package.
"""
from collections.abc import Iterable
from enum import IntEnum
from typing import Self, Any

import numpy as np
from numpy.typing import NDArray

from forge.exception import ForgeEnumError

type Number = int | float
type RealArray = NDArray[np.float64]
type ComplexArray = NDArray[np.complex128]


class ForgeEnum(IntEnum):
    """
    Base for the package's enums, looked up by value or by a forgiving name.

    Names match case-insensitively with '-' and ' ' read as '_', so 'p-s' finds ``P_S``.
    """

    @staticmethod
    def _unique_list(value: Iterable[Any]) -> list[Any]:
        """The items of ``value`` without repeats, in first-seen order"""
        return list(dict.fromkeys(value))

    @staticmethod
    def _normalise(name: str) -> str:
        return name.strip().upper().replace("-", "_").replace(" ", "_")

    @classmethod
    def _select(cls, matches: Iterable[Self], query: Any, fail_on_many: bool) -> list[Self]:
        matches = cls._unique_list(matches)
        if not matches:
            raise ForgeEnumError(query, message=f"Could not find {cls.__name__}")
        if len(matches) > 1 and fail_on_many:
            raise ForgeEnumError(matches, message=f"Found more than one {cls.__name__}")
        return matches

    @classmethod
    def all(cls) -> list[Self]:
        """Every member in definition order"""
        return list(cls)

    @classmethod
    def from_name(cls, *names: str, fail_on_many: bool = True) -> list[Self]:
        """
        The members with the given names.

        :param fail_on_many: Raise when more than one member matches.
        :raise ForgeEnumError: When nothing matches.
        """
        wanted = {cls._normalise(name) for name in names}
        return cls._select((member for member in cls if member.name in wanted), names, fail_on_many)

    @classmethod
    def from_value(cls, *values: int, fail_on_many: bool = True) -> list[Self]:
        """
        The members with the given values.

        :param fail_on_many: Raise when more than one member matches.
        :raise ForgeEnumError: When nothing matches.
        """
        return cls._select((member for member in cls if member.value in values), values, fail_on_many)

    @classmethod
    def parse(cls, value: Self | str) -> Self:
        """The single member for ``value`` given as a member or by name"""
        if isinstance(value, cls):
            return value
        return cls.from_name(str(value))[0]

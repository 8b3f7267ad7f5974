"""
Name-dispatched processors: objects that run one of their methods chosen by a user-facing name,
such as a CLI command or a sweep axis.
"""
from abc import ABCMeta
from collections.abc import Callable, Mapping
from functools import update_wrapper
from types import MappingProxyType, MethodType
from typing import Any

from forge.printer import PrettyPrinter
from forge.processors.exception import ProcessorLookupError


class ProcessorMethod:
    """
    A method a :py:class:`DynamicProcessor` may dispatch to by name.

    :param func: The decorated function.
    :param alternative_names: Further names the method answers to.
    """

    def __init__(self, func: Callable, alternative_names: tuple[str, ...] = ()):
        self.func = func
        self.alternative_names = alternative_names
        update_wrapper(self, func)

    def __get__(self, instance, owner):
        return self if instance is None else MethodType(self.func, instance)

    def __call__(self, *args, **kwargs) -> Any:
        return self.func(*args, **kwargs)


# noinspection PyPep8Naming,SpellCheckingInspection
def dynamicprocessormethod(*args: str | Callable) -> ProcessorMethod | Callable[[Callable], ProcessorMethod]:
    """
    Register a method of a :py:class:`DynamicProcessor` for dispatch by name.

    Use bare, or call with alternative names first e.g. ``@dynamicprocessormethod("trap")``.
    """
    if len(args) == 1 and callable(args[0]):
        return ProcessorMethod(args[0])
    return lambda func: ProcessorMethod(func, alternative_names=tuple(args))


# noinspection SpellCheckingInspection
class DynamicProcessor(PrettyPrinter, metaclass=ABCMeta):
    """
    Base class for objects that run one of their :py:func:`dynamicprocessormethod` methods chosen by name.

    The names of a class are collected once, when the class is created. Every name,
    including alternative names, is passed through :py:meth:`_processor_method_fmt`
    so that e.g. ``"Trap-Frequency"`` selects ``trap_frequency``.
    """

    __slots__ = ("_processor_name",)

    #: Map of every accepted name, already formatted, to the attribute holding its method.
    __processormethods__: Mapping[str, str] = MappingProxyType({})

    def __init_subclass__(cls, **kwargs):
        super().__init_subclass__(**kwargs)
        names = dict(cls.__processormethods__)
        for attribute, method in vars(cls).items():
            if isinstance(method, ProcessorMethod):
                names |= {cls._processor_method_fmt(name): attribute for name in (attribute, *method.alternative_names)}
        cls.__processormethods__ = MappingProxyType(names)

    @property
    def processor_methods(self) -> frozenset[str]:
        """Every name this processor accepts"""
        return frozenset(self.__processormethods__)

    @classmethod
    def _processor_method_fmt(cls, name: str) -> str:
        return name.strip().casefold().replace("-", "_")

    def __init__(self):
        self._processor_name: str | None = None

    @property
    def processor_name(self) -> str | None:
        """The formatted name of the selected method"""
        return self._processor_name

    def _set_processor_name(self, value: str | None, fail_on_empty: bool = True) -> None:
        choices = ", ".join(sorted(self.processor_methods))
        if value is None:
            if fail_on_empty:
                raise ProcessorLookupError(f"No name given. Choose from: {choices}")
            self._processor_name = None
            return

        name = self._processor_method_fmt(value)
        if name not in self.__processormethods__:
            raise ProcessorLookupError(f"Unknown name {value!r}. Choose from: {choices}")
        self._processor_name = name

    @property
    def _processor_method(self) -> Callable:
        return getattr(self, self.__processormethods__[self._processor_name])

    def __call__(self, *args, **kwargs) -> Any:
        return self._processor_method(*args, **kwargs)

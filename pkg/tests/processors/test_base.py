from typing import Any

import pytest

from forge.processors.base import DynamicProcessor, ProcessorMethod, dynamicprocessormethod
from forge.processors.exception import ProcessorLookupError


def test_decorator_wraps_function():
    @dynamicprocessormethod
    def bare(value: float) -> float:
        """Doubles the value"""
        return 2 * value

    assert isinstance(bare, ProcessorMethod)
    assert bare.alternative_names == ()
    assert bare.__name__ == "bare"
    assert bare.__doc__ == "Doubles the value"
    assert bare(1.5) == 3.0

    @dynamicprocessormethod("trap", "trap_khz")
    def aliased() -> str:
        return "trap"

    assert isinstance(aliased, ProcessorMethod)
    assert aliased.alternative_names == ("trap", "trap_khz")
    assert aliased() == "trap"


# noinspection PyMissingOrEmptyDocstring
class AxisProcessor(DynamicProcessor):

    __slots__ = ("scale",)

    def __init__(self, axis: str | None = None, scale: float = 1.0):
        super().__init__()
        self.scale = scale
        self._set_processor_name(axis, fail_on_empty=False)

    @dynamicprocessormethod
    def distance(self, value: float) -> float:
        return self.scale * value

    @dynamicprocessormethod("trap")
    def trap_frequency(self, value: float) -> float:
        return 2 * self.scale * value

    @dynamicprocessormethod("Rabi-Frequency", "omega")
    def rabi_frequency(self, value: float) -> float:
        return 3 * self.scale * value

    def as_dict(self) -> dict[str, Any]:
        return {"axis": self.processor_name, "scale": self.scale}


# noinspection PyMissingOrEmptyDocstring
class ShiftedAxisProcessor(AxisProcessor):

    @dynamicprocessormethod("offset")
    def shifted_distance(self, value: float) -> float:
        return self.scale * value + 1


def test_names_are_collected_on_class_creation():
    assert AxisProcessor.__processormethods__ == {
        "distance": "distance",
        "trap_frequency": "trap_frequency",
        "trap": "trap_frequency",
        "rabi_frequency": "rabi_frequency",
        "omega": "rabi_frequency",
    }
    assert AxisProcessor().processor_methods == {"distance", "trap_frequency", "trap", "rabi_frequency", "omega"}


def test_subclass_inherits_names():
    assert ShiftedAxisProcessor().processor_methods == AxisProcessor().processor_methods | {
        "shifted_distance", "offset"
    }
    assert "offset" not in AxisProcessor.__processormethods__
    assert ShiftedAxisProcessor("offset", scale=2.0)(3.0) == 7.0
    assert ShiftedAxisProcessor("trap", scale=2.0)(3.0) == 12.0


def test_dispatch():
    processor = AxisProcessor("trap", scale=0.5)
    assert processor.processor_name == "trap"
    assert processor._processor_method == processor.trap_frequency
    assert processor(4.0) == 4.0

    processor._set_processor_name("OMEGA")
    assert processor._processor_method == processor.rabi_frequency
    assert processor(4.0) == 6.0


def test_set_processor_name():
    processor = AxisProcessor()
    assert processor.processor_name is None

    processor._set_processor_name(" Rabi-Frequency ")
    assert processor.processor_name == "rabi_frequency"
    assert processor(1.0) == 3.0

    processor._set_processor_name(None, fail_on_empty=False)
    assert processor.processor_name is None

    with pytest.raises(ProcessorLookupError, match="No name given"):
        processor._set_processor_name(None)
    with pytest.raises(ProcessorLookupError, match="distance, omega, rabi_frequency, trap, trap_frequency"):
        processor._set_processor_name("temperature")

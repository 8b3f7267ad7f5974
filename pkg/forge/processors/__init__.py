"""
Dynamic, name-dispatched processors used to map user-facing names onto package operations.
"""
from .base import DynamicProcessor, ProcessorMethod, dynamicprocessormethod
from .exception import ProcessorError, ProcessorLookupError

import logging.config
from collections.abc import Collection

import numpy as np
import pytest
import yaml
# noinspection PyProtectedMember
from _pytest.logging import LogCaptureHandler, _remove_ansi_escape_sequences

from forge.logger import ForgeLogger
from forge.statespace import GateModel, Pulse
from forge.utils import as_list
from tests.utils import path_resources


@pytest.hookimpl
def pytest_configure(config: pytest.Config):
    """Quiet progress bars and separator lines, and route package logs through the test logging config"""
    ForgeLogger.disable_bars = True
    ForgeLogger.compact = True

    config_file = path_resources.joinpath("test_logging.yml")
    if config_file.is_file():
        logging.config.dictConfig(yaml.safe_load(config_file.read_text(encoding="utf-8")))


class LogCapturer(LogCaptureHandler):
    """
    Attaches itself directly to chosen loggers for the duration of a ``with`` block.

    Unlike pytest's ``caplog`` this sees records from loggers that do not propagate to the root.
    """

    def __init__(self):
        super().__init__()
        self._level = logging.INFO
        self._original_levels: dict[logging.Logger, int] = {}

    @property
    def text(self) -> str:
        return _remove_ansi_escape_sequences(self.stream.getvalue())

    @property
    def messages(self) -> list[str]:
        return [_remove_ansi_escape_sequences(record.getMessage()) for record in self.records]

    def __call__(self, level: int = logging.INFO, loggers: logging.Logger | Collection[logging.Logger] = ()):
        self._level = level
        self._original_levels = {logger: logger.level for logger in as_list(loggers)}
        return self

    def __enter__(self):
        self.clear()
        for logger in self._original_levels:
            logger.setLevel(self._level)
            logger.addHandler(self)
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        for logger, level in self._original_levels.items():
            logger.removeHandler(self)
            logger.setLevel(level)
        self._original_levels = {}
        self._level = logging.INFO


@pytest.fixture
def log_capturer() -> LogCapturer:
    return LogCapturer()


###########################################################################
## Domain fixtures
###########################################################################
@pytest.fixture
def model() -> GateModel:
    """A four-level model at finite J with small van der Waals shifts"""
    return GateModel(j_exchange=10.0, v11=0.07, v12=0.16, v22=0.79)


@pytest.fixture
def pulse() -> Pulse:
    """A short smooth four-level pulse"""
    n_steps = 12
    t = (np.arange(n_steps) + 0.5) / n_steps
    return Pulse(
        total_time=6.0,
        controls={"phi_mw": 0.4 * np.cos(2 * np.pi * t), "omega_mw": 2.0 * np.sin(np.pi * t)},
        delta_o=0.1,
        theta=np.pi,
    )

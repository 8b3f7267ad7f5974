"""
Logging for the package: the custom levels, the logger class with shortcuts and progress bars,
and the environment-driven setup used by the command line.
"""
import logging
import logging.config
import os
import sys
from collections.abc import Iterable, Mapping
from typing import Any

from forge import MODULE_ROOT

try:
    from tqdm.auto import tqdm
except ImportError:
    tqdm = None

#: Supplementary run information, just below INFO
INFO_EXTRA = logging.INFO - 1
#: Human-facing summaries of results
REPORT = logging.INFO - 3
#: Per-iteration numbers such as costs, gate times and infidelities
STAT = logging.DEBUG + 3

for _name, _level in {"INFO_EXTRA": INFO_EXTRA, "REPORT": REPORT, "STAT": STAT}.items():
    logging.addLevelName(_level, _name)
    setattr(logging, _name, _level)

#: Environment variable controlling CLI verbosity
LOG_ENV_VAR = "FORGE_LOG"
#: Map of accepted ``FORGE_LOG`` values to the level they enable
LOG_ENV_LEVELS: Mapping[str, int] = {
    "error": logging.ERROR,
    "info": REPORT,
    "debug": logging.DEBUG,
}


class ForgeLogger(logging.Logger):
    """
    The logger of every module in Forge.

    Adds shortcuts for the custom levels, blank separator lines between console reports
    and tqdm progress bars for long loops.
    """

    __slots__ = ()

    #: Suppress the separator lines of :py:meth:`print_line`
    compact: bool = False
    #: Disable every bar returned by :py:meth:`get_synchronous_iterator`
    disable_bars: bool = False
    #: Bars opened by this logger that may still be running
    _bars: list = []

    def _log_at(self, level: int, msg: object, args: tuple, **kwargs) -> None:
        if self.isEnabledFor(level):
            kwargs["stacklevel"] = kwargs.get("stacklevel", 1) + 2
            self._log(level, msg, args, **kwargs)

    def info_extra(self, msg: object, *args, **kwargs) -> None:
        """Log ``msg % args`` at INFO_EXTRA"""
        self._log_at(INFO_EXTRA, msg, args, **kwargs)

    def report(self, msg: object, *args, **kwargs) -> None:
        """Log ``msg % args`` at REPORT"""
        self._log_at(REPORT, msg, args, **kwargs)

    def stat(self, msg: object, *args, **kwargs) -> None:
        """Log ``msg % args`` at STAT"""
        self._log_at(STAT, msg, args, **kwargs)

    @property
    def stdout_handlers(self) -> set[logging.StreamHandler]:
        """Stream handlers writing to stdout, attached to this logger or registered by name"""
        named = (logging.getHandlerByName(name) for name in logging.getHandlerNames())
        return {
            handler for handler in (*self.handlers, *named)
            if isinstance(handler, logging.StreamHandler) and handler.stream is sys.stdout
        }

    def print_line(self, level: int = logging.CRITICAL + 1) -> None:
        """Print a blank line when some stdout handler shows messages above DEBUG up to ``level``"""
        if self.compact:
            return
        if any(logging.DEBUG < handler.level <= level for handler in self.stdout_handlers):
            print()

    def get_synchronous_iterator[T](
            self, iterable: Iterable[T] | None = None, total: int | None = None, **kwargs
    ) -> Iterable[T]:
        """
        Wrap ``iterable`` in a tqdm bar, or return it unchanged when tqdm is not installed.

        Iterates ``range(total)`` when no ``iterable`` is given. Remaining kwargs are passed to :py:class:`tqdm`.
        """
        if iterable is None:
            iterable = range(total)
        if tqdm is None:
            return iter(iterable)

        bar = tqdm(iterable=iterable, **self._get_tqdm_kwargs(total=total, **kwargs))
        self._bars.append(bar)
        return bar

    def _get_tqdm_kwargs(self, **kwargs) -> dict[str, Any]:
        self._bars = [bar for bar in self._bars if not bar.disable and (bar.total is None or bar.n < bar.total)]

        position = kwargs.pop("position", None)
        if position is None and self._bars:
            position = len(self._bars)

        for fixed in ("file", "smoothing", "dynamic_ncols"):
            kwargs.pop(fixed, None)

        return {
            "disable": self.disable_bars or kwargs.pop("disable", False),
            "leave": kwargs.pop("leave", position in (None, 0)),
            "position": position,
            "colour": kwargs.pop("colour", "cyan"),
            "file": sys.stderr,
            "dynamic_ncols": True,
            "smoothing": 0.1,
        } | kwargs

    def __copy__(self):
        return self

    def __deepcopy__(self, _: dict = None):
        return self


logging.setLoggerClass(ForgeLogger)


def configure_from_env(default: str = "info", environ: Mapping[str, str] | None = None) -> int:
    """
    Configure the package logger from the ``FORGE_LOG`` environment variable.

    Installs a single stderr handler on the package logger only; the root logger is never touched.
    Unknown values fall back to ``default``.

    :param default: The verbosity to use when the variable is unset or invalid.
    :param environ: The environment to read from. Defaults to :py:data:`os.environ`.
    :return: The level that was applied.
    """
    environ = os.environ if environ is None else environ
    value = environ.get(LOG_ENV_VAR, default).strip().casefold()
    level = LOG_ENV_LEVELS.get(value, LOG_ENV_LEVELS[default])

    logging.config.dictConfig({
        "version": 1,
        "disable_existing_loggers": False,
        "formatters": {
            "console": {"format": "{levelname:>8.8} | {name} | {message}", "style": "{"},
        },
        "handlers": {
            "stderr": {
                "class": "logging.StreamHandler",
                "level": level,
                "formatter": "console",
                "stream": "ext://sys.stderr",
            },
        },
        "loggers": {
            MODULE_ROOT: {"level": level, "handlers": ["stderr"], "propagate": False},
        },
    })

    ForgeLogger.disable_bars = level > logging.INFO
    return level

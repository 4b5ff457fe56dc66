"""Logging for the edge learning simulator.

Records logged while a simulator is running carry the simulated time as
``sim_time`` (seconds, nanosecond precision); outside a run it is ``-``.
"""

import contextlib
import contextvars
import logging
import logging.handlers
from pathlib import Path
from typing import Callable, Dict, Iterator, Optional

from rich.console import Console
from rich.logging import RichHandler

_clock: contextvars.ContextVar[Optional[Callable[[], int]]] = contextvars.ContextVar("sim_clock", default=None)

# Per-event and per-epoch chatter stays out of INFO runs
QUIET_LOGGERS: Dict[str, int] = {
    "edge_learning_sim.core.engine": logging.INFO,
    "edge_learning_sim.learning.training": logging.INFO,
}

FILE_FORMAT = "%(asctime)s [%(sim_time)s] %(name)s %(levelname)s %(message)s"


@contextlib.contextmanager
def sim_clock(now: Callable[[], int]) -> Iterator[None]:
    """Stamp records logged inside the block with ``now()`` nanoseconds."""
    token = _clock.set(now)
    try:
        yield
    finally:
        _clock.reset(token)


class SimTimeFilter(logging.Filter):
    """Adds ``sim_time`` to every record passing through a handler."""

    def filter(self, record: logging.LogRecord) -> bool:
        now = _clock.get()
        record.sim_time = f"{now() / 1e9:.9f}s" if now is not None else "-"
        return True


def setup_logging(
    level: str = "INFO",
    log_file: Optional[Path] = None,
    enable_rich: bool = True,
) -> None:
    """Configure the root logger.

    Args:
        level: DEBUG, INFO, WARNING, ERROR or CRITICAL; unknown names mean INFO
        log_file: Optional rotating log file, always written at DEBUG
        enable_rich: Rich console output instead of plain stderr lines
    """
    root_logger = logging.getLogger()
    for handler in root_logger.handlers[:]:
        root_logger.removeHandler(handler)
        handler.close()

    log_level = getattr(logging, level.upper(), logging.INFO)
    root_logger.setLevel(min(log_level, logging.DEBUG) if log_file else log_level)

    console_handler: logging.Handler
    if enable_rich:
        console_handler = RichHandler(
            console=Console(stderr=True),
            show_time=False,
            show_path=False,
            rich_tracebacks=True,
        )
        console_handler.setFormatter(logging.Formatter("%(sim_time)s %(message)s"))
    else:
        console_handler = logging.StreamHandler()
        console_handler.setFormatter(logging.Formatter("%(sim_time)s %(levelname)s %(message)s"))
    console_handler.setLevel(log_level)
    console_handler.addFilter(SimTimeFilter())
    root_logger.addHandler(console_handler)

    if log_file:
        log_file = Path(log_file)
        log_file.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.handlers.RotatingFileHandler(
            log_file,
            maxBytes=10 * 1024 * 1024,
            backupCount=5,
            encoding="utf-8",
        )
        file_handler.setFormatter(logging.Formatter(FILE_FORMAT, datefmt="%Y-%m-%d %H:%M:%S"))
        file_handler.setLevel(logging.DEBUG)
        file_handler.addFilter(SimTimeFilter())
        root_logger.addHandler(file_handler)

    for name, floor in QUIET_LOGGERS.items():
        logging.getLogger(name).setLevel(max(log_level, floor))


def get_logger(name: str) -> logging.Logger:
    """Get a logger instance with the given name."""
    return logging.getLogger(name)

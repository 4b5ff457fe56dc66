"""Core package: engine, random streams, trace, settings, errors and logging."""

from .config import Settings, get_settings
from .engine import Event, RunStats, Simulator, round_half_up_div
from .exceptions import (
    ConfigIssue,
    ConfigurationError,
    EdgeSimError,
    InvalidArgumentError,
    NoRouteError,
    NotFoundError,
    PayloadError,
    ScenarioValidationError,
    ShapeError,
    SimulationError,
)
from .logging import get_logger, setup_logging
from .rng import RandomStream, derive_seed
from .trace import Trace, TraceKind, TraceRecord, read_trace

__all__ = [
    "ConfigIssue",
    "ConfigurationError",
    "EdgeSimError",
    "Event",
    "InvalidArgumentError",
    "NoRouteError",
    "NotFoundError",
    "PayloadError",
    "RandomStream",
    "RunStats",
    "ScenarioValidationError",
    "Settings",
    "ShapeError",
    "SimulationError",
    "Simulator",
    "Trace",
    "TraceKind",
    "TraceRecord",
    "derive_seed",
    "get_logger",
    "get_settings",
    "read_trace",
    "round_half_up_div",
    "setup_logging",
]

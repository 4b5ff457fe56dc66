"""Custom exceptions for the edge learning simulator."""

from typing import List, Optional


class EdgeSimError(Exception):
    """Base exception for the edge learning simulator."""

    def __init__(self, message: str, details: Optional[str] = None):
        self.message = message
        self.details = details
        super().__init__(self.message)


class InvalidArgumentError(EdgeSimError):
    """Exception raised when an operation receives an invalid argument."""
    pass


class NotFoundError(EdgeSimError):
    """Exception raised when a node, link or event id is unknown."""
    pass


class ShapeError(EdgeSimError):
    """Exception raised when tensor shapes do not line up."""

    def __init__(self, message: str, layer: Optional[str] = None, details: Optional[str] = None):
        self.layer = layer
        if layer is not None:
            message = f"{layer}: {message}"
        super().__init__(message, details)


class NoRouteError(EdgeSimError):
    """Exception raised when a packet has no route to its destination."""
    pass


class PayloadError(EdgeSimError):
    """Exception raised when a packet payload cannot be decoded."""
    pass


class SimulationError(EdgeSimError):
    """Exception raised when an event callback fails during a run."""

    def __init__(self, message: str, event_id: Optional[int] = None, details: Optional[str] = None):
        self.event_id = event_id
        super().__init__(message, details)


class ConfigurationError(EdgeSimError):
    """Exception raised when configuration is invalid."""
    pass


class ConfigIssue:
    """A single scenario validation problem with its source location."""

    __slots__ = ("line", "field", "message")

    def __init__(self, line: Optional[int], field: str, message: str):
        self.line = line
        self.field = field
        self.message = message

    def __str__(self) -> str:
        where = f"line {self.line}" if self.line is not None else "config"
        return f"{where}: {self.field}: {self.message}"

    def __repr__(self) -> str:
        return f"ConfigIssue(line={self.line!r}, field={self.field!r}, message={self.message!r})"


class ScenarioValidationError(ConfigurationError):
    """Exception raised when a scenario file fails validation.

    Carries every issue found, not only the first one.
    """

    def __init__(self, issues: List[ConfigIssue]):
        self.issues = list(issues)
        summary = f"{len(self.issues)} validation error(s) in scenario"
        super().__init__(summary, details="\n".join(str(issue) for issue in self.issues))

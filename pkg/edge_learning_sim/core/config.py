"""Configuration management for the edge learning simulator."""

from pathlib import Path
from typing import Optional

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from .exceptions import ConfigurationError
from .logging import get_logger

logger = get_logger(__name__)

NANOSECONDS_PER_SECOND = 1_000_000_000


class Settings(BaseSettings):
    """Process-level settings, read from ``EDGE_SIM_*`` variables or ``.env``.

    Scenario semantics live in the scenario file; these settings only cover
    where outputs go and how the process logs.
    """

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        env_prefix="EDGE_SIM_",
        extra="ignore",
    )

    app_name: str = Field(default="Edge Learning Simulator")
    app_version: str = Field(default="1.0.0")
    debug: bool = Field(default=False)
    log_level: str = Field(default="INFO")

    output_dir: Path = Field(default_factory=lambda: Path.cwd() / "runs")
    default_trace_name: str = Field(default="trace.jsonl")
    default_metrics_name: str = Field(default="metrics.txt")

    # Applied to training applications whose scenario omits reply_timeout_ns
    default_reply_timeout_ns: int = Field(default=100_000_000, gt=0)

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        level = v.strip().upper()
        if level not in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}:
            raise ValueError(f"Unknown log level: {v}")
        return level

    def ensure_output_dir(self) -> Path:
        """Create the output directory if it doesn't exist."""
        try:
            self.output_dir.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise ConfigurationError(f"Failed to create output directory: {e}", details=str(self.output_dir))
        logger.debug(f"Ensured output directory exists: {self.output_dir}")
        return self.output_dir

    @property
    def default_trace_path(self) -> Path:
        return self.output_dir / self.default_trace_name

    @property
    def default_metrics_path(self) -> Path:
        return self.output_dir / self.default_metrics_name


_settings: Optional[Settings] = None


def get_settings() -> Settings:
    """Get or create global settings instance."""
    global _settings
    if _settings is None:
        _settings = Settings()
    return _settings

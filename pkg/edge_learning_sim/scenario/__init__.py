"""Scenario files, assembly and runs."""

from pathlib import Path

from .config_format import CONFIG_FORMAT_VERSION, load_config, parse_config, render_config
from .runner import ScenarioRun, build_scenario, collect_metrics, run_scenario, write_metrics

DEFAULT_SCENARIO = Path(__file__).with_name("default.scn")

__all__ = [
    "CONFIG_FORMAT_VERSION",
    "DEFAULT_SCENARIO",
    "ScenarioRun",
    "build_scenario",
    "collect_metrics",
    "load_config",
    "parse_config",
    "render_config",
    "run_scenario",
    "write_metrics",
]

"""
Edge Learning Simulator

A deterministic discrete-event simulator for deep learning at the network
edge: nodes, point-to-point links, per-node LRU caches and applications on one
side, a NumPy neural-network toolkit on the other, and an end-to-end edge
ensemble-learning scenario joining the two.
"""

__version__ = "1.0.0"
__description__ = "Discrete-event simulator for deep learning at the network edge"

from .core.config import Settings, get_settings
from .core.engine import Simulator
from .core.exceptions import EdgeSimError
from .models.data_models import MetricsSummary, ScenarioConfig
from .scenario.config_format import load_config, parse_config, render_config
from .scenario.runner import build_scenario, run_scenario

__all__ = [
    "__version__",
    "__description__",
    "EdgeSimError",
    "MetricsSummary",
    "ScenarioConfig",
    "Settings",
    "Simulator",
    "build_scenario",
    "get_settings",
    "load_config",
    "parse_config",
    "render_config",
    "run_scenario",
]

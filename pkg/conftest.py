"""Pytest configuration for edge learning simulator tests."""

import sys
from pathlib import Path
from typing import Callable, List, Tuple

import pytest

# Add the project root to Python path
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

from edge_learning_sim.core import config as config_module  # noqa: E402
from edge_learning_sim.core.engine import Simulator  # noqa: E402
from edge_learning_sim.models.data_models import ScenarioConfig  # noqa: E402
from edge_learning_sim.network.application import Application  # noqa: E402
from edge_learning_sim.network.packet import Packet  # noqa: E402
from edge_learning_sim.network.topology import Network  # noqa: E402
from edge_learning_sim.scenario import DEFAULT_SCENARIO, load_config  # noqa: E402

GIGABIT = 1_000_000_000
TWO_MS = 2_000_000


class Recorder(Application):
    """Application that records every delivered packet with its arrival time."""

    kind = "recorder"

    def __init__(self) -> None:
        super().__init__()
        self.received: List[Tuple[Packet, int]] = []
        self.started_at: List[int] = []
        self.on_receive(lambda packet, arrival: self.received.append((packet, arrival)))

    def on_start(self) -> None:
        self.started_at.append(self.now)


class Sender(Application):
    """Application that only sends; tests call :meth:`send` directly."""

    kind = "sender"


@pytest.fixture
def sim():
    """A fresh simulator with seed 1."""
    return Simulator(seed=1)


@pytest.fixture
def make_line() -> Callable[..., Tuple[Simulator, Network]]:
    """Factory for a chain 0 - 1 - ... - (n-1) of identical links, stacks installed."""

    def factory(
        n: int = 2,
        rate_bps: int = GIGABIT,
        delay_ns: int = TWO_MS,
        queue_capacity: int = 100,
        seed: int = 1,
    ) -> Tuple[Simulator, Network]:
        simulator = Simulator(seed=seed)
        network = Network(simulator)
        network.create_nodes(n)
        for a in range(n - 1):
            network.connect_p2p(a, a + 1, rate_bps, delay_ns, queue_capacity)
        network.install_stack()
        return simulator, network

    return factory


@pytest.fixture
def default_config() -> ScenarioConfig:
    """The shipped edge ensemble scenario."""
    return load_config(DEFAULT_SCENARIO)


@pytest.fixture
def fresh_settings(monkeypatch):
    """Reset the cached settings singleton around a test."""
    monkeypatch.setattr(config_module, "_settings", None)

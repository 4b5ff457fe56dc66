"""Terminal data generator application."""

from ipaddress import IPv4Address
from typing import Optional

from ..core.exceptions import InvalidArgumentError, NoRouteError
from ..core.logging import get_logger
from ..core.rng import RandomStream
from ..network.application import Application
from ..network.packet import PacketKind
from .payloads import encode_sample
from .sources import SampleSource

logger = get_logger(__name__)


def sample_id(node_id: int, sequence: int) -> int:
    """Globally unique id: the sending node in the high 32 bits, its counter in the low."""
    return (node_id << 32) | sequence


class DataGeneratorApp(Application):
    """Sends ``samples_to_send`` DATA_SAMPLE packets to an edge node.

    Sends happen at start, start + gap, start + 2 * gap, ... Each terminal
    draws from its own stream ``data/node<id>``.
    """

    kind = "generator"

    def __init__(
        self,
        target_address: IPv4Address,
        samples_to_send: int,
        inter_send_gap_ns: int,
        source: SampleSource,
    ):
        super().__init__()
        if samples_to_send < 0:
            raise InvalidArgumentError(f"samples_to_send must be >= 0, got {samples_to_send}")
        if inter_send_gap_ns < 0:
            raise InvalidArgumentError(f"inter_send_gap_ns must be >= 0, got {inter_send_gap_ns}")
        self.target_address = IPv4Address(target_address)
        self.samples_to_send = samples_to_send
        self.inter_send_gap_ns = inter_send_gap_ns
        self.source = source
        self.sent = 0
        self._stream: Optional[RandomStream] = None
        self._next_send: Optional[int] = None

    def on_start(self) -> None:
        self.generator_on_start()

    def generator_on_start(self) -> None:
        self._stream = self.sim.rng_stream(f"data/node{self.node.id}")
        if self.samples_to_send > 0:
            self._next_send = self.sim.schedule(0, self._send_next)

    def on_stop(self) -> None:
        if self._next_send is not None:
            self.sim.cancel(self._next_send)
            self._next_send = None
        if self.sent < self.samples_to_send:
            logger.debug(f"Generator on node {self.node.id} stopped after {self.sent}/{self.samples_to_send} samples")

    def _send_next(self) -> None:
        assert self._stream is not None
        self._next_send = None
        inputs, targets = self.source.sample(self._stream)
        payload = encode_sample(sample_id(self.node.id, self.sent), inputs, targets)
        self.sent += 1
        try:
            self.send(self.target_address, PacketKind.DATA_SAMPLE, payload)
        except NoRouteError as e:
            logger.warning(f"Node {self.node.id}: {e.message}")
        if self.sent < self.samples_to_send:
            self._next_send = self.sim.schedule(self.inter_send_gap_ns, self._send_next)

"""Point-to-point links with per-direction drop-tail queues."""

from collections import deque
from typing import Callable, Deque, Optional, Tuple

from ..core.engine import Simulator, round_half_up_div
from .packet import Packet

NANOSECONDS_PER_SECOND = 1_000_000_000

ArrivalCallback = Callable[[Packet, int], None]


def serialization_ns(size_bytes: int, rate_bps: int) -> int:
    """Time to put ``size_bytes`` on a ``rate_bps`` wire, rounded half up to whole ns."""
    return round_half_up_div(size_bytes * 8 * NANOSECONDS_PER_SECOND, rate_bps)


class Transmitter:
    """One direction of a link: a FIFO queue feeding a single serializer."""

    def __init__(
        self,
        sim: Simulator,
        link: "Link",
        src: int,
        dst: int,
        on_arrival: ArrivalCallback,
    ):
        self.sim = sim
        self.link = link
        self.src = src
        self.dst = dst
        self._on_arrival = on_arrival
        self._queue: Deque[Packet] = deque()
        self._in_service: Optional[Packet] = None
        self.last_departure: Optional[int] = None
        self.transmitted = 0
        self.dropped = 0

    @property
    def busy(self) -> bool:
        return self._in_service is not None

    @property
    def queued(self) -> int:
        return len(self._queue)

    def enqueue(self, packet: Packet) -> bool:
        """Accept a packet; False (drop) when the queue is full."""
        if self._in_service is None:
            self._begin(packet)
            return True
        if len(self._queue) >= self.link.queue_capacity:
            self.dropped += 1
            return False
        self._queue.append(packet)
        return True

    def _begin(self, packet: Packet) -> None:
        self._in_service = packet
        self.sim.schedule(serialization_ns(packet.size_bytes, self.link.rate_bps), self._depart)

    def _depart(self) -> None:
        packet = self._in_service
        assert packet is not None
        self.last_departure = self.sim.now
        self.transmitted += 1
        self.sim.schedule(self.link.delay_ns, self._on_arrival, packet, self.dst)
        self._in_service = None
        if self._queue:
            self._begin(self._queue.popleft())


class Link:
    """A full-duplex point-to-point channel between two distinct nodes."""

    def __init__(
        self,
        link_id: int,
        sim: Simulator,
        endpoints: Tuple[int, int],
        rate_bps: int,
        delay_ns: int,
        queue_capacity: int,
        on_arrival: ArrivalCallback,
    ):
        self.id = link_id
        self.endpoints = endpoints
        self.rate_bps = rate_bps
        self.delay_ns = delay_ns
        self.queue_capacity = queue_capacity
        a, b = endpoints
        self.forward = Transmitter(sim, self, a, b, on_arrival)
        self.reverse = Transmitter(sim, self, b, a, on_arrival)

    def __repr__(self) -> str:
        return (
            f"Link(id={self.id}, endpoints={self.endpoints}, rate_bps={self.rate_bps}, "
            f"delay_ns={self.delay_ns}, queue_capacity={self.queue_capacity})"
        )

    def transmitter_from(self, node: int) -> Transmitter:
        if node == self.endpoints[0]:
            return self.forward
        if node == self.endpoints[1]:
            return self.reverse
        raise ValueError(f"Node {node} is not an endpoint of link {self.id}")

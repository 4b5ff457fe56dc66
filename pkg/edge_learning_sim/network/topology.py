"""Network model: nodes, links, addressing, static routing and transport."""

from collections import deque
from dataclasses import dataclass
from ipaddress import IPv4Address
from typing import Dict, Iterable, List, Optional, Sequence

from ..core.engine import Simulator
from ..core.exceptions import InvalidArgumentError, NoRouteError, NotFoundError
from ..core.logging import get_logger
from ..core.trace import TraceKind
from .application import Application
from .link import Link
from .node import Device, Node
from .packet import Packet, PacketKind

logger = get_logger(__name__)

BASE_ADDRESS = IPv4Address("10.0.0.0")


@dataclass
class PacketCounters:
    sent: int = 0
    delivered: int = 0
    dropped_queue: int = 0
    dropped_no_route: int = 0
    dropped_app_stopped: int = 0

    @property
    def dropped(self) -> int:
        return self.dropped_queue + self.dropped_no_route + self.dropped_app_stopped


class Network:
    """All network state of one simulation.

    Routing is global and static: hop-count shortest paths, ties broken by the
    lowest next-hop node id. Transport is reliable except for queue drops.
    """

    def __init__(self, sim: Simulator):
        self.sim = sim
        self.nodes: List[Node] = []
        self.links: List[Link] = []
        self.counters = PacketCounters()
        self.in_flight: Dict[int, Packet] = {}
        self._by_address: Dict[IPv4Address, int] = {}
        self._next_hop: Dict[int, Dict[int, int]] = {}
        self._routes_dirty = True
        self._next_host = 1
        self._next_packet_id = 0

    # topology

    def create_nodes(self, n: int) -> List[int]:
        if n < 1:
            raise InvalidArgumentError(f"Node count must be >= 1, got {n}")
        start = len(self.nodes)
        for node_id in range(start, start + n):
            self.nodes.append(Node(node_id, self.sim))
        return list(range(start, start + n))

    def node(self, node_id: int) -> Node:
        if not 0 <= node_id < len(self.nodes):
            raise NotFoundError(f"Unknown node: {node_id}")
        return self.nodes[node_id]

    def node_by_address(self, address: IPv4Address) -> Optional[Node]:
        node_id = self._by_address.get(address)
        return self.nodes[node_id] if node_id is not None else None

    def connect_p2p(
        self,
        a: int,
        b: int,
        rate_bps: int,
        delay_ns: int,
        queue_capacity: int = 100,
    ) -> int:
        if a == b:
            raise InvalidArgumentError(f"Link endpoints must differ, got {a} twice")
        node_a, node_b = self.node(a), self.node(b)
        if int(rate_bps) <= 0:
            raise InvalidArgumentError(f"Link rate must be > 0, got {rate_bps}")
        if int(delay_ns) < 0:
            raise InvalidArgumentError(f"Link delay must be >= 0, got {delay_ns}")
        if int(queue_capacity) < 1:
            raise InvalidArgumentError(f"Queue capacity must be >= 1, got {queue_capacity}")
        link = Link(
            link_id=len(self.links),
            sim=self.sim,
            endpoints=(a, b),
            rate_bps=int(rate_bps),
            delay_ns=int(delay_ns),
            queue_capacity=int(queue_capacity),
            on_arrival=self._arrive,
        )
        self.links.append(link)
        node_a.devices.append(Device(link=link, peer=b, transmitter=link.forward))
        node_b.devices.append(Device(link=link, peer=a, transmitter=link.reverse))
        self._routes_dirty = True
        return link.id

    def install_stack(self, nodes: Optional[Iterable[int]] = None) -> List[IPv4Address]:
        """Assign 10.0.0.k addresses in creation order and compute routes."""
        targets = sorted(nodes) if nodes is not None else [n.id for n in self.nodes]
        addresses = []
        for node_id in targets:
            node = self.node(node_id)
            if node.address is None:
                node.address = BASE_ADDRESS + self._next_host
                self._next_host += 1
                self._by_address[node.address] = node.id
            addresses.append(node.address)
        self._compute_routes()
        logger.debug(f"Installed stack on {len(addresses)} nodes")
        return addresses

    def _compute_routes(self) -> None:
        self._next_hop = {}
        for dst in self.nodes:
            dist = self._hop_distances(dst.id)
            for src in self.nodes:
                if src.id == dst.id or src.id not in dist:
                    continue
                hops = [peer for peer in src.neighbors if dist.get(peer) == dist[src.id] - 1]
                self._next_hop.setdefault(src.id, {})[dst.id] = min(hops)
        self._routes_dirty = False

    def _hop_distances(self, root: int) -> Dict[int, int]:
        dist = {root: 0}
        frontier = deque([root])
        while frontier:
            current = frontier.popleft()
            for peer in self.nodes[current].neighbors:
                if peer not in dist:
                    dist[peer] = dist[current] + 1
                    frontier.append(peer)
        return dist

    def next_hop(self, src: int, dst: int) -> Optional[int]:
        if self._routes_dirty:
            self._compute_routes()
        return self._next_hop.get(src, {}).get(dst)

    def path(self, src: int, dst: int) -> List[int]:
        """Node ids along the route, both ends included; empty when unreachable."""
        hops = [src]
        while hops[-1] != dst:
            nxt = self.next_hop(hops[-1], dst)
            if nxt is None:
                return []
            hops.append(nxt)
        return hops

    # applications

    def install_application(self, node_id: int, app: Application, start_at: int, stop_at: int) -> None:
        if start_at >= stop_at:
            raise InvalidArgumentError(f"Application start ({start_at}) must precede stop ({stop_at})")
        if start_at < self.sim.now:
            raise InvalidArgumentError(f"Application start {start_at} is in the past")
        node = self.node(node_id)
        app.attach(self, node, start_at, stop_at)
        node.applications.append(app)
        self.sim.schedule_at(start_at, app._start)
        self.sim.schedule_at(stop_at, app._stop)

    # transport

    def send(self, app: Application, dst: IPv4Address, kind: PacketKind, payload: bytes) -> int:
        if not app.is_running:
            raise InvalidArgumentError(f"{app!r} cannot send while {app.state.value}")
        node = app.node
        if node.address is None:
            raise InvalidArgumentError(f"Node {node.id} has no address; install the stack first")
        packet = Packet(
            id=self._next_packet_id,
            src=node.address,
            dst=IPv4Address(dst),
            kind=PacketKind(kind),
            payload=bytes(payload),
            sent_at=self.sim.now,
        )
        self._next_packet_id += 1
        self.counters.sent += 1
        self.sim.emit(TraceKind.PACKET_SEND, node=node.id, **packet.trace_detail())

        dst_node = self.node_by_address(packet.dst)
        if dst_node is not None and dst_node.id == node.id:
            self.in_flight[packet.id] = packet
            self.sim.schedule(0, self._arrive, packet, node.id)
            return packet.id
        hop = self.next_hop(node.id, dst_node.id) if dst_node is not None else None
        if hop is None:
            self.counters.dropped_no_route += 1
            self.sim.emit(TraceKind.NO_ROUTE, node=node.id, **packet.trace_detail())
            raise NoRouteError(f"No route from {node.address} to {packet.dst}", details=f"packet {packet.id}")
        self.in_flight[packet.id] = packet
        self._transmit(node, hop, packet)
        return packet.id

    def _transmit(self, node: Node, hop: int, packet: Packet) -> None:
        device = node.device_toward(hop)
        assert device is not None
        if not device.transmitter.enqueue(packet):
            del self.in_flight[packet.id]
            self.counters.dropped_queue += 1
            self.sim.emit(
                TraceKind.PACKET_DROP,
                node=node.id,
                reason="queue_full",
                link=device.link.id,
                **packet.trace_detail(),
            )

    def _arrive(self, packet: Packet, node_id: int) -> None:
        node = self.nodes[node_id]
        if node.address != packet.dst:
            dst_node = self.node_by_address(packet.dst)
            assert dst_node is not None
            hop = self.next_hop(node_id, dst_node.id)
            assert hop is not None
            node.forwarded[packet.kind.value] += 1
            self._transmit(node, hop, packet)
            return

        del self.in_flight[packet.id]
        receivers = [app for app in node.applications if app.is_running and app.receives]
        if not receivers:
            self.counters.dropped_app_stopped += 1
            self.sim.emit(TraceKind.APP_STOPPED_DROP, node=node_id, **packet.trace_detail())
            return
        self.counters.delivered += 1
        self.sim.emit(
            TraceKind.PACKET_DELIVER,
            node=node_id,
            latency_ns=self.sim.now - packet.sent_at,
            **packet.trace_detail(),
        )
        for app in receivers:
            app._deliver(packet, self.sim.now)

    def applications(self, node_ids: Optional[Sequence[int]] = None) -> List[Application]:
        ids = node_ids if node_ids is not None else range(len(self.nodes))
        return [app for node_id in ids for app in self.node(node_id).applications]

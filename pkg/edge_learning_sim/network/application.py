"""Applications: user programs installed on nodes."""

import enum
from ipaddress import IPv4Address
from typing import TYPE_CHECKING, Callable, List, Optional

from ..core.engine import Simulator
from ..core.exceptions import InvalidArgumentError
from ..core.trace import TraceKind
from .packet import Packet, PacketKind

if TYPE_CHECKING:
    from .node import Node
    from .topology import Network

ReceiveHandler = Callable[[Packet, int], None]


class AppState(str, enum.Enum):
    INSTALLED = "INSTALLED"
    RUNNING = "RUNNING"
    STOPPED = "STOPPED"


class Application:
    """Base class for simulated applications.

    Subclasses override :meth:`on_start` / :meth:`on_stop` and register
    receive handlers with :meth:`on_receive`. Handlers only see packets that
    arrive while the application is RUNNING.
    """

    kind = "application"

    def __init__(self) -> None:
        self.state = AppState.INSTALLED
        self.start_at: Optional[int] = None
        self.stop_at: Optional[int] = None
        self._network: Optional["Network"] = None
        self._node: Optional["Node"] = None
        self._handlers: List[ReceiveHandler] = []

    def __repr__(self) -> str:
        node = self._node.id if self._node is not None else None
        return f"{type(self).__name__}(node={node}, state={self.state.value})"

    # wiring

    def attach(self, network: "Network", node: "Node", start_at: int, stop_at: int) -> None:
        if self._node is not None:
            raise InvalidArgumentError(f"{self!r} is already installed")
        self._network = network
        self._node = node
        self.start_at = start_at
        self.stop_at = stop_at

    @property
    def network(self) -> "Network":
        if self._network is None:
            raise InvalidArgumentError(f"{type(self).__name__} is not installed on a node")
        return self._network

    @property
    def node(self) -> "Node":
        if self._node is None:
            raise InvalidArgumentError(f"{type(self).__name__} is not installed on a node")
        return self._node

    @property
    def sim(self) -> Simulator:
        return self.network.sim

    @property
    def now(self) -> int:
        return self.sim.now

    @property
    def address(self) -> Optional[IPv4Address]:
        return self.node.address

    @property
    def is_running(self) -> bool:
        return self.state is AppState.RUNNING

    @property
    def receives(self) -> bool:
        return bool(self._handlers)

    # callbacks

    def on_receive(self, handler: ReceiveHandler) -> None:
        """Register a handler called with (packet, arrival time) for each delivered packet."""
        self._handlers.append(handler)

    def on_start(self) -> None:
        """Hook run when the application starts."""

    def on_stop(self) -> None:
        """Hook run when the application stops."""

    def send(self, dst: IPv4Address, kind: PacketKind, payload: bytes) -> int:
        return self.network.send(self, dst, kind, payload)

    # driven by the network

    def _start(self) -> None:
        self.state = AppState.RUNNING
        self.sim.emit(TraceKind.APP_START, node=self.node.id, app=self.kind)
        self.on_start()

    def _stop(self) -> None:
        if self.state is AppState.STOPPED:
            return
        self.state = AppState.STOPPED
        self.sim.emit(TraceKind.APP_STOP, node=self.node.id, app=self.kind)
        self.on_stop()

    def _deliver(self, packet: Packet, arrival: int) -> None:
        for handler in list(self._handlers):
            handler(packet, arrival)

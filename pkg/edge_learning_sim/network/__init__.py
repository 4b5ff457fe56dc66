"""Network simulation on top of the event engine."""

from .application import Application, AppState
from .link import Link, Transmitter, serialization_ns
from .node import Device, Node
from .packet import HEADER_BYTES, Packet, PacketKind
from .topology import Network, PacketCounters

__all__ = [
    "Application",
    "AppState",
    "Device",
    "HEADER_BYTES",
    "Link",
    "Network",
    "Node",
    "Packet",
    "PacketCounters",
    "PacketKind",
    "Transmitter",
    "serialization_ns",
]

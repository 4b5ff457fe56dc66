"""Packets carried across point-to-point links."""

import enum
from dataclasses import dataclass
from ipaddress import IPv4Address

# Fixed per-packet overhead standing in for TCP/IP headers
HEADER_BYTES = 40


class PacketKind(str, enum.Enum):
    DATA_SAMPLE = "DATA_SAMPLE"
    DATA_REQUEST = "DATA_REQUEST"
    MODEL_RESULT = "MODEL_RESULT"
    CONTROL = "CONTROL"


@dataclass(frozen=True)
class Packet:
    id: int
    src: IPv4Address
    dst: IPv4Address
    kind: PacketKind
    payload: bytes
    sent_at: int

    @property
    def size_bytes(self) -> int:
        return len(self.payload) + HEADER_BYTES

    def trace_detail(self) -> dict:
        return {
            "packet": self.id,
            "kind": self.kind.value,
            "src": str(self.src),
            "dst": str(self.dst),
            "size": self.size_bytes,
        }

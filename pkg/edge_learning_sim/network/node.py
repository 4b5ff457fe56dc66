"""Simulation nodes and their member cache."""

from collections import Counter
from dataclasses import dataclass
from ipaddress import IPv4Address
from typing import TYPE_CHECKING, List, Optional, Union

from ..cache.lru import MISS, CacheMiss, LruCache, PutResult, PutStatus
from ..core.engine import Simulator
from ..core.trace import TraceKind

if TYPE_CHECKING:
    from .application import Application
    from .link import Link, Transmitter


@dataclass(frozen=True)
class Device:
    """A node's endpoint on a link: the transmitter toward ``peer``."""

    link: "Link"
    peer: int
    transmitter: "Transmitter"


class Node:
    """The basic connected entity: holds devices, applications and a cache."""

    def __init__(self, node_id: int, sim: Simulator):
        self.id = node_id
        self.sim = sim
        self.address: Optional[IPv4Address] = None
        self.devices: List[Device] = []
        self.applications: List["Application"] = []
        self.cache: Optional[LruCache[bytes]] = None
        self.forwarded: Counter = Counter()

    def __repr__(self) -> str:
        return f"Node(id={self.id}, address={self.address})"

    def enable_cache(self, capacity: int) -> LruCache[bytes]:
        self.cache = LruCache(capacity)
        return self.cache

    def device_toward(self, peer: int) -> Optional[Device]:
        for device in self.devices:
            if device.peer == peer:
                return device
        return None

    @property
    def neighbors(self) -> List[int]:
        return sorted({device.peer for device in self.devices})

    # Traced cache access. The cache itself stays a plain data structure.

    def cache_put(self, key: int, value: bytes) -> PutResult:
        cache = self._require_cache()
        result = cache.put(key, value)
        if result.evicted_key is not None:
            self.sim.emit(TraceKind.CACHE_EVICT, node=self.id, key=result.evicted_key)
        self.sim.emit(
            TraceKind.CACHE_PUT,
            node=self.id,
            key=key,
            result=result.status.value,
            len=len(cache),
        )
        return result

    def cache_get(self, key: int) -> Union[bytes, CacheMiss]:
        cache = self._require_cache()
        value = cache.get(key)
        if value is MISS:
            self.sim.emit(TraceKind.CACHE_MISS, node=self.id, key=key, value=int(MISS))
        else:
            self.sim.emit(TraceKind.CACHE_HIT, node=self.id, key=key)
        return value

    def _require_cache(self) -> LruCache[bytes]:
        if self.cache is None:
            raise RuntimeError(f"Caching is not enabled on node {self.id}")
        return self.cache


__all__ = ["Device", "Node", "PutStatus"]

"""Bounded least-recently-used cache keyed by data-unit id.

Entries are ordered from most recently used (head) to least recently used
(tail). Inserting into a full cache evicts the tail; a hit moves the entry to
the head.
"""

import enum
from collections import OrderedDict
from dataclasses import dataclass
from typing import Generic, Iterator, List, Optional, Tuple, TypeVar, Union

from ..core.exceptions import InvalidArgumentError

V = TypeVar("V")


class CacheMiss(enum.Enum):
    """Typed miss indicator, rendered as -1 in traces."""

    MISS = -1

    def __int__(self) -> int:
        return self.value

    def __repr__(self) -> str:
        return "MISS"


MISS = CacheMiss.MISS


class PutStatus(str, enum.Enum):
    INSERTED = "inserted"
    UPDATED = "updated"
    INSERTED_WITH_EVICTION = "inserted_with_eviction"


@dataclass(frozen=True)
class PutResult:
    status: PutStatus
    evicted_key: Optional[int] = None


class LruCache(Generic[V]):
    """LRU cache of at most ``capacity`` entries."""

    def __init__(self, capacity: int):
        if capacity < 1:
            raise InvalidArgumentError(f"Cache capacity must be >= 1, got {capacity}")
        self.capacity = capacity
        # OrderedDict tail is the MRU end; head of the logical list.
        self._entries: "OrderedDict[int, V]" = OrderedDict()
        self.hits = 0
        self.misses = 0
        self.evictions = 0

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, key: object) -> bool:
        return key in self._entries

    def __repr__(self) -> str:
        return f"LruCache(capacity={self.capacity}, len={len(self)})"

    def put(self, key: int, value: V) -> PutResult:
        if key in self._entries:
            self._entries[key] = value
            self._entries.move_to_end(key)
            return PutResult(PutStatus.UPDATED)
        evicted: Optional[int] = None
        if len(self._entries) >= self.capacity:
            evicted, _ = self._entries.popitem(last=False)
            self.evictions += 1
        self._entries[key] = value
        if evicted is not None:
            return PutResult(PutStatus.INSERTED_WITH_EVICTION, evicted)
        return PutResult(PutStatus.INSERTED)

    def get(self, key: int) -> Union[V, CacheMiss]:
        if key not in self._entries:
            self.misses += 1
            return MISS
        self._entries.move_to_end(key)
        self.hits += 1
        return self._entries[key]

    def contains(self, key: int) -> bool:
        """Membership test that leaves recency untouched."""
        return key in self._entries

    def peek(self, key: int) -> Union[V, CacheMiss]:
        """Read without promoting and without touching the hit/miss counters."""
        return self._entries.get(key, MISS)

    def remove(self, key: int) -> bool:
        return self._entries.pop(key, MISS) is not MISS

    def clear(self) -> None:
        self._entries.clear()

    def keys_mru(self) -> List[int]:
        """Keys from head (most recent) to tail."""
        return list(reversed(self._entries))

    def keys_lru(self) -> List[int]:
        """Keys from tail (least recent) to head."""
        return list(self._entries)

    def items_mru(self) -> Iterator[Tuple[int, V]]:
        for key in reversed(self._entries):
            yield key, self._entries[key]

    @property
    def head(self) -> Optional[int]:
        return next(reversed(self._entries), None)

    @property
    def tail(self) -> Optional[int]:
        return next(iter(self._entries), None)

"""Per-node LRU caching."""

from .lru import MISS, CacheMiss, LruCache, PutResult, PutStatus

__all__ = ["MISS", "CacheMiss", "LruCache", "PutResult", "PutStatus"]

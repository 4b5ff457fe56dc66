"""Versioned binary serialization of networks.

Layout (little-endian)::

    b"ELSM" | u16 version | u32 header length | header JSON | float64 values

The JSON header lists, per layer, its kind, its config and the shapes of its
arrays; the values of all arrays follow in layer order, each row-major.
"""

import hashlib
import json
import struct
from typing import Any, Dict, List

import numpy as np

from ..core.exceptions import EdgeSimError, PayloadError
from .layers import Layer
from .network import NeuralNetwork

MAGIC = b"ELSM"
FORMAT_VERSION = 1
_PREFIX = struct.Struct("<4sHI")


def serialize_network(net: NeuralNetwork) -> bytes:
    header: Dict[str, Any] = {"layers": []}
    chunks: List[bytes] = []
    for layer in net.layers:
        arrays = layer.state()
        header["layers"].append(
            {
                "kind": layer.kind,
                "config": layer.config(),
                "arrays": [list(a.shape) for a in arrays],
            }
        )
        chunks.extend(np.ascontiguousarray(a, dtype="<f8").tobytes() for a in arrays)
    header_bytes = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    return _PREFIX.pack(MAGIC, FORMAT_VERSION, len(header_bytes)) + header_bytes + b"".join(chunks)


def deserialize_network(data: bytes) -> NeuralNetwork:
    try:
        magic, version, header_len = _PREFIX.unpack_from(data, 0)
    except struct.error as e:
        raise PayloadError("Model payload too short") from e
    if magic != MAGIC:
        raise PayloadError("Not a serialized network", details=repr(magic))
    if version != FORMAT_VERSION:
        raise PayloadError(f"Unsupported model format version {version}")
    offset = _PREFIX.size
    try:
        header = json.loads(data[offset : offset + header_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise PayloadError("Corrupt model header") from e
    offset += header_len

    layers: List[Layer] = []
    for entry in header["layers"]:
        cls = Layer.registry.get(entry["kind"])
        if cls is None:
            raise PayloadError(f"Unknown layer kind: {entry['kind']}")
        arrays = []
        for shape in entry["arrays"]:
            count = int(np.prod(shape, dtype=np.int64))
            end = offset + 8 * count
            if end > len(data):
                raise PayloadError("Model payload truncated")
            arrays.append(np.frombuffer(data[offset:end], dtype="<f8").astype(np.float64).reshape(shape))
            offset = end
        try:
            layers.append(cls.from_config(entry["config"], arrays))
        except (KeyError, TypeError, ValueError, EdgeSimError) as e:
            raise PayloadError(f"Invalid {entry['kind']} layer in model payload", details=str(e)) from e
    if offset != len(data):
        raise PayloadError(f"{len(data) - offset} trailing bytes after model")
    try:
        return NeuralNetwork(layers)
    except EdgeSimError as e:
        raise PayloadError("Model payload describes an inconsistent network", details=str(e)) from e


def parameters_digest(net: NeuralNetwork) -> str:
    """SHA-256 of the serialized network, identical for identical parameters."""
    return hashlib.sha256(serialize_network(net)).hexdigest()

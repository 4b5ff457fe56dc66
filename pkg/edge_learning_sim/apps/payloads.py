"""Wire codecs for application payloads.

All integers and floats are little-endian.

DATA_SAMPLE::

    u64 sample id | u32 feature count | u32 target count | f64 values...

DATA_REQUEST::

    u32 requested count

CONTROL::

    u8 code | u32 value

MODEL_RESULT::

    u32 summary length | summary JSON | serialized network
"""

import enum
import json
import struct
from dataclasses import dataclass
from typing import Any, Dict, Tuple

import numpy as np

from ..core.exceptions import PayloadError
from ..learning.network import NeuralNetwork
from ..learning.serialization import deserialize_network, serialize_network
from ..learning.tensor import Tensor

_SAMPLE_HEADER = struct.Struct("<QII")
_REQUEST = struct.Struct("<I")
_CONTROL = struct.Struct("<BI")
_RESULT_HEADER = struct.Struct("<I")


@dataclass(frozen=True)
class Sample:
    sample_id: int
    inputs: Tensor
    targets: Tensor


def encode_sample(sample_id: int, inputs: Tensor, targets: Tensor) -> bytes:
    inputs = np.asarray(inputs, dtype="<f8").ravel()
    targets = np.asarray(targets, dtype="<f8").ravel()
    header = _SAMPLE_HEADER.pack(sample_id, inputs.size, targets.size)
    return header + inputs.tobytes() + targets.tobytes()


def decode_sample(payload: bytes) -> Sample:
    if len(payload) < _SAMPLE_HEADER.size:
        raise PayloadError(f"DATA_SAMPLE payload too short ({len(payload)} bytes)")
    sample_id, n_inputs, n_targets = _SAMPLE_HEADER.unpack_from(payload, 0)
    expected = _SAMPLE_HEADER.size + 8 * (n_inputs + n_targets)
    if len(payload) != expected:
        raise PayloadError(
            f"DATA_SAMPLE payload is {len(payload)} bytes, header announces {expected}",
            details=f"sample {sample_id}",
        )
    if n_inputs == 0 or n_targets == 0:
        raise PayloadError("DATA_SAMPLE needs at least one feature and one target")
    values = np.frombuffer(payload, dtype="<f8", offset=_SAMPLE_HEADER.size).astype(np.float64)
    return Sample(sample_id, values[:n_inputs], values[n_inputs:])


def encode_request(count: int) -> bytes:
    return _REQUEST.pack(count)


def decode_request(payload: bytes) -> int:
    if len(payload) != _REQUEST.size:
        raise PayloadError(f"DATA_REQUEST payload must be {_REQUEST.size} bytes, got {len(payload)}")
    return _REQUEST.unpack(payload)[0]


class ControlCode(enum.IntEnum):
    REPLY_END = 1


def encode_control(code: ControlCode, value: int = 0) -> bytes:
    return _CONTROL.pack(int(code), value)


def decode_control(payload: bytes) -> Tuple[ControlCode, int]:
    if len(payload) != _CONTROL.size:
        raise PayloadError(f"CONTROL payload must be {_CONTROL.size} bytes, got {len(payload)}")
    code, value = _CONTROL.unpack(payload)
    try:
        return ControlCode(code), value
    except ValueError as e:
        raise PayloadError(f"Unknown control code {code}") from e


def encode_model_result(net: NeuralNetwork, summary: Dict[str, Any]) -> bytes:
    summary_bytes = json.dumps(summary, sort_keys=True, separators=(",", ":")).encode("utf-8")
    return _RESULT_HEADER.pack(len(summary_bytes)) + summary_bytes + serialize_network(net)


def decode_model_result(payload: bytes) -> Tuple[Dict[str, Any], NeuralNetwork]:
    if len(payload) < _RESULT_HEADER.size:
        raise PayloadError("MODEL_RESULT payload too short")
    (length,) = _RESULT_HEADER.unpack_from(payload, 0)
    start = _RESULT_HEADER.size
    if start + length > len(payload):
        raise PayloadError(f"MODEL_RESULT summary length {length} exceeds payload")
    try:
        summary = json.loads(payload[start : start + length].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise PayloadError("Corrupt MODEL_RESULT summary") from e
    if not isinstance(summary, dict):
        raise PayloadError("MODEL_RESULT summary must be a JSON object")
    return summary, deserialize_network(payload[start + length :])

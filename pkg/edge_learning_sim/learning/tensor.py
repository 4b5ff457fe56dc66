"""Tensors are float64, C-ordered ``numpy.ndarray`` objects."""

from typing import Any, Optional, Sequence, Tuple

import numpy as np
import numpy.typing as npt

from ..core.exceptions import ShapeError

Tensor = npt.NDArray[np.float64]
Shape = Tuple[int, ...]


def as_tensor(data: Any, shape: Optional[Sequence[int]] = None) -> Tensor:
    """Convert ``data`` to a float64 tensor, optionally reshaped to ``shape``."""
    array = np.ascontiguousarray(data, dtype=np.float64)
    if shape is not None:
        shape = tuple(int(d) for d in shape)
        if any(d < 1 for d in shape):
            raise ShapeError(f"Tensor dimensions must be >= 1, got {shape}")
        if int(np.prod(shape)) != array.size:
            raise ShapeError(f"Cannot view {array.size} values as shape {shape}")
        array = array.reshape(shape)
    if array.ndim == 0 or any(d < 1 for d in array.shape):
        raise ShapeError(f"Tensor dimensions must be >= 1, got {array.shape}")
    return array


def volume(shape: Sequence[int]) -> int:
    return int(np.prod(tuple(shape), dtype=np.int64))

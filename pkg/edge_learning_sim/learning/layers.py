"""Layer set of the deep-learning kernel.

Every layer maps a batch ``(N, *input_shape)`` to ``(N, *output_shape)``.
``forward`` keeps what ``backward`` needs; ``backward`` takes the gradient of
the loss with respect to the layer output and returns the gradient with
respect to its input, leaving parameter gradients in ``grads``.
"""

import math
from abc import ABC, abstractmethod
from typing import Any, ClassVar, Dict, List, Optional, Sequence, Tuple, Type

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..core.exceptions import InvalidArgumentError, ShapeError
from ..core.rng import RandomStream
from .tensor import Shape, Tensor, as_tensor, volume

ACTIVATIONS = ("linear", "logistic", "tanh", "relu")


class Layer(ABC):
    """Base class for layers."""

    kind: ClassVar[str]
    registry: ClassVar[Dict[str, Type["Layer"]]] = {}

    input_shape: Shape
    output_shape: Shape

    def __init_subclass__(cls, **kwargs: Any) -> None:
        super().__init_subclass__(**kwargs)
        if "kind" in cls.__dict__:
            Layer.registry[cls.kind] = cls

    def __init__(self) -> None:
        self.name = self.kind
        self.grads: List[Tensor] = []

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.input_shape} -> {self.output_shape})"

    @abstractmethod
    def forward(self, x: Tensor) -> Tensor:
        ...

    @abstractmethod
    def backward(self, grad: Tensor) -> Tensor:
        ...

    def parameters(self) -> List[Tensor]:
        """Trainable arrays, updated in place by optimizers."""
        return []

    def state(self) -> List[Tensor]:
        """Every array needed to rebuild the layer, trainable or not."""
        return self.parameters()

    def config(self) -> Dict[str, Any]:
        """JSON-able constructor arguments, excluding arrays."""
        return {}

    @classmethod
    def from_config(cls, config: Dict[str, Any], arrays: Sequence[Tensor]) -> "Layer":
        raise NotImplementedError

    def initialize(self, stream: RandomStream) -> None:
        """Draw initial parameters; layers without parameters do nothing."""

    def _check_input(self, x: Tensor) -> Tensor:
        if x.shape[1:] != self.input_shape:
            if x.ndim >= 2 and volume(x.shape[1:]) == volume(self.input_shape):
                return x.reshape((x.shape[0],) + self.input_shape)
            raise ShapeError(
                f"expected input {self.input_shape}, got {x.shape[1:]}",
                layer=self.name,
            )
        return x


def _glorot_limit(fan_in: int, fan_out: int) -> float:
    return math.sqrt(6.0 / (fan_in + fan_out))


def _uniform(stream: RandomStream, limit: float, shape: Shape) -> Tensor:
    return np.array(stream.uniform_array(-limit, limit, volume(shape)), dtype=np.float64).reshape(shape)


def _activate(name: str, z: Tensor) -> Tensor:
    if name == "linear":
        return z
    if name == "logistic":
        return 0.5 * (1.0 + np.tanh(0.5 * z))
    if name == "tanh":
        return np.tanh(z)
    if name == "relu":
        return np.maximum(z, 0.0)
    raise InvalidArgumentError(f"Unknown activation: {name}")


def _activation_derivative(name: str, z: Tensor, y: Tensor) -> Tensor:
    if name == "linear":
        return np.ones_like(z)
    if name == "logistic":
        return y * (1.0 - y)
    if name == "tanh":
        return 1.0 - y * y
    if name == "relu":
        return (z > 0.0).astype(np.float64)
    raise InvalidArgumentError(f"Unknown activation: {name}")


class Dense(Layer):
    """Perceptron layer: ``activation(x @ W.T + b)`` with W of shape (out, in)."""

    kind = "dense"

    def __init__(
        self,
        in_features: int,
        out_features: int,
        activation: str = "linear",
        weights: Optional[Tensor] = None,
        bias: Optional[Tensor] = None,
    ):
        super().__init__()
        if in_features < 1 or out_features < 1:
            raise InvalidArgumentError(f"Dense sizes must be >= 1, got {in_features}->{out_features}")
        if activation not in ACTIVATIONS:
            raise InvalidArgumentError(f"Unknown activation: {activation}")
        self.activation = activation
        self.input_shape = (in_features,)
        self.output_shape = (out_features,)
        self.weights = (
            as_tensor(weights, (out_features, in_features)).copy()
            if weights is not None
            else np.zeros((out_features, in_features))
        )
        self.bias = as_tensor(bias, (out_features,)).copy() if bias is not None else np.zeros(out_features)
        if self.weights.shape[0] != self.bias.shape[0]:
            raise ShapeError("weight rows and bias length differ", layer=self.name)
        self._x: Optional[Tensor] = None
        self._z: Optional[Tensor] = None
        self._y: Optional[Tensor] = None

    @property
    def in_features(self) -> int:
        return self.input_shape[0]

    @property
    def out_features(self) -> int:
        return self.output_shape[0]

    def forward(self, x: Tensor) -> Tensor:
        x = self._check_input(x)
        z = x @ self.weights.T + self.bias
        y = _activate(self.activation, z)
        self._x, self._z, self._y = x, z, y
        return y

    def backward(self, grad: Tensor) -> Tensor:
        assert self._x is not None and self._z is not None and self._y is not None
        delta = grad * _activation_derivative(self.activation, self._z, self._y)
        self.grads = [delta.T @ self._x, delta.sum(axis=0)]
        return delta @ self.weights

    def parameters(self) -> List[Tensor]:
        return [self.weights, self.bias]

    def config(self) -> Dict[str, Any]:
        return {
            "in_features": self.in_features,
            "out_features": self.out_features,
            "activation": self.activation,
        }

    @classmethod
    def from_config(cls, config: Dict[str, Any], arrays: Sequence[Tensor]) -> "Dense":
        weights, bias = arrays
        return cls(weights=weights, bias=bias, **config)

    def initialize(self, stream: RandomStream) -> None:
        limit = _glorot_limit(self.in_features, self.out_features)
        self.weights[...] = _uniform(stream, limit, self.weights.shape)
        self.bias[...] = 0.0


class _AffinePerFeature(Layer):
    """Shared plumbing for layers holding one pair of per-feature vectors."""

    def __init__(self, first: Tensor, second: Tensor):
        super().__init__()
        first = as_tensor(first).reshape(-1)
        second = as_tensor(second).reshape(-1)
        if first.shape != second.shape:
            raise ShapeError(f"per-feature vectors differ: {first.shape} vs {second.shape}", layer=self.kind)
        self.input_shape = self.output_shape = first.shape
        self._first = first.copy()
        self._second = second.copy()

    def state(self) -> List[Tensor]:
        return [self._first, self._second]

    def config(self) -> Dict[str, Any]:
        return {}

    @classmethod
    def from_config(cls, config: Dict[str, Any], arrays: Sequence[Tensor]) -> "Layer":
        return cls(*arrays)


class Scaling(_AffinePerFeature):
    """``(x - mean) / std`` per feature."""

    kind = "scaling"

    def __init__(self, mean: Tensor, std: Tensor):
        super().__init__(mean, std)
        if np.any(self._second <= 0):
            raise InvalidArgumentError("Scaling std must be > 0 for every feature")

    @property
    def mean(self) -> Tensor:
        return self._first

    @property
    def std(self) -> Tensor:
        return self._second

    def forward(self, x: Tensor) -> Tensor:
        x = self._check_input(x)
        return (x - self.mean) / self.std

    def backward(self, grad: Tensor) -> Tensor:
        self.grads = []
        return grad / self.std


class Unscaling(_AffinePerFeature):
    """``x * std + mean`` per feature; inverse of :class:`Scaling`."""

    kind = "unscaling"

    def __init__(self, mean: Tensor, std: Tensor):
        super().__init__(mean, std)
        if np.any(self._second <= 0):
            raise InvalidArgumentError("Unscaling std must be > 0 for every feature")

    @property
    def mean(self) -> Tensor:
        return self._first

    @property
    def std(self) -> Tensor:
        return self._second

    def forward(self, x: Tensor) -> Tensor:
        x = self._check_input(x)
        return x * self.std + self.mean

    def backward(self, grad: Tensor) -> Tensor:
        self.grads = []
        return grad * self.std


class Bounding(_AffinePerFeature):
    """Clamp each feature into ``[lower, upper]``."""

    kind = "bounding"

    def __init__(self, lower: Tensor, upper: Tensor):
        super().__init__(lower, upper)
        if np.any(self._first > self._second):
            raise InvalidArgumentError("Bounding lower must be <= upper for every feature")
        self._inside: Optional[Tensor] = None

    @property
    def lower(self) -> Tensor:
        return self._first

    @property
    def upper(self) -> Tensor:
        return self._second

    def forward(self, x: Tensor) -> Tensor:
        x = self._check_input(x)
        self._inside = ((x >= self.lower) & (x <= self.upper)).astype(np.float64)
        return np.clip(x, self.lower, self.upper)

    def backward(self, grad: Tensor) -> Tensor:
        assert self._inside is not None
        self.grads = []
        return grad * self._inside


class Probabilistic(Layer):
    """Softmax over the feature axis."""

    kind = "probabilistic"

    def __init__(self, size: int):
        super().__init__()
        if size < 1:
            raise InvalidArgumentError(f"Probabilistic size must be >= 1, got {size}")
        self.input_shape = self.output_shape = (size,)
        self._y: Optional[Tensor] = None

    def forward(self, x: Tensor) -> Tensor:
        x = self._check_input(x)
        shifted = x - x.max(axis=1, keepdims=True)
        e = np.exp(shifted)
        y = e / e.sum(axis=1, keepdims=True)
        self._y = y
        return y

    def backward(self, grad: Tensor) -> Tensor:
        assert self._y is not None
        self.grads = []
        y = self._y
        return y * (grad - (grad * y).sum(axis=1, keepdims=True))

    def config(self) -> Dict[str, Any]:
        return {"size": self.input_shape[0]}

    @classmethod
    def from_config(cls, config: Dict[str, Any], arrays: Sequence[Tensor]) -> "Probabilistic":
        return cls(**config)


def _window_output(size: int, window: int, stride: int) -> int:
    return (size - window) // stride + 1 if size >= window else 0


class Conv2d(Layer):
    """Valid-padding 2-D convolution over ``(channels, height, width)`` inputs."""

    kind = "conv2d"

    def __init__(
        self,
        input_shape: Sequence[int],
        out_channels: int,
        kernel_size: Sequence[int],
        stride: int = 1,
        kernels: Optional[Tensor] = None,
        bias: Optional[Tensor] = None,
    ):
        super().__init__()
        in_channels, height, width = (int(d) for d in input_shape)
        kh, kw = (int(k) for k in kernel_size)
        if stride < 1 or out_channels < 1 or kh < 1 or kw < 1:
            raise InvalidArgumentError("Conv2d channels, kernel and stride must be >= 1")
        out_h, out_w = _window_output(height, kh, stride), _window_output(width, kw, stride)
        if out_h < 1 or out_w < 1:
            raise InvalidArgumentError(
                f"Conv2d {kh}x{kw}/{stride} does not fit a {height}x{width} input"
            )
        self.stride = int(stride)
        self.input_shape = (in_channels, height, width)
        self.output_shape = (int(out_channels), out_h, out_w)
        kshape = (int(out_channels), in_channels, kh, kw)
        self.kernels = as_tensor(kernels, kshape).copy() if kernels is not None else np.zeros(kshape)
        self.bias = as_tensor(bias, (out_channels,)).copy() if bias is not None else np.zeros(out_channels)
        self._windows: Optional[Tensor] = None

    @property
    def kernel_size(self) -> Tuple[int, int]:
        return self.kernels.shape[2], self.kernels.shape[3]

    def _patches(self, x: Tensor) -> Tensor:
        kh, kw = self.kernel_size
        s = self.stride
        out_h, out_w = self.output_shape[1:]
        windows = sliding_window_view(x, (kh, kw), axis=(2, 3))
        return windows[:, :, : s * (out_h - 1) + 1 : s, : s * (out_w - 1) + 1 : s]

    def forward(self, x: Tensor) -> Tensor:
        x = self._check_input(x)
        windows = self._patches(x)  # N, C, Ho, Wo, kh, kw
        self._windows = windows
        y = np.einsum("nchwij,ocij->nohw", windows, self.kernels, optimize=True)
        return y + self.bias[None, :, None, None]

    def backward(self, grad: Tensor) -> Tensor:
        assert self._windows is not None
        grad = grad.reshape((grad.shape[0],) + self.output_shape)
        d_kernels = np.einsum("nohw,nchwij->ocij", grad, self._windows, optimize=True)
        d_bias = grad.sum(axis=(0, 2, 3))
        self.grads = [d_kernels, d_bias]

        kh, kw = self.kernel_size
        s = self.stride
        out_h, out_w = self.output_shape[1:]
        dx = np.zeros((grad.shape[0],) + self.input_shape)
        for i in range(kh):
            for j in range(kw):
                contribution = np.einsum("nohw,oc->nchw", grad, self.kernels[:, :, i, j])
                dx[:, :, i : i + s * (out_h - 1) + 1 : s, j : j + s * (out_w - 1) + 1 : s] += contribution
        return dx

    def parameters(self) -> List[Tensor]:
        return [self.kernels, self.bias]

    def config(self) -> Dict[str, Any]:
        return {
            "input_shape": list(self.input_shape),
            "out_channels": self.output_shape[0],
            "kernel_size": list(self.kernel_size),
            "stride": self.stride,
        }

    @classmethod
    def from_config(cls, config: Dict[str, Any], arrays: Sequence[Tensor]) -> "Conv2d":
        kernels, bias = arrays
        return cls(kernels=kernels, bias=bias, **config)

    def initialize(self, stream: RandomStream) -> None:
        out_c, in_c, kh, kw = self.kernels.shape
        limit = _glorot_limit(in_c * kh * kw, out_c * kh * kw)
        self.kernels[...] = _uniform(stream, limit, self.kernels.shape)
        self.bias[...] = 0.0


class Pooling(Layer):
    """Max or average pooling with a square window.

    Max-pool gradients go to the first maximum of each window in row-major order.
    """

    kind = "pooling"

    def __init__(self, input_shape: Sequence[int], window: int = 2, stride: int = 2, mode: str = "max"):
        super().__init__()
        if mode not in ("max", "average"):
            raise InvalidArgumentError(f"Unknown pooling mode: {mode}")
        if window < 1 or stride < 1:
            raise InvalidArgumentError("Pooling window and stride must be >= 1")
        channels, height, width = (int(d) for d in input_shape)
        out_h, out_w = _window_output(height, window, stride), _window_output(width, window, stride)
        if out_h < 1 or out_w < 1:
            raise InvalidArgumentError(f"Pooling {window}/{stride} does not fit a {height}x{width} input")
        self.mode = mode
        self.window = int(window)
        self.stride = int(stride)
        self.input_shape = (channels, height, width)
        self.output_shape = (channels, out_h, out_w)
        self._argmax: Optional[Tensor] = None
        self._batch = 0

    def forward(self, x: Tensor) -> Tensor:
        x = self._check_input(x)
        k, s = self.window, self.stride
        out_h, out_w = self.output_shape[1:]
        windows = sliding_window_view(x, (k, k), axis=(2, 3))
        windows = windows[:, :, : s * (out_h - 1) + 1 : s, : s * (out_w - 1) + 1 : s]
        flat = windows.reshape(windows.shape[:4] + (k * k,))
        self._batch = x.shape[0]
        if self.mode == "max":
            self._argmax = flat.argmax(axis=-1)
            return flat.max(axis=-1)
        return flat.mean(axis=-1)

    def backward(self, grad: Tensor) -> Tensor:
        self.grads = []
        grad = grad.reshape((grad.shape[0],) + self.output_shape)
        k, s = self.window, self.stride
        out_h, out_w = self.output_shape[1:]
        dx = np.zeros((grad.shape[0],) + self.input_shape)
        for i in range(k):
            for j in range(k):
                if self.mode == "max":
                    assert self._argmax is not None
                    share = grad * (self._argmax == i * k + j)
                else:
                    share = grad / (k * k)
                dx[:, :, i : i + s * (out_h - 1) + 1 : s, j : j + s * (out_w - 1) + 1 : s] += share
        return dx

    def config(self) -> Dict[str, Any]:
        return {
            "input_shape": list(self.input_shape),
            "window": self.window,
            "stride": self.stride,
            "mode": self.mode,
        }

    @classmethod
    def from_config(cls, config: Dict[str, Any], arrays: Sequence[Tensor]) -> "Pooling":
        return cls(**config)

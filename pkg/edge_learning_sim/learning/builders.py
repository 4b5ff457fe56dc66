"""Network specifications and builders (MLP, LeNet)."""

from typing import List, Literal, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

from ..core.exceptions import InvalidArgumentError
from ..core.rng import RandomStream
from .layers import ACTIVATIONS, Conv2d, Dense, Layer, Pooling, Probabilistic, Scaling
from .network import NeuralNetwork
from .tensor import Tensor

LENET_KERNEL = 5
LENET_POOL = 2


def _check_activation(value: str) -> str:
    if value not in ACTIVATIONS:
        raise ValueError(f"activation must be one of {', '.join(ACTIVATIONS)}")
    return value


class NetworkSpec(BaseModel):
    """Declarative description of a network, built on demand."""

    architecture: Literal["mlp", "lenet"] = "mlp"
    inputs: int = Field(default=2, ge=1)
    outputs: int = Field(default=2, ge=1)
    hidden: List[int] = Field(default_factory=lambda: [8])
    hidden_activation: str = "tanh"
    output_activation: str = "linear"
    probabilistic: bool = True
    scaling: bool = True
    image_height: Optional[int] = Field(default=None, ge=1)
    image_width: Optional[int] = Field(default=None, ge=1)
    channels: int = Field(default=1, ge=1)

    @field_validator("hidden_activation", "output_activation")
    @classmethod
    def validate_activation(cls, v: str) -> str:
        return _check_activation(v)

    @field_validator("hidden")
    @classmethod
    def validate_hidden(cls, v: List[int]) -> List[int]:
        if any(width < 1 for width in v):
            raise ValueError("hidden widths must be >= 1")
        return v

    @model_validator(mode="after")
    def validate_image(self) -> "NetworkSpec":
        if self.architecture == "lenet":
            if self.image_height is None or self.image_width is None:
                raise ValueError("lenet needs image_height and image_width")
            expected = self.image_height * self.image_width * self.channels
            if self.inputs != expected:
                raise ValueError(f"lenet inputs must equal height*width*channels = {expected}")
        return self

    def build(
        self,
        stream: Optional[RandomStream] = None,
        mean: Optional[Tensor] = None,
        std: Optional[Tensor] = None,
    ) -> NeuralNetwork:
        if self.architecture == "lenet":
            assert self.image_height is not None and self.image_width is not None
            return build_lenet(
                self.image_height,
                self.image_width,
                self.channels,
                self.outputs,
                stream=stream,
                mean=mean,
                std=std,
            )
        return build_mlp(
            self.inputs,
            self.hidden,
            self.outputs,
            hidden_activation=self.hidden_activation,
            output_activation=self.output_activation,
            probabilistic=self.probabilistic,
            scaling=(mean, std) if self.scaling else None,
            stream=stream,
        )


def _scaling_layer(size: int, mean: Optional[Tensor], std: Optional[Tensor]) -> Scaling:
    mean = np.zeros(size) if mean is None else np.asarray(mean, dtype=np.float64)
    std = np.ones(size) if std is None else np.asarray(std, dtype=np.float64)
    return Scaling(mean, std)


def build_mlp(
    inputs: int,
    hidden: Sequence[int],
    outputs: int,
    hidden_activation: str = "tanh",
    output_activation: str = "linear",
    probabilistic: bool = False,
    scaling: Optional[Tuple[Optional[Tensor], Optional[Tensor]]] = None,
    stream: Optional[RandomStream] = None,
) -> NeuralNetwork:
    """[Scaling] -> Dense(hidden...) -> Dense(outputs) -> [Probabilistic]."""
    layers: List[Layer] = []
    if scaling is not None:
        layers.append(_scaling_layer(inputs, *scaling))
    width = inputs
    for size in hidden:
        layers.append(Dense(width, size, hidden_activation))
        width = size
    layers.append(Dense(width, outputs, output_activation))
    if probabilistic:
        layers.append(Probabilistic(outputs))
    net = NeuralNetwork(layers)
    if stream is not None:
        net.initialize(stream)
    return net


def lenet_stage_sizes(height: int, width: int) -> List[Tuple[str, int, int]]:
    """Spatial size after each LeNet stage; raises naming the first stage that does not fit."""
    stages = []
    h, w = height, width
    for stage, window, stride in (
        ("conv1", LENET_KERNEL, 1),
        ("pool1", LENET_POOL, LENET_POOL),
        ("conv2", LENET_KERNEL, 1),
        ("pool2", LENET_POOL, LENET_POOL),
    ):
        if h < window or w < window:
            raise InvalidArgumentError(
                f"LeNet input {height}x{width} is too small at stage {stage}",
                details=f"{stage} needs at least {window}x{window}, has {h}x{w}",
            )
        h, w = (h - window) // stride + 1, (w - window) // stride + 1
        stages.append((stage, h, w))
    return stages


def build_lenet(
    height: int,
    width: int,
    channels: int = 1,
    classes: int = 10,
    stream: Optional[RandomStream] = None,
    mean: Optional[Tensor] = None,
    std: Optional[Tensor] = None,
) -> NeuralNetwork:
    """LeNet-5 flavour with average pooling and tanh dense stages.

    Inputs are ``height x width x channels`` images, read as flat rows in
    channel, row, column order.
    """
    if classes < 1 or channels < 1:
        raise InvalidArgumentError("LeNet needs at least one channel and one class")
    sizes = lenet_stage_sizes(height, width)
    _, h2, w2 = sizes[-1]
    conv1 = Conv2d((channels, height, width), 6, (LENET_KERNEL, LENET_KERNEL))
    pool1 = Pooling(conv1.output_shape, LENET_POOL, LENET_POOL, mode="average")
    conv2 = Conv2d(pool1.output_shape, 16, (LENET_KERNEL, LENET_KERNEL))
    pool2 = Pooling(conv2.output_shape, LENET_POOL, LENET_POOL, mode="average")
    layers: List[Layer] = [
        _scaling_layer(height * width * channels, mean, std),
        conv1,
        pool1,
        conv2,
        pool2,
        Dense(16 * h2 * w2, 120, "tanh"),
        Dense(120, 84, "tanh"),
        Dense(84, classes, "linear"),
        Probabilistic(classes),
    ]
    net = NeuralNetwork(layers)
    if stream is not None:
        net.initialize(stream)
    return net


def incremental_neurons(spec: NetworkSpec, widths: Sequence[int]) -> List[NetworkSpec]:
    """Candidates differing only in hidden width, for neuron selection."""
    depth = max(len(spec.hidden), 1)
    return [spec.model_copy(update={"hidden": [int(w)] * depth}) for w in widths]

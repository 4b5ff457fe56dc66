"""Neural networks: ordered layer pipelines."""

from typing import List, Sequence

import numpy as np

from ..core.exceptions import InvalidArgumentError, ShapeError
from ..core.rng import RandomStream
from .layers import Dense, Layer, Probabilistic
from .losses import LossIndex, loss, loss_gradient
from .tensor import Shape, Tensor, volume

Gradients = List[List[Tensor]]


class NeuralNetwork:
    """An ordered list of shape-compatible layers.

    Adjacent layers must agree on element count; tensors are reshaped between
    layers, so a flat vector can feed a convolution and a feature map can feed
    a dense layer.
    """

    def __init__(self, layers: Sequence[Layer]):
        if not layers:
            raise InvalidArgumentError("A network needs at least one layer")
        self.layers: List[Layer] = list(layers)
        for index, layer in enumerate(self.layers):
            layer.name = f"layer {index} ({layer.kind})"
        for previous, layer in zip(self.layers, self.layers[1:]):
            if volume(previous.output_shape) != volume(layer.input_shape):
                raise ShapeError(
                    f"expects {layer.input_shape} but {previous.name} produces {previous.output_shape}",
                    layer=layer.name,
                )

    def __repr__(self) -> str:
        kinds = " -> ".join(layer.kind for layer in self.layers)
        return f"NeuralNetwork({kinds})"

    def __len__(self) -> int:
        return len(self.layers)

    @property
    def input_shape(self) -> Shape:
        return self.layers[0].input_shape

    @property
    def output_shape(self) -> Shape:
        return self.layers[-1].output_shape

    @property
    def input_size(self) -> int:
        return volume(self.input_shape)

    @property
    def output_size(self) -> int:
        return volume(self.output_shape)

    @property
    def is_classifier(self) -> bool:
        return isinstance(self.layers[-1], Probabilistic)

    def initialize(self, stream: RandomStream) -> "NeuralNetwork":
        for layer in self.layers:
            layer.initialize(stream)
        return self

    def forward(self, batch: Tensor) -> Tensor:
        """Map a batch ``(N, *input_shape)`` (or ``(N, input_size)``) to outputs."""
        x = np.asarray(batch, dtype=np.float64)
        if x.ndim < 2 or volume(x.shape[1:]) != self.input_size:
            raise ShapeError(
                f"expected batches of {self.input_shape}, got {x.shape}",
                layer=self.layers[0].name,
            )
        for layer in self.layers:
            x = layer.forward(x.reshape((x.shape[0],) + layer.input_shape))
        return x

    def predict(self, sample: Tensor) -> Tensor:
        """Output for a single sample."""
        x = np.asarray(sample, dtype=np.float64)
        return self.forward(x.reshape((1,) + self.input_shape))[0]

    def backward(self, inputs: Tensor, targets: Tensor, index: LossIndex) -> Gradients:
        """Exact gradients of the batch loss for every layer's parameters."""
        predicted = self.forward(inputs)
        targets = np.asarray(targets, dtype=np.float64).reshape(predicted.shape)
        grad = loss_gradient(index, predicted, targets)
        for layer in reversed(self.layers):
            grad = layer.backward(grad.reshape((grad.shape[0],) + layer.output_shape))
        return [list(layer.grads) if layer.parameters() else [] for layer in self.layers]

    def loss(self, inputs: Tensor, targets: Tensor, index: LossIndex) -> float:
        predicted = self.forward(inputs)
        return loss(index, predicted, np.asarray(targets, dtype=np.float64).reshape(predicted.shape))

    def parameters(self) -> Gradients:
        """Trainable arrays grouped per layer, same structure as :meth:`backward`."""
        return [layer.parameters() for layer in self.layers]

    def parameter_count(self) -> int:
        return sum(p.size for group in self.parameters() for p in group)

    def dense_layers(self) -> List[Dense]:
        return [layer for layer in self.layers if isinstance(layer, Dense)]

"""Test analytic gradients against central finite differences."""

from typing import List, Tuple

import numpy as np
import pytest

from edge_learning_sim.core.rng import RandomStream
from edge_learning_sim.learning import (
    Bounding,
    Conv2d,
    Dense,
    LossIndex,
    NeuralNetwork,
    Pooling,
    Probabilistic,
    Scaling,
    Unscaling,
)

STEP = 1e-5
TOLERANCE = 1e-5
ELEMENT_RTOL = 1e-4
ELEMENT_ATOL = 1e-6
ACTIVATIONS = ("linear", "logistic", "tanh", "relu")


def random_array(stream: RandomStream, shape: Tuple[int, ...], scale: float = 1.0) -> np.ndarray:
    return np.array([stream.gauss(0.0, scale) for _ in range(int(np.prod(shape)))]).reshape(shape)


def one_hot_rows(stream: RandomStream, rows: int, classes: int) -> np.ndarray:
    targets = np.zeros((rows, classes))
    for row in range(rows):
        targets[row, stream.randbelow(classes)] = 1.0
    return targets


def random_case(seed: int) -> Tuple[NeuralNetwork, np.ndarray, np.ndarray, LossIndex]:
    """A small random network covering one family of layer types."""
    stream = RandomStream("gradient-check", seed)
    activation = ACTIVATIONS[(seed // 5) % len(ACTIVATIONS)]
    family = seed % 5
    batch = 3
    if family == 0:
        layers: List = [Dense(3, 4, activation), Dense(4, 2, "linear")]
        inputs, loss_index = random_array(stream, (batch, 3)), LossIndex.MSE
    elif family == 1:
        layers = [Dense(3, 4, activation), Dense(4, 3, "tanh"), Probabilistic(3)]
        inputs, loss_index = random_array(stream, (batch, 3)), LossIndex.CROSS_ENTROPY
    elif family == 2:
        mean, std = random_array(stream, (3,)), 0.5 + np.abs(random_array(stream, (3,)))
        layers = [
            Scaling(mean, std),
            Dense(3, 2, "logistic"),
            Unscaling(np.array([0.1, -0.2]), np.array([2.0, 0.5])),
            Bounding(np.array([0.8, -0.1]), np.array([1.4, 0.2])),
        ]
        inputs, loss_index = random_array(stream, (batch, 3)), LossIndex.MSE
    elif family == 3:
        layers = [
            Conv2d((1, 5, 5), 2, (2, 2)),
            Pooling((2, 4, 4), window=2, stride=2, mode="max"),
            Dense(8, 3, activation),
            Probabilistic(3),
        ]
        inputs, loss_index = random_array(stream, (batch, 1, 5, 5)), LossIndex.CROSS_ENTROPY
    else:
        stride = 1 + seed % 2
        conv = Conv2d((2, 6, 6), 3, (3, 3), stride=stride)
        channels, height, width = conv.output_shape
        pool = Pooling(conv.output_shape, window=2, stride=2 if height >= 2 else 1, mode="average")
        layers = [conv, pool, Dense(int(np.prod(pool.output_shape)), 2, "tanh")]
        inputs, loss_index = random_array(stream, (batch, 2, 6, 6)), LossIndex.MSE

    net = NeuralNetwork(layers).initialize(stream)
    for group in net.parameters():
        for array in group:
            array += random_array(stream, array.shape, 0.1)
    outputs = net.output_size
    if loss_index is LossIndex.CROSS_ENTROPY:
        targets = one_hot_rows(stream, batch, outputs)
    else:
        targets = random_array(stream, (batch, outputs))
    return net, inputs, targets, loss_index


def numeric_gradients(net: NeuralNetwork, inputs, targets, loss_index) -> List[List[np.ndarray]]:
    result = []
    for group in net.parameters():
        numeric_group = []
        for array in group:
            numeric = np.zeros_like(array)
            for index in np.ndindex(array.shape):
                original = array[index]
                array[index] = original + STEP
                plus = net.loss(inputs, targets, loss_index)
                array[index] = original - STEP
                minus = net.loss(inputs, targets, loss_index)
                array[index] = original
                numeric[index] = (plus - minus) / (2 * STEP)
            numeric_group.append(numeric)
        result.append(numeric_group)
    return result


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    scale = max(np.linalg.norm(analytic) + np.linalg.norm(numeric), 1e-12)
    return float(np.linalg.norm(analytic - numeric) / scale)


class TestFiniteDifferences:
    """Test every layer type and both losses on random small networks."""

    @pytest.mark.parametrize("seed", range(100))
    def test_random_network(self, seed):
        """Test analytic against numeric gradients, parameter by parameter."""
        net, inputs, targets, loss_index = random_case(seed)

        analytic = net.backward(inputs, targets, loss_index)
        numeric = numeric_gradients(net, inputs, targets, loss_index)

        assert [len(g) for g in analytic] == [len(g) for g in numeric]
        for layer, a_group, n_group in zip(net.layers, analytic, numeric):
            for a, n in zip(a_group, n_group):
                assert a.shape == n.shape
                assert relative_error(a, n) < TOLERANCE, layer.name
                np.testing.assert_allclose(a, n, rtol=ELEMENT_RTOL, atol=ELEMENT_ATOL, err_msg=layer.name)


class TestClosedForm:
    """Test gradients with known closed forms."""

    def test_dense_mse_single_sample(self):
        """Test dW_ij = 2/n_out * (y_hat_i - y_i) * x_j for a linear layer."""
        weights = np.array([[0.5, -1.0, 2.0], [1.5, 0.0, -0.5]])
        net = NeuralNetwork([Dense(3, 2, "linear", weights=weights, bias=np.array([0.1, -0.1]))])
        x = np.array([[1.0, 2.0, -1.0]])
        y = np.array([[0.0, 1.0]])

        d_weights, d_bias = net.backward(x, y, LossIndex.MSE)[0]

        predicted = x @ weights.T + np.array([0.1, -0.1])
        expected = (2.0 / 2) * (predicted - y).T @ x
        np.testing.assert_allclose(d_weights, expected)
        np.testing.assert_allclose(d_bias, (2.0 / 2) * (predicted - y)[0])

    def test_zero_input_zero_weight_gradient(self):
        """Test that a zero input gives zero weight gradients."""
        net = NeuralNetwork([Dense(2, 2, "linear", weights=np.ones((2, 2)), bias=np.array([1.0, 1.0]))])

        d_weights, d_bias = net.backward(np.zeros((1, 2)), np.zeros((1, 2)), LossIndex.MSE)[0]

        np.testing.assert_array_equal(d_weights, np.zeros((2, 2)))
        assert np.any(d_bias != 0.0)


class TestBoundingClamp:
    """Test gradients through a Bounding layer that clamps some outputs."""

    def clamped_net(self) -> NeuralNetwork:
        weights = np.array([[1.0, 0.2], [-0.3, 1.0]])
        dense = Dense(2, 2, "linear", weights=weights, bias=np.array([0.05, -0.05]))
        return NeuralNetwork([dense, Bounding(np.array([-0.5, -0.5]), np.array([0.5, 0.5]))])

    def test_clamped_output_has_zero_gradient(self):
        """Test that a clamped output contributes nothing to its weights and bias."""
        net = self.clamped_net()
        x = np.array([[0.2, 1.0]])
        y = np.array([[0.0, 0.0]])

        assert net.forward(x)[0, 1] == 0.5
        d_weights, d_bias = net.backward(x, y, LossIndex.MSE)[0]

        np.testing.assert_array_equal(d_weights[1], np.zeros(2))
        assert d_bias[1] == 0.0
        assert np.all(d_weights[0] != 0.0)
        numeric = numeric_gradients(net, x, y, LossIndex.MSE)[0]
        np.testing.assert_allclose(d_weights, numeric[0], rtol=ELEMENT_RTOL, atol=ELEMENT_ATOL)
        np.testing.assert_allclose(d_bias, numeric[1], rtol=ELEMENT_RTOL, atol=ELEMENT_ATOL)

    def test_mixed_batch_matches_finite_differences(self):
        """Test a batch with clamped and free outputs, away from the bounds."""
        net = self.clamped_net()
        x = np.array([[0.2, 1.0], [-3.0, 0.1], [0.3, -0.4], [1.5, -2.0]])
        y = np.array([[0.1, -0.2], [0.0, 0.3], [-0.1, 0.2], [0.4, 0.0]])

        outputs = net.forward(x)
        assert np.any(np.abs(outputs) == 0.5) and np.any(np.abs(outputs) < 0.5)
        analytic = net.backward(x, y, LossIndex.MSE)[0]
        numeric = numeric_gradients(net, x, y, LossIndex.MSE)[0]

        for a, n in zip(analytic, numeric):
            np.testing.assert_allclose(a, n, rtol=ELEMENT_RTOL, atol=ELEMENT_ATOL)

"""Test the layer set."""

import numpy as np
import pytest

from edge_learning_sim.core.exceptions import InvalidArgumentError, ShapeError
from edge_learning_sim.core.rng import RandomStream
from edge_learning_sim.learning import (
    Bounding,
    Conv2d,
    Dense,
    NeuralNetwork,
    Pooling,
    Probabilistic,
    Scaling,
    Unscaling,
)


class TestDense:
    """Test the perceptron layer."""

    def test_identity(self):
        """Test that identity weights and zero bias pass the input through."""
        layer = Dense(3, 3, "linear", weights=np.eye(3), bias=np.zeros(3))
        x = np.array([[1.0, -2.0, 0.5]])

        np.testing.assert_array_equal(layer.forward(x), x)

    @pytest.mark.parametrize(
        "activation,value",
        [("logistic", 0.5), ("tanh", 0.0), ("relu", 0.0), ("linear", 0.0)],
    )
    def test_activations_at_zero(self, activation, value):
        """Test each activation at the origin."""
        layer = Dense(2, 1, activation)

        assert layer.forward(np.zeros((1, 2)))[0, 0] == pytest.approx(value)

    def test_unknown_activation(self):
        """Test activation validation."""
        with pytest.raises(InvalidArgumentError):
            Dense(2, 2, "swish")

    def test_initialization_bounds(self):
        """Test Glorot-uniform weights and zero bias."""
        layer = Dense(4, 6)
        layer.bias[...] = 3.0
        layer.initialize(RandomStream("model/init", 1))
        limit = np.sqrt(6.0 / 10.0)

        assert np.all(np.abs(layer.weights) <= limit)
        assert np.any(layer.weights != 0.0)
        np.testing.assert_array_equal(layer.bias, np.zeros(6))


class TestProbabilistic:
    """Test the softmax layer."""

    def test_symmetric_input(self):
        """Test that equal logits give equal probabilities."""
        np.testing.assert_allclose(Probabilistic(2).forward(np.zeros((1, 2))), [[0.5, 0.5]])

    def test_rows_sum_to_one(self):
        """Test normalization including large logits."""
        x = np.array([[1000.0, -1000.0, 3.0], [0.1, 0.2, 0.3]])

        y = Probabilistic(3).forward(x)

        np.testing.assert_allclose(y.sum(axis=1), 1.0, atol=1e-12)
        assert np.all(np.isfinite(y))


class TestConv2d:
    """Test the convolution layer."""

    def test_sliding_sum(self):
        """Test a 2x2 ones kernel over a 3x3 ramp."""
        layer = Conv2d((1, 3, 3), 1, (2, 2), kernels=np.ones((1, 1, 2, 2)), bias=np.zeros(1))
        x = np.arange(1.0, 10.0).reshape(1, 1, 3, 3)

        np.testing.assert_array_equal(layer.forward(x)[0, 0], [[12.0, 16.0], [24.0, 28.0]])

    def test_stride_two(self):
        """Test output size with stride 2."""
        layer = Conv2d((1, 5, 5), 2, (3, 3), stride=2)

        assert layer.output_shape == (2, 2, 2)

    def test_kernel_too_large(self):
        """Test that an oversized kernel is rejected."""
        with pytest.raises(InvalidArgumentError):
            Conv2d((1, 3, 3), 1, (4, 4))


class TestPooling:
    """Test pooling."""

    def test_max_and_average(self):
        """Test both modes on one window."""
        x = np.array([[[[1.0, 2.0], [3.0, 4.0]]]])

        assert Pooling((1, 2, 2), mode="max").forward(x)[0, 0, 0, 0] == 4.0
        assert Pooling((1, 2, 2), mode="average").forward(x)[0, 0, 0, 0] == 2.5

    def test_max_tie_goes_to_first(self):
        """Test that a tied window routes its gradient to the first maximum."""
        layer = Pooling((1, 2, 2), mode="max")
        layer.forward(np.ones((1, 1, 2, 2)))

        dx = layer.backward(np.ones((1, 1, 1, 1)))

        np.testing.assert_array_equal(dx[0, 0], [[1.0, 0.0], [0.0, 0.0]])

    def test_unknown_mode(self):
        """Test mode validation."""
        with pytest.raises(InvalidArgumentError):
            Pooling((1, 2, 2), mode="median")


class TestPerFeatureLayers:
    """Test scaling, unscaling and bounding."""

    def test_scaling_then_unscaling_is_identity(self):
        """Test that the two layers invert each other."""
        mean, std = np.array([1.0, -2.0]), np.array([0.5, 4.0])
        x = np.array([[3.0, 7.0], [-1.0, 0.0]])

        y = Unscaling(mean, std).forward(Scaling(mean, std).forward(x))

        np.testing.assert_allclose(y, x, rtol=0, atol=1e-12)

    def test_scaling_rejects_zero_std(self):
        """Test that every deviation must be positive."""
        with pytest.raises(InvalidArgumentError):
            Scaling([0.0, 0.0], [1.0, 0.0])

    def test_bounding_clamps(self):
        """Test clamping and its gradient mask."""
        layer = Bounding([0.0, 0.0], [1.0, 1.0])

        y = layer.forward(np.array([[-1.0, 0.5]]))
        dx = layer.backward(np.ones((1, 2)))

        np.testing.assert_array_equal(y, [[0.0, 0.5]])
        np.testing.assert_array_equal(dx, [[0.0, 1.0]])


class TestShapes:
    """Test shape checking."""

    def test_mismatched_input_names_layer(self):
        """Test that a bad batch reports the offending layer."""
        layer = Dense(3, 2)

        with pytest.raises(ShapeError) as exc_info:
            layer.forward(np.zeros((1, 4)))

        assert exc_info.value.layer == "dense"

    def test_network_rejects_incompatible_layers(self):
        """Test that adjacent layers must agree on element count."""
        with pytest.raises(ShapeError) as exc_info:
            NeuralNetwork([Dense(2, 3), Dense(4, 1)])

        assert "layer 1" in exc_info.value.message

    def test_network_rejects_bad_batch(self):
        """Test the network-level input check."""
        net = NeuralNetwork([Dense(2, 1)])

        with pytest.raises(ShapeError):
            net.forward(np.zeros((3, 5)))

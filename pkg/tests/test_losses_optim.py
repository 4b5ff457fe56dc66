"""Test loss indices and the SGD update."""

import numpy as np
import pytest
from pydantic import ValidationError

from edge_learning_sim.core.exceptions import InvalidArgumentError, ShapeError
from edge_learning_sim.learning import LossIndex, loss, sgd_step
from edge_learning_sim.learning.optimizers import SgdOptimizer


class TestMeanSquaredError:
    """Test MSE."""

    def test_zero_for_equal(self):
        """Test that identical vectors have no error."""
        y = np.array([[0.3, -1.0, 2.0]])

        assert loss(LossIndex.MSE, y, y) == 0.0

    def test_mean_over_elements(self):
        """Test MSE([1, 0], [0, 0])."""
        assert loss(LossIndex.MSE, np.array([1.0, 0.0]), np.array([0.0, 0.0])) == pytest.approx(0.5)

    def test_shape_mismatch(self):
        """Test that predicted and target shapes must agree."""
        with pytest.raises(ShapeError):
            loss(LossIndex.MSE, np.zeros(2), np.zeros(3))


class TestCrossEntropy:
    """Test cross-entropy."""

    def test_exact_match_hits_floor(self):
        """Test that a perfect one-hot prediction is numerically zero."""
        target = np.array([[0.0, 1.0, 0.0]])

        assert loss(LossIndex.CROSS_ENTROPY, target, target) <= 1e-11

    def test_uniform_prediction(self):
        """Test -log(1/2) for a coin flip."""
        value = loss(LossIndex.CROSS_ENTROPY, np.array([[0.5, 0.5]]), np.array([[1.0, 0.0]]))

        assert value == pytest.approx(np.log(2.0))

    def test_zero_probability_is_clamped(self):
        """Test that a zero probability gives a large finite loss."""
        value = loss(LossIndex.CROSS_ENTROPY, np.array([[0.0, 1.0]]), np.array([[1.0, 0.0]]))

        assert np.isfinite(value)
        assert value == pytest.approx(-np.log(1e-12))

    def test_rejects_non_probabilities(self):
        """Test that rows must sum to one."""
        with pytest.raises(InvalidArgumentError):
            loss(LossIndex.CROSS_ENTROPY, np.array([[0.7, 0.7]]), np.array([[1.0, 0.0]]))


class TestSgd:
    """Test the gradient descent step."""

    def test_single_step(self):
        """Test p=1, g=2, lr=0.1 gives 0.8."""
        p = np.array([1.0])

        sgd_step([[p]], [[np.array([2.0])]], 0.1)

        assert p[0] == pytest.approx(0.8)

    def test_zero_learning_rate(self):
        """Test that a zero rate leaves parameters unchanged."""
        p = np.array([1.0, -2.0])

        sgd_step([[p]], [[np.array([5.0, 5.0])]], 0.0)

        np.testing.assert_array_equal(p, [1.0, -2.0])

    def test_quadratic_converges_in_one_step(self):
        """Test two steps of lr 0.5 on (p - 3)^2 from 0."""
        p = np.array([0.0])
        history = []
        for _ in range(2):
            sgd_step([[p]], [[2.0 * (p - 3.0)]], 0.5)
            history.append(float(p[0]))

        assert history == [3.0, 3.0]

    def test_incongruent_structures(self):
        """Test that parameter and gradient shapes must match."""
        with pytest.raises(ShapeError):
            sgd_step([[np.zeros(2)]], [[np.zeros(3)]], 0.1)
        with pytest.raises(ShapeError):
            sgd_step([[np.zeros(2)]], [], 0.1)

    def test_optimizer_validation(self):
        """Test optimizer hyper-parameter bounds."""
        with pytest.raises(ValidationError):
            SgdOptimizer(learning_rate=0.0)
        with pytest.raises(ValidationError):
            SgdOptimizer(batch_size=0)

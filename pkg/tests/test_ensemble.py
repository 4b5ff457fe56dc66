"""Test ensemble combination."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from edge_learning_sim.core.exceptions import InvalidArgumentError, ShapeError
from edge_learning_sim.learning import CombineMode, EnsembleModel


class Constant:
    """Classifier with a fixed output row."""

    is_classifier = True

    def __init__(self, row):
        self.row = np.asarray(row, dtype=np.float64)

    def forward(self, batch):
        return np.tile(self.row, (len(batch), 1))


def softmax(logits):
    e = np.exp(logits - np.max(logits))
    return e / e.sum()


class TestCombine:
    """Test soft and hard voting."""

    def test_soft_vote_averages(self):
        """Test [0.8, 0.2] and [0.4, 0.6] average to [0.6, 0.4]."""
        ensemble = EnsembleModel([Constant([0.8, 0.2]), Constant([0.4, 0.6])])

        np.testing.assert_allclose(ensemble.predict(np.zeros(1)), [0.6, 0.4])

    def test_hard_vote_counts(self):
        """Test that hard voting averages argmax votes."""
        members = [Constant([0.8, 0.2]), Constant([0.4, 0.6]), Constant([0.9, 0.1])]
        ensemble = EnsembleModel(members, CombineMode.HARD_VOTE)

        np.testing.assert_allclose(ensemble.predict(np.zeros(1)), [2 / 3, 1 / 3])

    def test_single_member_is_identity(self):
        """Test a one-model ensemble."""
        ensemble = EnsembleModel([Constant([0.3, 0.7])])

        np.testing.assert_allclose(ensemble.forward(np.zeros((2, 1))), [[0.3, 0.7], [0.3, 0.7]])
        assert len(ensemble) == 1 and ensemble.is_classifier

    def test_empty_ensemble(self):
        """Test that members are required."""
        with pytest.raises(InvalidArgumentError):
            EnsembleModel([])

    def test_disagreeing_shapes(self):
        """Test that member outputs must have one shape."""
        ensemble = EnsembleModel([Constant([0.5, 0.5]), Constant([0.2, 0.3, 0.5])])

        with pytest.raises(ShapeError):
            ensemble.forward(np.zeros((1, 1)))

    @given(
        st.lists(
            st.lists(st.floats(min_value=-5.0, max_value=5.0), min_size=3, max_size=3),
            min_size=1,
            max_size=6,
        ),
        st.integers(min_value=0, max_value=2),
    )
    def test_unanimous_winner_survives_soft_vote(self, logits, winner):
        """Test that a class every member ranks first stays first, and rows sum to one."""
        rows = []
        for row in logits:
            row = np.array(row)
            row[winner] = row.max() + 1.0
            rows.append(softmax(row))
        ensemble = EnsembleModel([Constant(r) for r in rows])

        output = ensemble.predict(np.zeros(1))

        assert int(np.argmax(output)) == winner
        assert output.sum() == pytest.approx(1.0)
        np.testing.assert_allclose(output, np.mean(rows, axis=0))

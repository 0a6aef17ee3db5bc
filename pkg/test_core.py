import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from src.core import (
    BoxConstraint,
    CmwError,
    Distribution,
    GameHistory,
    InvalidDistributionError,
    LossRange,
    LossVector,
    best_in_hindsight,
    corner_matrix,
    corners,
    loss_range,
    regret,
    sample,
)


class TestDistribution:

    def test_clamps_tiny_negatives(self):
        dist = Distribution([0.5, 0.5 + 1e-13, -1e-13])
        assert dist.probs.min() >= 0.0
        assert dist.probs[2] == 0.0
        assert_allclose(dist.probs.sum(), 1.0, atol=1e-15)

    def test_rejects_negative_mass(self):
        with pytest.raises(InvalidDistributionError):
            Distribution([1.1, -0.1])

    def test_rejects_bad_sum(self):
        with pytest.raises(InvalidDistributionError):
            Distribution([0.5, 0.4])

    def test_expected_loss(self):
        dist = Distribution([0.25, 0.75])
        assert dist.expected_loss([1.0, 0.0]) == pytest.approx(0.25)

    def test_is_read_only(self):
        dist = Distribution.uniform(3)
        with pytest.raises(ValueError):
            dist.probs[0] = 1.0


class TestLossVector:

    def test_needs_two_options(self):
        with pytest.raises(ValueError, match="needs at least 2"):
            LossVector([0.5])
        assert LossVector([0.5, 0.1]).m == 2

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            LossVector([0.5, float("nan")])


class TestBoxConstraint:

    def test_rejects_inverted_interval(self):
        with pytest.raises(ValueError, match="lower > upper"):
            BoxConstraint([0.0, 0.6], [1.0, 0.5])

    def test_rejects_length_mismatch(self):
        with pytest.raises(ValueError):
            BoxConstraint([0.0], [1.0, 1.0])

    def test_contains_with_tolerance(self):
        box = BoxConstraint([0.0, 0.2], [0.5, 0.4])
        assert box.contains([0.5 + 1e-12, 0.3])
        assert not box.contains([0.6, 0.3])

    def test_degenerate_interval_allowed(self):
        box = BoxConstraint([0.3, 0.3], [0.3, 0.7])
        assert_allclose(box.widths, [0.0, 0.4])
        assert_allclose(box.centers, [0.3, 0.5])

    def test_restrict(self):
        box = BoxConstraint([0.0, 0.1, 0.2], [1.0, 0.9, 0.8])
        sub = box.restrict([0, 2])
        assert_array_equal(sub.lower, [0.0, 0.2])
        assert_array_equal(sub.upper, [1.0, 0.8])


class TestCorners:

    def test_bit_order(self):
        box = BoxConstraint([0.0, 0.1], [1.0, 0.9])
        expected = [[0.0, 0.1], [1.0, 0.1], [0.0, 0.9], [1.0, 0.9]]
        assert_array_equal(corner_matrix(box), expected)

    def test_corner_count(self):
        assert len(corners(BoxConstraint.uniform(4))) == 16

    def test_enumeration_cap(self):
        with pytest.raises(CmwError, match="corner enumeration too large"):
            corner_matrix(BoxConstraint.uniform(26))


class TestAccounting:

    def test_loss_range(self):
        boxes = [BoxConstraint([0.1, 0.3], [0.4, 0.5]), BoxConstraint([0.2, 0.0], [0.9, 0.1])]
        assert float(loss_range(boxes)) == pytest.approx(0.9)

    def test_loss_range_negative_rejected(self):
        with pytest.raises(ValueError):
            LossRange(-0.1)

    def test_regret(self):
        history = GameHistory(2)
        for _ in range(2):
            history.record(Distribution.uniform(2), LossVector([1.0, 0.0]), 0)
        assert regret(history) == pytest.approx(1.0)
        assert history.expected_cost == pytest.approx(1.0)
        assert history.realized_cost == pytest.approx(2.0)

    def test_empty_regret(self):
        with pytest.raises(CmwError):
            regret(GameHistory(3))

    def test_best_in_hindsight_ties(self):
        assert best_in_hindsight([2.0, 1.0, 1.0]) == (1, 1.0)

    def test_sample_point_mass(self):
        rng = np.random.default_rng(0)
        dist = Distribution([0.0, 1.0, 0.0])
        assert all(sample(dist, rng) == 1 for _ in range(20))

    def test_sample_frequencies(self):
        rng = np.random.default_rng(1)
        dist = Distribution([0.2, 0.8])
        draws = np.array([sample(dist, rng) for _ in range(4000)])
        assert abs(draws.mean() - 0.8) < 0.03

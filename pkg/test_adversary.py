import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from src.core import BoxConstraint, InvalidDistributionError
from src.adversary import (
    AdversarialEnvironment,
    CornerStrategy,
    adversarial_environment,
    corner_vector,
    verify_equilibrium,
    worst_case_strategy,
)


def random_box(rng, m):
    pairs = np.sort(rng.uniform(size=(m, 2)), axis=1)
    return BoxConstraint(pairs[:, 0], pairs[:, 1])


def test_corner_vector():
    box = BoxConstraint([0.0, 0.1, 0.2], [1.0, 0.9, 0.8])
    assert_array_equal(corner_vector(box, 0), [0.0, 0.1, 0.2])
    assert_array_equal(corner_vector(box, 5), [1.0, 0.1, 0.8])


class TestCornerStrategy:

    def test_rejects_bad_sum(self):
        with pytest.raises(InvalidDistributionError):
            CornerStrategy({0: 0.5, 1: 0.4}, 2)

    def test_rejects_negative(self):
        with pytest.raises(InvalidDistributionError):
            CornerStrategy({0: 1.5, 1: -0.5}, 2)

    def test_rejects_out_of_range_index(self):
        with pytest.raises(ValueError):
            CornerStrategy({4: 1.0}, 2)

    def test_expected_loss_and_sampling(self):
        box = BoxConstraint.uniform(2)
        strategy = CornerStrategy({1: 0.5, 2: 0.5}, 2)
        assert_allclose(strategy.expected_loss(box), [0.5, 0.5])
        assert strategy.support == (1, 2)
        rng = np.random.default_rng(0)
        for _ in range(10):
            loss = strategy.sample(box, rng).values
            assert loss.tolist() in ([1.0, 0.0], [0.0, 1.0])

    def test_point_mass(self):
        assert CornerStrategy.point_mass(3, 6).support == (6,)


def test_unit_square_split():
    strategy, r_star = worst_case_strategy(np.array([0.5, 0.5]), 0.05, BoxConstraint.uniform(2))
    assert r_star == pytest.approx(0.25, abs=1e-9)
    assert strategy.corner_probs.get(1, 0.0) == pytest.approx(0.5, abs=1e-6)
    assert strategy.corner_probs.get(2, 0.0) == pytest.approx(0.5, abs=1e-6)
    assert abs(verify_equilibrium(strategy, np.array([0.5, 0.5]), 0.05, BoxConstraint.uniform(2))) <= 1e-6


@pytest.mark.parametrize("m", [2, 3, 4, 5])
def test_equilibrium_gap_is_zero(m):
    rng = np.random.default_rng(m)
    for _ in range(10):
        box, u = random_box(rng, m), rng.dirichlet(np.ones(m))
        eps = float(rng.uniform(0.01, 0.1))
        strategy, r_star = worst_case_strategy(u, eps, box)
        assert abs(verify_equilibrium(strategy, u, eps, box, r_star)) <= 1e-6


def test_suboptimal_strategy_has_positive_gap():
    u = np.array([0.5, 0.5])
    box = BoxConstraint.uniform(2)
    # all mass on one corner lets q absorb the linear term
    gap = verify_equilibrium(CornerStrategy.point_mass(2, 1), u, 0.05, box)
    assert gap > 1e-3


def test_adversarial_environment_stays_in_box():
    rng = np.random.default_rng(3)
    env = AdversarialEnvironment(rng)
    for _ in range(5):
        box, u = random_box(rng, 3), rng.dirichlet(np.ones(3))
        loss = env.respond(u, 0.05, box)
        assert box.contains(loss.values)
    assert len(env.r_star_trace) == 5
    assert env.last_strategy is not None
    assert box.contains(adversarial_environment(u, 0.05, box, rng).values)

import math

import numpy as np
import pytest
from scipy import stats

from vthsim.stochastic import RandomStream, increment_from_uniform, spawn_streams

# first draws of seed 12345, frozen against numpy's PCG64
FROZEN_12345 = [0.7726639775328303, 0.6832416602902471, 0.20263454266726588, 0.32374532924902544, 0.608890449398091]


def test_uniform_in_half_open_interval():
    u = RandomStream(3).uniform(200_000)
    assert u.min() > 0.0
    assert u.max() <= 1.0


def test_same_seed_same_sequence():
    a = RandomStream(77).uniform(10)
    b = RandomStream(77).uniform(10)
    assert np.array_equal(a, b)


def test_frozen_sequence():
    assert RandomStream(12345).uniform(5).tolist() == FROZEN_12345


def test_uniform_mean():
    u = RandomStream(1).uniform(1_000_000)
    assert 0.499 <= u.mean() <= 0.501


@pytest.mark.parametrize("r, eta", [(1.0, 0.0), (math.exp(-1.0), 1.0)])
def test_increment_examples(r, eta):
    assert increment_from_uniform(r) == pytest.approx(eta, abs=1e-15)


def test_increment_of_one_is_positive_zero():
    assert math.copysign(1.0, increment_from_uniform(1.0)) == 1.0


def test_increment_moments():
    x = RandomStream(2).time_increment(1_000_000)
    assert 0.997 <= x.mean() <= 1.003
    assert 0.99 <= x.var() <= 1.01


def test_increment_ks_distance():
    x = RandomStream(4).time_increment(100_000)
    assert stats.kstest(x, "expon").statistic < 0.01


def test_spawned_streams_differ_and_are_reproducible():
    a = spawn_streams(10, 3)
    b = spawn_streams(10, 3)
    assert [s.seed for s in a] == [10, 11, 12]
    draws = [s.uniform(4) for s in a]
    assert all(np.array_equal(d, s.uniform(4)) for d, s in zip(draws, b))
    assert not np.array_equal(draws[0], draws[1])


def test_independent_streams_uncorrelated():
    a, b = spawn_streams(0, 2)
    r = np.corrcoef(a.uniform(100_000), b.uniform(100_000))[0, 1]
    assert abs(r) < 0.02


def test_integers_inclusive():
    v = RandomStream(5).integers(1, 3, 10_000)
    assert set(np.unique(v)) == {1, 2, 3}

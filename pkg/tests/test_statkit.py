import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import kurtosis, norm, skew

from gbsclique.rng import stream
from gbsclique.statkit import (histogram, ks_statistic, moments_with_se, poisson_pmf, poisson_tv,
                               random_subsets, subset_intersection_experiment,
                               zero_agreement_frequency)


def test_moments_examples():
    s = moments_with_se([3.0] * 10)
    assert s.variance == 0 and s.stderr_mean == 0
    s = moments_with_se([0, 1])
    assert s.mean == 0.5 and s.variance == 0.5
    with pytest.raises(ValueError):
        moments_with_se([1.0])
    u = stream(1, "test").random(1_000_000)
    s = moments_with_se(u)
    assert abs(s.mean - 0.5) < 4 * s.stderr_mean


@given(st.lists(st.floats(-1e3, 1e3), min_size=3, max_size=200))
@settings(max_examples=100, deadline=None)
def test_moments_match_two_pass(xs):
    x = np.array(xs)
    s = moments_with_se(x)
    assert s.mean == pytest.approx(x.mean(), abs=1e-9)
    assert s.variance == pytest.approx(x.var(ddof=1), rel=1e-8, abs=1e-8)
    assert s.stderr_mean == pytest.approx(math.sqrt(s.variance / x.size))
    c = x - x.mean()
    assert s.central[2] == pytest.approx(np.mean(c**3), rel=1e-6, abs=1e-6)
    assert s.central[3] == pytest.approx(np.mean(c**4), rel=1e-6, abs=1e-4)


def test_ks_examples():
    assert ks_statistic([0.0], norm.cdf) == 0.5
    assert ks_statistic([-50.0, -40.0], norm.cdf) == pytest.approx(1.0)
    hits = 0
    for rep in range(200):
        x = stream(rep, "ks").normal(size=2000)
        hits += ks_statistic(x, norm.cdf) < 1.63 / math.sqrt(2000)
    assert hits >= 190


@given(st.lists(st.floats(-5, 5), min_size=1, max_size=50), st.randoms(use_true_random=False))
@settings(max_examples=50, deadline=None)
def test_ks_order_invariant(xs, rnd):
    ys = list(xs)
    rnd.shuffle(ys)
    assert ks_statistic(xs, norm.cdf) == ks_statistic(ys, norm.cdf)


def test_poisson_tv_examples():
    mu = 2.5
    cut = math.ceil(mu + 12 * math.sqrt(mu + 1))
    table = poisson_pmf(np.arange(cut + 40), mu) * 1e12
    assert poisson_tv(table, mu) < 1e-9
    assert poisson_tv({0: 10}, 0.0) == 0
    assert poisson_tv({0: 10}, 1.0) == pytest.approx(1 - math.exp(-1), abs=1e-12)
    assert poisson_tv({3: 1, 0: 2}, 1.0) == poisson_tv(np.array([2, 0, 0, 1]), 1.0)


def test_random_subsets_uniform():
    rng = stream(4, "test")
    for n, k in ((10, 2), (30, 20)):
        s = random_subsets(rng, n, k, 40_000)
        assert (np.diff(s, axis=1) > 0).all() and s.min() >= 0 and s.max() < n
        freq = np.bincount(s.ravel(), minlength=n) / 40_000
        se = math.sqrt(k / n * (1 - k / n) / 40_000)
        assert np.all(np.abs(freq - k / n) < 5 * se)
    s = random_subsets(rng, 5000, 3000, 3)
    assert s.shape == (3, 3000) and all(len(set(r)) == 3000 for r in s.tolist())


def test_subset_intersection_small():
    rep = subset_intersection_experiment(200, [20, 0, 10], 2000, 3)
    assert rep.cells[0] == (0, 1)
    for c in rep.cells:
        if 1 in c:
            assert rep.histograms[c] == {0: 2000}
    i01 = rep.cells.index((0, 2))
    assert abs(rep.counts[:, i01].mean() - 1.0) < 0.1


def test_subset_intersection_factorizes():
    rep = subset_intersection_experiment(10_000, [100, 100, 100], 20_000, 5)
    for x in ([0, 0, 0, 0], [1, 0, 0, 0], [1, 1, 0, 0], [0, 1, 1, 0]):
        emp = rep.joint_frequency(x)
        prod = rep.product_poisson(x)
        se = math.sqrt(prod * (1 - prod) / rep.trials)
        assert abs(emp - prod) < 4 * se + 0.01 * prod


def test_zero_agreement_examples():
    assert zero_agreement_frequency(1, 1, 1, 100, 1)[0] == 0.0
    assert zero_agreement_frequency(50, 0, 0, 100, 1)[0] == 1.0
    freq, se = zero_agreement_frequency(500, 500, 500, 20_000, 2)
    assert abs(freq - math.exp(-1)) < 4 * se + 0.003


def test_zero_agreement_matches_overlap_mean():
    # expected agreements are overlap_a * overlap_b / m**2; the zero count is near-Poisson
    m, oa, ob = 200, 150, 120
    freq, se = zero_agreement_frequency(m, oa, ob, 40_000, 9)
    assert abs(freq - math.exp(-oa * ob / m**2)) < 4 * se + 0.005


def test_histogram():
    assert histogram([0, 2, 2, 5]) == {0: 1, 2: 2, 5: 1}

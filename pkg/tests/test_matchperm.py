import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gbsclique.graph import BipartiteGraph, SubgraphSample, random_biadjacency
from gbsclique.matchperm import (derangement_ratio, derangements, hafnian_rowsum_approx,
                                 hafnian_rowsum_approxs, normalized_hafnian_square,
                                 normalized_hafnians, normalized_matching_sum, permanent_bruteforce,
                                 permanent_exact, permanents)
from gbsclique.rng import stream

square01 = st.integers(1, 6).flatmap(
    lambda m: st.lists(st.integers(0, 1), min_size=m * m, max_size=m * m).map(
        lambda v: np.array(v, dtype=np.uint8).reshape(m, m)))


def test_examples():
    assert permanent_exact(np.eye(3, dtype=np.uint8)).exact_count == 1
    assert permanent_exact(np.ones((3, 3), dtype=np.uint8)).exact_count == 6
    assert permanent_exact(1 - np.eye(4, dtype=np.uint8)).exact_count == 9
    assert permanent_bruteforce(np.ones((2, 2), dtype=np.uint8)).exact_count == 2
    assert permanent_bruteforce(np.array([[1, 1], [1, 0]], dtype=np.uint8)).exact_count == 1


def test_exhaustive_small():
    for m in (1, 2, 3):
        for bits in itertools.product((0, 1), repeat=m * m):
            a = np.array(bits, dtype=np.uint8).reshape(m, m)
            assert permanent_exact(a) == permanent_bruteforce(a)


@given(square01)
@settings(max_examples=200, deadline=None)
def test_matches_bruteforce(a):
    assert permanent_exact(a).exact_count == permanent_bruteforce(a).exact_count


@given(square01, st.randoms(use_true_random=False))
@settings(max_examples=100, deadline=None)
def test_permutation_and_transpose_invariance(a, rnd):
    m = a.shape[0]
    rows, cols = list(range(m)), list(range(m))
    rnd.shuffle(rows)
    rnd.shuffle(cols)
    base = permanent_exact(a).exact_count
    assert permanent_exact(a[rows][:, cols]).exact_count == base
    assert permanent_exact(a.T).exact_count == base
    assert 0 <= base <= math.factorial(m)


@given(square01, st.data())
@settings(max_examples=100, deadline=None)
def test_monotone_in_entries(a, data):
    zeros = np.argwhere(a == 0)
    if zeros.size == 0:
        return
    i, j = zeros[data.draw(st.integers(0, len(zeros) - 1))]
    b = a.copy()
    b[i, j] = 1
    assert permanent_exact(b).exact_count >= permanent_exact(a).exact_count


@pytest.mark.parametrize("m", [8, 12, 20, 21, 24, 28])
def test_all_ones_is_factorial(m):
    v = permanent_exact(np.ones((m, m), dtype=np.uint8))
    assert v.exact_count == math.factorial(m) and not v.overflowed


def test_large_sizes_use_block_products():
    # block-diagonal: permanent is the product of the blocks' permanents
    rng = stream(5, "test")
    for m1, m2 in ((10, 11), (11, 12)):
        b1 = (rng.random((m1, m1)) < 0.7).astype(np.uint8)
        b2 = (rng.random((m2, m2)) < 0.7).astype(np.uint8)
        a = np.zeros((m1 + m2, m1 + m2), dtype=np.uint8)
        a[:m1, :m1] = b1
        a[m1:, m1:] = b2
        expect = permanent_exact(b1).exact_count * permanent_exact(b2).exact_count
        assert permanent_exact(a).exact_count == expect


def test_size_limits():
    with pytest.raises(ValueError):
        permanent_exact(np.ones((33, 33), dtype=np.uint8))
    with pytest.raises(ValueError):
        permanent_bruteforce(np.ones((10, 10), dtype=np.uint8))
    with pytest.raises(ValueError):
        permanent_exact(np.array([[2]]))
    with pytest.raises(ValueError):
        permanent_exact(np.ones((2, 3)))


def test_batched_matches_single():
    rng = stream(3, "test")
    mats = random_biadjacency(7, 0.6, 200, rng)
    batch = permanents(mats)
    assert batch.tolist() == [permanent_exact(x).exact_count for x in mats]


def test_normalized_examples():
    full = BipartiteGraph(4, 1.0, np.ones((4, 4), dtype=np.uint8))
    s = SubgraphSample((0, 1, 3), (0, 2, 3))
    assert normalized_matching_sum(full, s) == 1.0
    zero = BipartiteGraph(3, 0.5, np.zeros((3, 3), dtype=np.uint8))
    assert normalized_matching_sum(zero, SubgraphSample((0, 1), (0, 1))) == 0.0
    g = BipartiteGraph.from_edges(2, 0.5, [(0, 0), (0, 1), (1, 0)])
    assert normalized_matching_sum(g, SubgraphSample((0, 1), (0, 1))) == 2.0
    assert normalized_hafnian_square([[1]], 0.5) == 2.0
    assert normalized_hafnian_square(np.ones((5, 5), dtype=np.uint8), 1.0) == 1.0
    assert normalized_hafnian_square(np.eye(3, dtype=np.uint8), 0.5) == pytest.approx(4 / 3, rel=1e-15)
    with pytest.raises(ValueError):
        normalized_hafnian_square(np.eye(2, dtype=np.uint8), 0.0)


def test_rowsum_examples():
    assert hafnian_rowsum_approx(np.ones((4, 4)), 1.0) == 1.0
    assert hafnian_rowsum_approx(np.array([[0, 0], [1, 1]]), 0.5) == 0.0
    assert hafnian_rowsum_approx(np.array([[1, 0], [1, 1]]), 0.5) == 2.0
    with pytest.raises(ValueError):
        hafnian_rowsum_approx(np.ones((2, 2)), 0.0)


def test_mean_one_identities():
    rng = stream(11, "test")
    p, count = 0.5, 50_000
    mats = random_biadjacency(6, p, count, rng)
    for vals in (normalized_hafnians(mats, p), hafnian_rowsum_approxs(mats, p)):
        se = vals.std(ddof=1) / np.sqrt(count)
        assert abs(vals.mean() - 1) < 4 * se


def test_derangements():
    assert [derangements(j) for j in range(5)] == [1, 0, 1, 2, 9]
    for j in range(8):
        brute = sum(all(s[i] != i for i in range(j)) for s in itertools.permutations(range(j)))
        assert derangements(j) == brute
    assert abs(derangement_ratio(20) - math.exp(-1)) < 1e-15
    assert derangement_ratio(12) == pytest.approx(derangements(12) / math.factorial(12), rel=1e-14)
    with pytest.raises(ValueError):
        derangements(-1)

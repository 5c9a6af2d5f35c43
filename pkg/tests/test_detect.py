import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gbsclique.detect import (DegenerateNormalization, MaxZTest, SamplerSpec, TopMeanTest, auc,
                              calibrate_max_z, degree_detector, detection_power_experiment,
                              gaussian_surrogate_overlap, normalize_counts, run_algorithm1,
                              top_fraction_overlap)
from gbsclique.gbs import SampleBatch
from gbsclique.graph import BipartiteGraph, gen_bipartite_er, planted_er
from gbsclique.theory import detection_proportion


def test_complete_graph_is_degenerate():
    g = BipartiteGraph(4, 1.0, np.ones((4, 4), np.uint8))
    batch = SampleBatch(np.array([[0, 1], [2, 3]]), np.array([[0, 1], [2, 3]]), "fixture")
    with pytest.raises(DegenerateNormalization):
        run_algorithm1(g, SamplerSpec(m=2), 2, batch=batch)


def test_normalization_invariants():
    g = gen_bipartite_er(10, 0.6, 3)
    res = run_algorithm1(g, SamplerSpec(m=3), 2000, seed=4)
    assert res.counts.sum() == 2 * 3 * 2000
    assert abs(np.mean(res.z_scores**2) - 1) < 1e-6
    # sides each sum to m*t, so centered frequencies have zero mean overall
    assert abs(np.mean(res.z_scores)) < 1e-6
    assert res.t_used == 2000 and res.statistic_name == "max_z"
    assert res.statistic_value == pytest.approx(res.z_scores.max())
    assert not res.decision


def test_t1_counts_sum():
    g = gen_bipartite_er(8, 0.5, 3)
    res = run_algorithm1(g, SamplerSpec(m=2), 1, seed=1)
    assert res.counts.sum() == 4


def test_sign_check_small():
    hits = 0
    for s in range(10):
        inst = planted_er(12, 0.5, 6, s)
        z = run_algorithm1(inst.graph, SamplerSpec(m=3), 20_000, seed=s).left
        mask = np.zeros(12, bool)
        mask[list(inst.a0)] = True
        hits += z[mask].mean() > z[~mask].mean()
    assert hits >= 8


@given(st.lists(st.integers(0, 50), min_size=4, max_size=20), st.floats(0.1, 10), st.floats(-5, 5))
@settings(max_examples=60, deadline=None)
def test_affine_invariance_of_ranking(counts, a, b):
    c = np.array(counts + counts[::-1], dtype=float)  # even length, 2n entries
    if np.ptp(c) == 0:
        return
    t, m = 10, 1
    z1, *_ = normalize_counts(c, t, m)
    freq = c / t
    z2 = (a * freq + b)
    assert list(np.argsort(-z1, kind="stable")) == list(np.argsort(-z2, kind="stable"))


def test_top_fraction_overlap_examples():
    z = np.arange(10.0)
    assert top_fraction_overlap(z, [7, 8, 9], 0.5) == (3, False)
    assert top_fraction_overlap(z, [0, 1], 0.5) == (0, False)
    assert top_fraction_overlap(z, [], 0.5) == (0, True)
    ties = np.zeros(6)
    assert top_fraction_overlap(ties, [0, 1, 5], 0.5)[0] == 2  # ascending index wins ties
    with pytest.raises(ValueError):
        top_fraction_overlap(z, [1], 1.0)


def test_degree_detector():
    g = BipartiteGraph.from_edges(100, 0.5, [(0, v) for v in range(60)] + [(1, v) for v in range(50)])
    dl, dr = degree_detector(g)
    assert dl[0] == pytest.approx(2.0) and dl[1] == 0.0
    with pytest.raises(ValueError):
        degree_detector(BipartiteGraph(3, 1.0, np.ones((3, 3), np.uint8)))


def test_degree_shift_on_planted():
    from gbsclique.theory import degree_mean_shift
    gaps = []
    for s in range(400):
        inst = planted_er(100, 0.5, 10, s)
        dl, _ = degree_detector(inst.graph)
        mask = np.zeros(100, bool)
        mask[list(inst.a0)] = True
        gaps.append(dl[mask].mean() - dl[~mask].mean())
    se = np.std(gaps, ddof=1) / math.sqrt(len(gaps))
    # background nodes also gain (k/n)(1-p) edges on average from the plant
    expected = degree_mean_shift(0.5, 10, 100)
    assert abs(np.mean(gaps) - expected) < 4 * se + 0.1 * expected


def test_auc():
    assert auc([0, 1], [2, 3]) == 1.0
    assert auc([1, 1], [1, 1]) == 0.5
    assert auc([2, 3], [0, 1]) == 0.0


def test_power_saturated_and_null():
    _, a, _ = detection_power_experiment(20, 0.5, 20, 10, 1, detector="degree")
    assert a == 1.0
    _, a0, se0 = detection_power_experiment(60, 0.5, 0, 200, 2, detector="degree")
    assert abs(a0 - 0.5) < 3 * se0


def test_power_rows_and_reproducibility():
    args = dict(n=10, p=0.6, k=3, trials=4, seed=9, detector="weight",
                sampler=SamplerSpec("exact", 3), t=500)
    r1, a1, _ = detection_power_experiment(**args)
    r2, a2, _ = detection_power_experiment(**args)
    assert a1 == a2 and [r.statistic_planted for r in r1] == [r.statistic_planted for r in r2]
    assert all(0 <= r.overlap <= 3 for r in r1)


def test_gaussian_surrogate():
    ov = gaussian_surrogate_overlap(10**8, 100, 0.01, 0.8, 300, 3)
    frac = ov / 100
    se = frac.std(ddof=1) / math.sqrt(frac.size)
    assert abs(frac.mean() - detection_proportion(0.8, 0.01)) < 3 * se + 1e-3
    ov = gaussian_surrogate_overlap(10**4, 100, 1.0, 0.8, 300, 4)
    frac = ov / 100
    se = frac.std(ddof=1) / math.sqrt(frac.size)
    assert abs(frac.mean() - detection_proportion(0.8, 1.0)) < 3 * se + 0.005


def test_surrogate_rank_model_against_direct_sorting():
    # the multinomial rank construction equals sorting all n values
    n, k, eps, c = 400, 20, 0.5, 0.8
    direct = []
    rng = np.random.default_rng(0)
    for _ in range(2000):
        x = np.concatenate([rng.normal(eps, 1, k), rng.normal(0, 1, n - k)])
        top = np.argsort(-x)[: int(c * n)]
        direct.append((top < k).sum())
    surrogate = gaussian_surrogate_overlap(n, k, eps, c, 2000, 5)
    se = math.hypot(np.std(direct) / math.sqrt(2000), np.std(surrogate) / math.sqrt(2000))
    assert abs(np.mean(direct) - surrogate.mean()) < 4 * se


def test_calibrated_threshold_and_tests():
    theta = calibrate_max_z(10, 0.6, SamplerSpec("exact", 3), 500, 0.9, 10, 1)
    z = np.array([0.0, theta + 1])
    assert MaxZTest(theta)(z)
    assert not MaxZTest(theta)(np.array([theta - 1]))
    assert TopMeanTest(0.5, 0.0).statistic(np.array([1.0, 2.0, 3.0, 4.0])) == 3.5

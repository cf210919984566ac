import math

import numpy as np
import pytest

from matelab import peanosphere as pe
from matelab.rng import RngStream
from matelab.stochastic import CorrelatedPair, TimeSeries, sample_correlated_bm


def _pair(L, R, kp=6.0):
    return CorrelatedPair(TimeSeries(1.0, np.asarray(L, float)), TimeSeries(1.0, np.asarray(R, float)), kp)


def test_build_tree_hand_examples():
    assert list(pe.build_tree([0, 1, 2, 1, 0])) == [-1, 0, 1, 0, -1]
    assert list(pe.build_tree([0, 1, 0])) == [-1, 0, -1]
    m = 5
    X = np.concatenate([np.arange(m + 1), np.arange(m - 1, -1, -1)]).astype(float)
    par = pe.build_tree(pe.jitter(X))
    depth = np.zeros(len(X), dtype=int)
    for i in range(1, len(X)):
        if par[i] >= 0:
            depth[i] = depth[par[i]] + 1
    assert depth.max() == m


def test_tie_rejected():
    with pytest.raises(ValueError):
        pe.ExcursionPairGrid([0, 1, 2, 1, 0], [0, 1, 2, 3, 0])
    with pytest.raises(ValueError):
        pe.ExcursionPairGrid([0, 0], [0, 0])
    with pytest.raises(ValueError):
        pe.ExcursionPairGrid([0, 1, 0], [0, 1, 0], C=1.5)


def test_smallest_mating():
    pair = pe.ExcursionPairGrid([0, 1, 0], [0, 1, 0])
    m = pe.mate(pair)
    assert m.euler_characteristic == 2
    c = pe.class_census(pair)
    assert c.counts[0] == 1
    assert sum(c.counts.values()) == c.n_classes
    assert c.counts[3] == 0
    mass = pe.pushforward_measure(m, pair)
    assert list(mass) == [1.0, 1.0]


@pytest.mark.parametrize("kind", ["brownian", "walk"])
def test_random_matings(kind):
    for s in range(10):
        pair = pe.random_pair(RngStream(s), 1000, kind)
        m = pe.mate(pair)
        assert m.euler_characteristic == 2
        c = pe.class_census(pair)
        assert c.counts[0] == 1 and c.max_preimage <= 3
        assert sum(c.counts.values()) == c.n_classes
        assert pe.pushforward_measure(m, pair).sum() == pair.n


def test_single_preimage_mass_fraction():
    pair = pe.random_pair(RngStream(0), 10 ** 4)
    mass = pe.pushforward_measure(pe.mate(pair), pair)
    assert mass[mass == 1].sum() >= 0.9 * mass.sum()


def test_mated_map_text_export():
    m = pe.mate(pe.ExcursionPairGrid([0, 1, 0], [0, 1, 0]))
    txt = m.to_text()
    assert txt.startswith("# V=") and ":" in txt.splitlines()[-1]


def test_cone_structure_forced_cases():
    up = np.arange(10.0)
    cs = pe.cone_structure(_pair(up, up))
    assert np.all(cs.ancestor[1:] == 0) and list(cs.free) == [0]
    down = -np.arange(10.0)
    cs = pe.cone_structure(_pair(down, up))
    assert np.all(cs.ancestor == -1)


def test_ancestor_relation_transitive_and_nested():
    p = sample_correlated_bm(RngStream(1), 4000, 1.0, 6.0)
    cs = pe.cone_structure(p)
    n = len(cs.reach)
    for s in range(0, n, 37):
        for t in range(s + 1, min(n, cs.reach[s])):
            assert cs.is_ancestor(s, t)
            # everything s covers beyond t is also covered from s
            for u in range(t + 1, min(n, cs.reach[t])):
                assert cs.is_ancestor(s, u)


def test_jump_sides_disjoint_and_errors():
    p = sample_correlated_bm(RngStream(2), 10 ** 5, 1.0, 6.0)
    jL, jR = pe.extract_jump_processes(p, 5.0)
    assert np.all(jL[:, 2] == 0) and np.all(jR[:, 2] == 1)
    assert not set(map(int, jL[:, 0])) & set(map(int, jR[:, 0]))
    with pytest.raises(ValueError):
        pe.extract_jump_processes(sample_correlated_bm(RngStream(0), 100, 1.0, 8.0), 1.0)


def test_jump_count_independence():
    structs = [pe.cone_structure(sample_correlated_bm(RngStream(3, i), 2 ** 18, 1.0, 6.0))
               for i in range(4)]
    r, se = pe.jump_count_correlation(structs, 5.0)
    assert abs(r) < 4 * se


def test_standardizer():
    st = pe.standardizer_for(6.0)
    assert st.theta_kappa == pytest.approx(2 * math.pi / 3)
    assert np.allclose(st.Lam_inv @ st.Lam, np.eye(2), atol=1e-12)
    st8 = pe.standardizer_for(8.0)
    assert np.allclose(st8.Lam, np.eye(2), atol=1e-15)
    with pytest.raises(ValueError):
        pe.standardizer_for(9.0)


def test_standardized_covariance_identity():
    p = sample_correlated_bm(RngStream(4), 10 ** 6, 1.0, 6.0)
    Z, _ = pe.standardize(p)
    C = np.cov(np.diff(Z, axis=1))
    assert np.allclose(C, np.eye(2), atol=4 * math.sqrt(2 / 10 ** 6) * 1.5)


def test_cut_times_equal_cone_times_of_standardized_pair():
    p = sample_correlated_bm(RngStream(5), 2 ** 16, 1.0, 6.0)
    Z, st = pe.standardize(p)
    a = pe.cut_times(p)
    b = pe.cone_times(Z, st.theta_kappa)
    assert np.array_equal(a, b)


def test_cone_dimension_three_quarter_and_half_pi():
    paths = [RngStream(6, i).gen.standard_normal((2, 2 ** 18)).cumsum(axis=1) for i in range(16)]
    d, _ = pe.cone_dim_boxcount(paths, 3 * math.pi / 4, scales=[2.0 ** -k for k in range(5, 15)])
    assert abs(d - 1 / 3) < 0.1
    d, _ = pe.cone_dim_boxcount(paths, math.pi / 2, scales=[2.0 ** -k for k in range(5, 15)])
    assert abs(d) < 0.1
    with pytest.raises(ValueError):
        pe.boxcount_dimension([1, 2], 10, scales=[0.5, 0.25, 0.125])

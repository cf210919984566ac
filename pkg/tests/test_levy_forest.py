import math

import numpy as np
import pytest

from matelab import gff, levy_forest as lf
from matelab.rng import RngStream
from matelab.stochastic import TimeSeries, hill_estimator


def _path(vals, jumps):
    return lf.JumpPath(TimeSeries(1.0, np.asarray(vals, float)), np.asarray(jumps, float))


def test_single_jump_single_root():
    t = lf.build_levy_tree(_path([0, 2, 1, -1], [[1, 2]]))
    assert list(t.parent) == [-1] and list(t.roots) == [0]
    assert t.boundary_length[0] == 2 and t.end[0] == 3


def test_nested_pair_is_depth_two_chain():
    t = lf.build_levy_tree(_path([0, 2, 3.5, 1.5, 0.5, -0.5], [[1, 2], [2, 1.5]]))
    assert list(t.parent) == [-1, 0]
    assert list(t.depth()) == [0, 1]
    assert t.nesting_ok()


def test_disjoint_jumps_are_two_roots():
    t = lf.build_levy_tree(_path([0, 1, -0.5, 1.5, -1], [[1, 1], [3, 2]]))
    assert list(t.parent) == [-1, -1]


def test_unordered_jumps_rejected():
    with pytest.raises(ValueError):
        lf.build_levy_tree(_path([0, 2, 3.5, 1.5], [[2, 1.5], [1, 2]]))
    with pytest.raises(ValueError):
        _path([0, 1, 0], [[1, 1], [2, -1]])


def test_sample_nesting_and_empty_forest():
    fl = lf.forested_line(RngStream(0), 6.0, 1.0, dt=1e-5)
    assert len(fl.tree) > 1000 and fl.tree.nesting_ok()
    assert np.all(np.diff(fl.root_position) >= 0)
    empty = lf.forested_line(RngStream(0), 6.0, 0.0)
    assert len(empty.tree) == 0 and empty.length == 0
    with pytest.raises(ValueError):
        lf.forested_line(RngStream(0), 8.0, 1.0)


def test_forest_areas_deterministic_in_stream():
    a = lf.forested_line(RngStream(3, 1), 6.0, 0.1, areas=True).areas
    b = lf.forested_line(RngStream(3, 1), 6.0, 0.1, areas=True).areas
    assert np.array_equal(a, b) and np.all(a >= 0)


def test_forest_jump_index():
    lines = [lf.forested_line(RngStream(1, k), 6.0, 1.0) for k in range(50)]
    est = lf.jump_tail_index(lines, 20 * 1e-4 ** (2 / 3))
    assert abs(est.alpha_hat - 1.5) < 0.1


def test_inverse_local_time_brownian():
    est = lf.inverse_local_time_index(RngStream(2), 1.0, horizon=50000, paths=200)
    assert abs(est.alpha_hat - 0.5) < 0.05


def test_inverse_local_time_near_two_and_errors():
    est = lf.inverse_local_time_index(RngStream(2), 1.95, horizon=20000, paths=50)
    assert est.alpha_hat < 0.2
    with pytest.raises(ValueError):
        lf.inverse_local_time_index(RngStream(0), 2.0)


def test_conditioned_positive_short_horizon():
    r = lf.conditioned_positive_check(RngStream(4), 6.0, paths=300)
    assert r["all_nonnegative"] and r["pass"]


def test_acceptance_rate_decays():
    rates = [lf.acceptance_rate(RngStream(5), 6.0, h, trials=200) for h in (0.1, 10.0)]
    assert rates[1] < rates[0]


def test_conditioning_budget():
    with pytest.raises(gff.ResourceError):
        lf.conditioned_positive_check(RngStream(6), 6.0, horizon=50.0, dt=0.1, paths=100,
                                      budget=50)


def _carrier(n=32, gamma=1.0):
    return gff.lqg_area_measure(gff.sample_gff(RngStream(7), n), gamma)


def test_atom_count_and_tail():
    c = _carrier(gamma=math.sqrt(2))
    counts = [len(lf.dual_atomic_measure(RngStream(8, k), c, math.sqrt(8), 1.0).masses)
              for k in range(400)]
    lam = 2 * c.mass()  # theta = 1/2: int_1^inf u^(-3/2) du = 2
    assert abs(np.mean(counts) - lam) < 4 * math.sqrt(lam / 400)
    big = lf.dual_atomic_measure(RngStream(9), c, math.sqrt(8), 1e-10)
    assert len(big.masses) > 20000
    assert abs(hill_estimator(big.masses, 10000).alpha_hat - 0.5) < 0.05


def test_empty_carrier_and_errors():
    c = gff.LqgMeasureGrid(1.0, 3.0, np.zeros((4, 4)))
    assert len(lf.dual_atomic_measure(RngStream(0), c, 4.0, 0.1).masses) == 0
    with pytest.raises(ValueError):
        lf.dual_atomic_measure(RngStream(0), c, 4.0, 0.0)
    with pytest.raises(ValueError):
        lf.dual_atomic_measure(RngStream(0), c, 3.0, 0.1)


def test_laplace_phi_zero_and_negative():
    c = _carrier(gamma=4 / math.sqrt(6))
    r = lf.laplace_duality_test(c, math.sqrt(6), [0.0], trials=1000)
    assert r["rows"][0]["monte_carlo"] == 1.0 and r["rows"][0]["exact"] == 1.0
    with pytest.raises(ValueError):
        lf.laplace_duality_test(c, math.sqrt(6), [-1.0], trials=10)


def test_laplace_duality_small():
    c = _carrier(gamma=4 / math.sqrt(6))
    r = lf.laplace_duality_test(c, math.sqrt(6), [0.5, 1.0, 2.0], trials=200000)
    assert r["pass"]


def test_moment_formula_small():
    c = _carrier(gamma=4 / math.sqrt(6))
    assert lf.moment_check(c, math.sqrt(6), trials=50000)["pass"]

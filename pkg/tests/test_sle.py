import math

import numpy as np
import pytest

from matelab import sle
from matelab.rng import RngStream
from matelab.stochastic import TimeSeries


def test_dimension_formulas():
    assert sle.forward_dimension(8 / 3, 0) == pytest.approx(2.5)
    assert sle.reverse_dimension(8 / 3, 8 / 3) == pytest.approx(1.5)
    assert sle.forward_dimension(2, 0) == 3.0
    assert sle.reverse_dimension(2, 2) == 1.0
    # a forward gap with rho and a reverse gap with rho + 4 share their dimension
    for k in (1.0, 2.0, 8 / 3, 3.5):
        for rho in (-1.5, 0.0, 2.0):
            assert sle.forward_dimension(k, rho) == pytest.approx(sle.reverse_dimension(k, rho + 4))


def test_forward_pair_identities():
    p = sle.sample_chordal_driving(RngStream(0), 8 / 3, 0.0, "forward", 2000, 1e-3)
    assert p.W.values[0] == 0
    assert np.all(p.gap >= 0)
    dv = np.diff(p.V.values)
    assert np.allclose(dv, 2 * 1e-3 / p.gap[:-1], rtol=1e-12)
    assert np.allclose(p.W.values[1:], (p.V.values - p.gap)[1:], atol=1e-12)


@pytest.mark.parametrize("k,rho,d,target", [
    (8 / 3, 0.0, "forward", 2.5),
    (8 / 3, 8 / 3, "reverse", 1.5),
    (2.0, 0.0, "forward", 3.0),
    (2.0, 2.0, "reverse", 1.0),
])
def test_gap_dimension(k, rho, d, target):
    est, se = sle.estimate_gap_dimension(RngStream(1), k, rho, d, paths=400)
    assert abs(est - target) < 0.05


def test_critical_forward_gap_stays_positive():
    k = 8 / 3
    for s in range(5):
        p = sle.sample_chordal_driving(RngStream(s), k, k / 2 - 2, "forward", 5000, 1e-3)
        assert p.gap.min() > 0


def test_exponential_gap_is_exact():
    t = np.arange(1001) * 0.01
    gap = np.exp(t)
    W = TimeSeries(0.01, np.zeros_like(t))
    V = TimeSeries(0.01, 2 * gap)  # kappa = 4, so gap / sqrt(kappa) = e^t
    p = sle.DrivingPair(W, V, 4.0, 0.0, "forward")
    est, _ = sle.gap_dimension_estimate(p, clock="time")
    assert est == pytest.approx(4.0, abs=1e-12)


def test_gap_dimension_error_when_gap_vanishes():
    z = TimeSeries(0.1, np.zeros(10))
    with pytest.raises(ValueError):
        sle.gap_dimension_estimate(sle.DrivingPair(z, z, 2.0, 0.0, "forward"))


def test_parameter_errors():
    with pytest.raises(ValueError):
        sle.sample_chordal_driving(RngStream(0), 2.0, -2.0, "forward", 10, 0.1)
    with pytest.raises(ValueError):
        sle.sample_chordal_driving(RngStream(0), 4.0, 0.0, "forward", 10, 0.1)
    with pytest.raises(ValueError):
        sle.reverse_forward_gap_test(8 / 3, 8 / 3 / 2 + 2)
    with pytest.raises(ValueError):
        sle.sample_radial_theta(RngStream(0), 0.0, 0.0, "forward_radial", 10, 0.1)
    with pytest.raises(ValueError):
        sle.sample_radial_theta(RngStream(0), 2.0, -2.0, "forward_radial", 10, 0.1)
    with pytest.raises(ValueError):
        sle.sample_radial_theta(RngStream(0), 4.0, 6.0, "reverse_interior", 10, 0.1)


def test_reverse_forward_gap_kappa2_is_plain_sle():
    r = sle.reverse_forward_gap_test(2.0, 2.0, trials=500, seed=RngStream(3))
    assert r["rho_forward"] == 0.0
    assert r["pass"]


def test_theta_stays_in_interval():
    for var, top in (("forward_radial", 2 * math.pi), ("reverse_interior", math.pi)):
        th = sle.sample_radial_theta(RngStream(4), 8 / 3, 0.0, var, 20000, 1e-3)
        assert th.theta.values.min() > 0 and th.theta.values.max() < top


def test_theta_reverse_interior_chi2_kappa4():
    x = sle.theta_stationary_samples(RngStream(5), 4.0, 0.0, "reverse_interior", chains=2000)
    assert sle.theta_chi2_test(x, 4.0, 0.0, "reverse_interior")["pass"]


def test_theta_forward_boundary_exponent():
    assert abs(sle.theta_boundary_exponent(RngStream(6), 8 / 3, 0.0) - 1.5) < 0.15

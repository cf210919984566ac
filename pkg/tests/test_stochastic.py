import math

import numpy as np
import pytest

from matelab.rng import RngStream
from matelab.stochastic import (BesselParams, StableParams, TimeSeries, besq_additivity,
                                covariance_rate, excursion_constructors_ks,
                                excursion_lifetimes, excursion_maxima, hill_estimator,
                                log_qv_reparam, pooled_drift, sample_bessel, sample_bessel_excursion,
                                sample_bm, sample_correlated_bm, sample_stable,
                                stable_self_similarity)


def test_stream_determinism_and_independence():
    a = RngStream(7, 3).gen.standard_normal(100)
    b = RngStream(7, 3).gen.standard_normal(100)
    c = RngStream(7, 4).gen.standard_normal(100)
    assert np.array_equal(a, b)
    assert abs(np.corrcoef(a, c)[0, 1]) < 0.4
    s = RngStream(7, 3)
    c0 = s.counter
    s.gen.random(10)
    assert s.counter > c0


def test_bm_zero_variance():
    assert np.array_equal(sample_bm(RngStream(0), 3, 1.0, 0.0, 0.0).values, [0, 0, 0])


def test_bm_drift_clt():
    s = sample_bm(RngStream(1), 10 ** 6, 1e-4, drift=2.0)
    T = (len(s) - 1) * 1e-4
    assert abs(s.values[-1] / T - 2) < 3 / math.sqrt(T)


def test_bm_deterministic():
    a = sample_bm(RngStream(5, 1), 1000, 0.1)
    b = sample_bm(RngStream(5, 1), 1000, 0.1)
    assert np.array_equal(a.values, b.values)


@pytest.mark.parametrize("kw", [dict(n=1, dt=1.0), dict(n=5, dt=0.0), dict(n=5, dt=1.0, var_rate=-1)])
def test_bm_errors(kw):
    with pytest.raises(ValueError):
        sample_bm(RngStream(0), **kw)


@pytest.mark.parametrize("kp,target", [(8.0, 0.0), (6.0, 0.5), (16 / 3, math.sqrt(2) / 2)])
def test_correlated_covariance(kp, target):
    est, se = covariance_rate(sample_correlated_bm(RngStream(2), 10 ** 6, 0.01, kp))
    assert abs(est - target) < 4 * se


def test_correlated_errors():
    with pytest.raises(ValueError):
        sample_correlated_bm(RngStream(0), 10, 1.0, 4.0)
    with pytest.raises(ValueError):
        sample_correlated_bm(RngStream(0), 10, 1.0, 9.0)
    sample_correlated_bm(RngStream(0), 10, 1.0, 9.0, extrapolate=True)


def test_bessel_dim2_stays_positive():
    for s in range(10):
        x = sample_bessel(RngStream(s), BesselParams(2.0, 1.0), 2000, 1e-3)
        assert x.values.min() > 0


def test_bessel_dim3_from_zero_positive():
    x = sample_bessel(RngStream(0), BesselParams(3.0, 0.0), 2000, 1e-3)
    assert x.values[0] == 0 and x.values[1:].min() > 0


def test_bessel_dim1_absorbs():
    # 10^4 steps over time 10^6; a miss has probability about 8e-4 per run
    for s in range(100):
        x = sample_bessel(RngStream(s), BesselParams(1.0, 1.0), 10 ** 4, 100.0)
        hit = x.meta["hit_index"]
        assert hit is not None
        assert np.all(x.values[hit:] == 0)


def test_bessel_errors():
    with pytest.raises(ValueError):
        sample_bessel(RngStream(0), BesselParams(2.5, 1.0), 10, 0.1, zero_policy="reflect")
    with pytest.raises(ValueError):
        sample_bessel(RngStream(0), BesselParams(-1.0, 1.0), 10, 0.1, zero_policy="reflect")
    with pytest.raises(ValueError):
        BesselParams(1.0, -1.0)


def test_log_qv_drift_bes2_and_bes3():
    from matelab.stochastic import bessel_qv_drift
    d2, se2, _ = bessel_qv_drift(RngStream(3), 2.0, 10 ** 5)
    d3, se3, _ = bessel_qv_drift(RngStream(3), 3.0, 10 ** 5)
    assert abs(d2) < 4 * se2
    assert abs(d3 - 0.5) < 4 * se3


def test_log_qv_converse_exponential_bm():
    # exp(B_u + u): the log has unit drift per unit of quadratic variation.
    # 400 paths of time 100 pool to QV 4e4, stderr 0.005.  The realized clock
    # overstates QV by the factor 1 + du, so du stays small.
    reps = []
    for k in range(400):
        b = sample_bm(RngStream(4, k), 100001, 1e-3, drift=1.0)
        reps.append(log_qv_reparam(TimeSeries(1e-3, np.exp(b.values)))[0])
    drift, se = pooled_drift(reps)
    assert abs(drift - 1) < 0.02


def test_log_qv_exact_exponential():
    # deterministic e^t on the time clock: drift 1, so delta = 2 * 1 + 2 = 4
    x = TimeSeries(0.01, np.exp(np.arange(1001) * 0.01))
    r, drift = log_qv_reparam(x, clock="time")
    assert drift == pytest.approx(1.0, abs=1e-12)
    assert 2 * drift + 2 == pytest.approx(4.0)
    with pytest.raises(ValueError):
        log_qv_reparam(TimeSeries(0.1, np.array([1.0, 0.0, 1.0])))


def test_excursion_lifetime_tail():
    t = excursion_lifetimes(RngStream(5), 1.0, 1.0, 10 ** 5)
    est = hill_estimator(t, 10 ** 4)
    assert abs(est.alpha_hat - 0.5) < 0.1  # density exponent -1.5


def test_excursion_maxima_tail():
    m = excursion_maxima(RngStream(6), 1.0, 1.0, 20000)
    est = hill_estimator(m, 2000)
    assert abs(est.alpha_hat - 1.0) < 0.1  # density exponent delta - 3 = -2


def test_excursion_constructors_agree():
    assert excursion_constructors_ks(RngStream(7), 1.0, size=500)["pass"]


def test_excursion_shape_and_errors():
    for method in ("bridge", "join"):
        e = sample_bessel_excursion(RngStream(8), 1.0, 1.0, n=200, method=method)
        assert e.values[0] == 0 and e.values[-1] == 0 and e.values[1:-1].min() > 0
    with pytest.raises(ValueError):
        sample_bessel_excursion(RngStream(0), 2.0, 1.0)


def test_stable_hill_and_sign():
    _, j = sample_stable(RngStream(9), StableParams(1.5), 10 ** 6, 1.0)
    assert abs(hill_estimator(j[:, 1], 2000).alpha_hat - 1.5) < 0.1
    _, j = sample_stable(RngStream(9), StableParams(1.9, -1), 10 ** 4, 1.0)
    assert j.shape[0] > 0 and np.all(j[:, 1] < 0)


def test_stable_degenerate_and_errors():
    s, j = sample_stable(RngStream(0), StableParams(1.5, 1, 0.0), 100, 1.0)
    assert np.all(s.values == 0) and len(j) == 0
    with pytest.raises(ValueError):
        StableParams(2.0)


def test_hill_pareto_grid():
    n = 10 ** 4
    u = (np.arange(1, n + 1) / n) ** -0.5
    assert abs(hill_estimator(u, 1000).alpha_hat - 2.0) < 0.1
    with pytest.raises(ValueError):
        hill_estimator(np.ones(100), 20)
    with pytest.raises(ValueError):
        hill_estimator(u[:5], 10)


def test_besq_additivity():
    assert besq_additivity(RngStream(10), 1.0, 1.5, trials=1000)["pass"]


def test_stable_self_similarity():
    assert stable_self_similarity(RngStream(11), 1.5, n=64, trials=500)["pass"]

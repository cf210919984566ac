"""Samplers and estimators for Brownian, Bessel, excursion and stable paths."""
from dataclasses import dataclass, field
import math

import numpy as np
from scipy import special, stats

from .rng import RngStream, as_stream


# -- containers ---------------------------------------------------------------

@dataclass
class TimeSeries:
    dt: float
    values: np.ndarray
    meta: dict = field(default_factory=dict)
    times: np.ndarray = None  # only for non-uniform (e.g. QV-clock) grids

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.size == 0:
            raise ValueError("empty series")
        if not self.dt > 0:
            raise ValueError("dt must be positive")

    @property
    def t(self):
        if self.times is not None:
            return self.times
        return self.dt * np.arange(len(self.values))

    def __len__(self):
        return len(self.values)


@dataclass
class CorrelatedPair:
    L: TimeSeries
    R: TimeSeries
    kappa_prime: float

    def __post_init__(self):
        if len(self.L) != len(self.R) or self.L.dt != self.R.dt:
            raise ValueError("L and R must share dt and length")

    @property
    def target_cov_rate(self):
        return -math.cos(4 * math.pi / self.kappa_prime)


@dataclass(frozen=True)
class BesselParams:
    delta: float
    x0: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.delta):
            raise ValueError("delta must be finite")
        if self.x0 < 0:
            raise ValueError("x0 must be nonnegative")


@dataclass
class Excursion:
    dt: float
    values: np.ndarray
    delta: float

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v[0] != 0 or v[-1] != 0 or np.any(v[1:-1] <= 0):
            raise ValueError("excursion must vanish exactly at its ends and be positive inside")
        self.values = v

    @property
    def lifetime(self):
        return self.dt * (len(self.values) - 1)

    @property
    def maximum(self):
        return float(self.values.max())


@dataclass(frozen=True)
class StableParams:
    alpha: float
    jump_sign: int = 1
    scale: float = 1.0

    def __post_init__(self):
        if not (1 < self.alpha < 2):
            raise ValueError("alpha must lie in (1, 2)")
        if self.jump_sign not in (1, -1):
            raise ValueError("jump_sign must be +1 or -1")
        if self.scale < 0:
            raise ValueError("scale must be nonnegative")


@dataclass(frozen=True)
class TailEstimate:
    alpha_hat: float
    k_used: int
    stderr: float


# -- Brownian motion -------------------------------------------------------

def sample_bm(stream, n, dt, drift=0.0, var_rate=1.0):
    """Brownian path with n values (n - 1 Gaussian increments), starting at 0."""
    if n < 2:
        raise ValueError("n must be at least 2")
    if not dt > 0:
        raise ValueError("dt must be positive")
    if var_rate < 0:
        raise ValueError("var_rate must be nonnegative")
    g = as_stream(stream).gen
    inc = drift * dt + math.sqrt(var_rate * dt) * g.standard_normal(n - 1)
    vals = np.concatenate([[0.0], np.cumsum(inc)])
    return TimeSeries(dt, vals, {"process": "bm", "drift": drift, "var_rate": var_rate})


def correlation_for(kappa_prime, extrapolate=False):
    if kappa_prime <= 4:
        raise ValueError("kappa_prime must exceed 4 (kappa_prime = 4 is the perfectly correlated limit)")
    if kappa_prime > 8 and not extrapolate:
        raise ValueError("kappa_prime > 8 requires extrapolate=True")
    return -math.cos(4 * math.pi / kappa_prime)


def sample_correlated_bm(stream, n, dt, kappa_prime, extrapolate=False):
    """(L, R) with unit variance rates and covariance rate -cos(4 pi / kappa')."""
    rho = correlation_for(kappa_prime, extrapolate)
    s = as_stream(stream)
    z1 = s.child(0).gen.standard_normal(n - 1)
    z2 = s.child(1).gen.standard_normal(n - 1)
    sd = math.sqrt(dt)
    dL = sd * z1
    dR = sd * (rho * z1 + math.sqrt(1 - rho * rho) * z2)
    L = np.concatenate([[0.0], np.cumsum(dL)])
    R = np.concatenate([[0.0], np.cumsum(dR)])
    meta = {"process": "correlated_bm", "kappa_prime": kappa_prime}
    return CorrelatedPair(TimeSeries(dt, L, dict(meta)), TimeSeries(dt, R, dict(meta)), kappa_prime)


def covariance_rate(pair: CorrelatedPair):
    """Empirical covariance rate of increments and its CLT standard error."""
    dL = np.diff(pair.L.values)
    dR = np.diff(pair.R.values)
    dt = pair.L.dt
    prod = (dL - dL.mean()) * (dR - dR.mean())
    est = prod.mean() / dt
    se = prod.std(ddof=1) / math.sqrt(len(prod)) / dt
    return est, se


# -- squared Bessel transitions ------------------------------------------

def besq_step(gen, z, delta, dt, absorb):
    """One exact transition of BESQ^delta over time dt (dt may be an array).

    Reflecting (or never-hitting) transitions are noncentral chi-square.  For
    delta < 2 with absorption at 0 the killed kernel is a Gamma/Poisson
    mixture: with s = 1 - delta/2 and mu = z / (2 dt), draw G ~ Gamma(s); the
    path dies iff G > mu, else Z' = 2 dt Gamma(N + 1) with N ~ Poisson(mu - G).
    """
    z = np.asarray(z, dtype=float)
    dt = np.broadcast_to(np.asarray(dt, dtype=float), z.shape)
    if delta >= 2 or not absorb:
        return dt * gen.noncentral_chisquare(delta, z / dt)
    s = 1 - delta / 2
    mu = z / (2 * dt)
    G = gen.gamma(s, size=z.shape)
    alive = (z > 0) & (G <= mu)
    out = np.zeros_like(z)
    if alive.any():
        N = gen.poisson(mu[alive] - G[alive])
        out[alive] = 2 * dt[alive] * gen.gamma(N + 1.0)
    return out


def _check_policy(delta, zero_policy):
    if zero_policy not in ("absorb", "reflect"):
        raise ValueError("zero_policy must be 'absorb' or 'reflect'")
    if zero_policy == "reflect":
        if delta >= 2:
            raise ValueError("reflect requested with delta >= 2: the process never hits 0")
        if delta <= 0:
            raise ValueError("delta <= 0 requires zero_policy='absorb'")


def sample_bessel_paths(stream, delta, x0, n, dt, zero_policy="absorb", clock="time", paths=1):
    """Array of BES^delta paths, shape (paths, n), plus the time grid(s).

    clock='time' uses a uniform grid of step dt.  clock='qv' takes steps of
    length dt * X_k^2, i.e. a constant quadratic-variation step dt for log X;
    the returned times then have shape (paths, n).
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if not dt > 0:
        raise ValueError("dt must be positive")
    _check_policy(delta, zero_policy)
    absorb = zero_policy == "absorb"
    g = as_stream(stream).gen
    Z = np.empty((paths, n))
    Z[:, 0] = x0 * x0
    if clock == "time":
        for k in range(1, n):
            Z[:, k] = besq_step(g, Z[:, k - 1], delta, dt, absorb)
        return np.sqrt(Z), dt * np.arange(n)
    if clock != "qv":
        raise ValueError("clock must be 'time' or 'qv'")
    if x0 <= 0:
        raise ValueError("the qv clock needs x0 > 0")
    # scale invariance: Z_{k+1} = Z_k * (transition of BESQ from 1 over time dt)
    T = np.zeros((paths, n))
    logZ = np.zeros((paths, n))
    logZ[:, 0] = 2 * math.log(x0)
    for k in range(1, n):
        r = besq_step(g, np.ones(paths), delta, dt, absorb)
        with np.errstate(divide="ignore"):
            logZ[:, k] = logZ[:, k - 1] + np.log(r)
        T[:, k] = T[:, k - 1] + dt * np.exp(logZ[:, k - 1])
    return np.exp(logZ / 2), T


def sample_bessel(stream, params: BesselParams, n, dt, zero_policy="absorb", clock="time"):
    """A single BES^delta path X = sqrt(Z) from exact BESQ transitions."""
    X, T = sample_bessel_paths(stream, params.delta, params.x0, n, dt, zero_policy, clock, 1)
    meta = {"process": "bessel", "delta": params.delta, "x0": params.x0,
            "zero_policy": zero_policy, "clock": clock}
    hit = np.flatnonzero(X[0] == 0)
    hit = hit[hit > 0] if params.x0 > 0 else hit
    meta["hit_index"] = int(hit[0]) if hit.size else None
    return TimeSeries(dt, X[0], meta, None if clock == "time" else T[0])


def log_qv_reparam(series: TimeSeries, qv_step=None, clock="realized"):
    """Reparameterize log(series) by its quadratic variation.

    Returns (reparameterized series, drift per unit quadratic variation).  With
    clock='realized' the QV is the running sum of squared log-increments;
    clock='time' treats the series' own time axis as the QV clock.  The output
    is resampled (linear interpolation) onto a grid whose QV per step is
    qv_step, which defaults to the average per-step QV of the input.
    """
    x = np.asarray(series.values, dtype=float)
    if np.any(~(x > 0)):
        raise ValueError("log_qv_reparam needs a strictly positive series")
    if len(x) < 2:
        raise ValueError("need at least two values")
    y = np.log(x)
    if clock == "realized":
        s = np.concatenate([[0.0], np.cumsum(np.diff(y) ** 2)])
    elif clock == "time":
        s = series.t - series.t[0]
    else:
        raise ValueError("clock must be 'realized' or 'time'")
    S = s[-1]
    if not S > 0:
        raise ValueError("series has zero quadratic variation")
    step = S / (len(x) - 1) if qv_step is None else float(qv_step)
    u = np.arange(0.0, S * (1 + 1e-12), step)
    yi = np.interp(u, s, y)
    drift = (y[-1] - y[0]) / S
    meta = {"process": "log_qv_reparam", "qv_total": S, "log_increment": y[-1] - y[0],
            "source": series.meta.get("process")}
    return TimeSeries(step, yi, meta), drift


def pooled_drift(reparams):
    """Combine log_qv_reparam outputs of independent paths into one estimate.

    Returns (drift, stderr) where the stderr is the Brownian CLT value
    1/sqrt(total QV)."""
    num = sum(r.meta["log_increment"] for r in reparams)
    S = sum(r.meta["qv_total"] for r in reparams)
    return num / S, 1 / math.sqrt(S)


def bessel_qv_drift(stream, delta, n_effective, qv_step=0.04, fine=8, path_len=2000):
    """Drift of log BES^delta on its QV clock from many independent paths.

    Paths are sampled on a QV clock of step qv_step/fine and then resampled to
    the coarser step, so n_effective counts steps of the reparameterized
    series.  Returns (drift, stderr, n_effective_used)."""
    h = qv_step / fine
    raw = n_effective * fine
    n_paths = max(1, int(math.ceil(raw / (path_len - 1))))
    s = as_stream(stream)
    X, _ = sample_bessel_paths(s, delta, 1.0, path_len, h, "absorb", "qv", n_paths)
    reps = []
    used = 0
    for row in X:
        r, _ = log_qv_reparam(TimeSeries(h, row), qv_step=qv_step)
        reps.append(r)
        used += len(r) - 1
    d, se = pooled_drift(reps)
    return d, se, used


# -- reversal -----------------------------------------------------------------

def _ks_report(a, b, alpha):
    res = stats.ks_2samp(a, b)
    n, m = len(a), len(b)
    crit = stats.kstwo.ppf(1 - alpha, round(n * m / (n + m)))
    return {"statistic": float(res.statistic), "critical_value": float(crit),
            "p_value": float(res.pvalue), "n": n, "m": m, "pass": bool(res.pvalue > alpha)}


def reversal_marginals(stream, delta, delta_tilde=None, x0=1.0, trials=2000, dt=0.005, cap=20.0,
                       quantiles=(0.1, 0.3, 0.5, 0.7, 0.9), alpha=0.01):
    """KS comparison of a time-reversed BES^delta with BES^(4 - delta).

    BES^delta (delta < 2) is run from x0 until it is absorbed at 0 (time tau);
    BES^delta_tilde is run from 0 and stopped at its last visit L to x0.  On the
    events tau <= cap and L <= cap the reversed path X_{tau - t} and the
    forward path are compared at matched times t (quantiles of tau), each
    side restricted to lifetimes exceeding t.
    """
    if delta >= 2:
        raise ValueError("delta must be < 2 so the process reaches 0")
    if delta_tilde is None:
        delta_tilde = 4 - delta
    s = as_stream(stream)
    n = int(round(cap / dt)) + 1
    X, _ = sample_bessel_paths(s.child(0), delta, x0, n, dt, "absorb", "time", trials)
    dead = X[:, 1:] == 0
    has = dead.any(axis=1)
    tau_idx = np.where(has, dead.argmax(axis=1) + 1, -1)
    keep = tau_idx > 0
    Xk, tk = X[keep], tau_idx[keep]
    Y, _ = sample_bessel_paths(s.child(1), delta_tilde, 0.0, n, dt, "absorb", "time", trials)
    below = Y <= x0
    last = np.where(below.any(axis=1), n - 1 - below[:, ::-1].argmax(axis=1), 0)
    end = Y[:, -1]
    u = s.child(2).gen.random(trials)
    with np.errstate(divide="ignore"):
        p_return = np.where(end > x0, (x0 / np.maximum(end, 1e-300)) ** (delta_tilde - 2), 1.0)
    okY = (last < n - 1) & (u >= p_return)
    Yk, lk = Y[okY], last[okY]
    times = np.quantile(tk * dt, quantiles)
    reports = []
    for t in times:
        j = int(round(t / dt))
        a_rows = tk > j
        a = Xk[a_rows, tk[a_rows] - j]
        b_rows = lk > j
        b = Yk[b_rows, j]
        rep = _ks_report(a, b, alpha)
        rep["time"] = float(j * dt)
        reports.append(rep)
    return {"delta": delta, "delta_tilde": delta_tilde, "kept_reverse": int(keep.sum()),
            "kept_forward": int(okY.sum()), "checks": reports,
            "pass": all(r["pass"] for r in reports)}


# -- excursions ---------------------------------------------------------------

def excursion_lifetimes(stream, delta, min_lifetime, size):
    """Lifetimes from the density proportional to t^(delta/2 - 2) on [min_lifetime, inf)."""
    if delta >= 2:
        raise ValueError("delta must be < 2")
    if not min_lifetime > 0:
        raise ValueError("min_lifetime must be positive")
    idx = 1 - delta / 2  # tail index
    u = as_stream(stream).gen.random(size)
    with np.errstate(over="ignore"):
        T = min_lifetime * (1 - u) ** (-1 / idx)
    if not np.all(np.isfinite(T)):
        raise OverflowError("excursion lifetime overflows; delta is too close to 2")
    return T


def besq_bridge_00(gen, d, T, n, size=None):
    """BES^d bridges from 0 to 0 of length T on n + 1 points (exact on the grid).

    Uses bridge_t = (1 - t/T) * X(tT/(T - t)) with X a BES^d from 0.  With
    size given, returns an array of shape (size, n + 1)."""
    rows = 1 if size is None else size
    t = np.linspace(0.0, T, n + 1)
    s = t[1:-1] * T / (T - t[1:-1])
    ds = np.diff(np.concatenate([[0.0], s]))
    Z = np.zeros((rows, n + 1))
    z = np.zeros(rows)
    for i, h in enumerate(ds):
        z = h * gen.noncentral_chisquare(d, z / h)
        Z[:, i + 1] = z
    vals = np.zeros((rows, n + 1))
    vals[:, 1:-1] = (1 - t[1:-1] / T) * np.sqrt(Z[:, 1:-1])
    return vals[0] if size is None else vals


def first_passage_times(gen, d, level, dt, size, max_steps=10 ** 7):
    """Grid first-passage times of BES^d from 0 above level (vectorized)."""
    z = np.zeros(size)
    T = np.full(size, np.nan)
    L2 = level * level
    k = 0
    live = np.arange(size)
    while live.size:
        k += 1
        if k > max_steps:
            raise RuntimeError("first passage not reached")
        z = dt * gen.noncentral_chisquare(d, z / dt)
        hit = z >= L2
        T[live[hit]] = k * dt
        live, z = live[~hit], z[~hit]
    return T


def _first_passage_path(gen, d, level, dt, max_steps=10 ** 7):
    out = [0.0]
    z = 0.0
    L2 = level * level
    while len(out) < max_steps:
        z = float(dt * gen.noncentral_chisquare(d, z / dt))
        if z >= L2:
            out.append(level)
            return np.array(out)
        out.append(math.sqrt(z))
    raise RuntimeError("first passage not reached")


def excursion_maxima_truncated(stream, delta, min_max, size):
    """Maxima from the density proportional to m^(delta - 3) on [min_max, inf)."""
    u = as_stream(stream).gen.random(size)
    return min_max * (1 - u) ** (-1 / (2 - delta))


def excursion_shape_ratios(stream, delta, size, method="bridge", n=2000, dt=1e-4, min_max=0.5):
    """Samples of R = lifetime / maximum^2 on the event {lifetime >= 1}.

    Bridge form: unit-length bridges (R does not depend on the lifetime by
    scaling).  Join form: maxima from the truncated m^(delta - 3) law on
    [min_max, inf) with unit-level first passages rescaled by M^2, kept when
    the lifetime is at least 1.  min_max = 0.5 loses only excursions with
    R > 4, which is negligible."""
    if delta >= 2:
        raise ValueError("delta must be < 2")
    s = as_stream(stream)
    d = 4 - delta
    if method == "bridge":
        B = besq_bridge_00(s.child(0).gen, d, 1.0, n, size)
        return 1.0 / B.max(axis=1) ** 2
    if method != "join":
        raise ValueError("method must be 'bridge' or 'join'")
    out = []
    got = 0
    k = 0
    while got < size:
        batch = max(64, int(1.5 * (size - got) / min_max))
        R = (first_passage_times(s.child(1, k).gen, d, 1.0, dt, batch)
             + first_passage_times(s.child(2, k).gen, d, 1.0, dt, batch))
        M = excursion_maxima_truncated(s.child(3, k), delta, min_max, batch)
        R = R[M * M * R >= 1]
        out.append(R)
        got += R.size
        k += 1
    return np.concatenate(out)[:size]


def excursion_maxima(stream, delta, min_lifetime, size, n=200):
    """Maxima of bridge-constructed excursions with truncated lifetimes."""
    s = as_stream(stream)
    T = excursion_lifetimes(s.child(0), delta, min_lifetime, size)
    B = besq_bridge_00(s.child(1).gen, 4 - delta, 1.0, n, size)
    return np.sqrt(T) * B.max(axis=1)


def excursion_constructors_ks(stream, delta=1.0, size=2000, alpha=0.01):
    s = as_stream(stream)
    a = excursion_shape_ratios(s.child(0), delta, size, "bridge")
    b = excursion_shape_ratios(s.child(1), delta, size, "join")
    return _ks_report(a, b, alpha)


def sample_bessel_excursion(stream, delta, min_lifetime, n=1000, method="bridge", min_max=None):
    """One excursion from the truncated BES^delta excursion measure (delta < 2).

    method='bridge': lifetime from the truncated power law, body a BES^(4-delta)
    bridge from 0 to 0 on n steps.  method='join': maximum M from the density
    proportional to m^(delta - 3) on [min_max, inf), then two independent
    BES^(4-delta) paths run to M joined back to back.
    """
    if delta >= 2:
        raise ValueError("delta must be < 2")
    s = as_stream(stream)
    d = 4 - delta
    if method == "bridge":
        T = float(excursion_lifetimes(s.child(0), delta, min_lifetime, 1)[0])
        vals = besq_bridge_00(s.child(1).gen, d, T, n)
        return Excursion(T / n, vals, delta)
    if method != "join":
        raise ValueError("method must be 'bridge' or 'join'")
    m0 = min_max if min_max is not None else math.sqrt(min_lifetime)
    M = float(excursion_maxima_truncated(s.child(0), delta, m0, 1)[0])
    dt = M * M / n
    up = _first_passage_path(s.child(1).gen, d, M, dt)
    down = _first_passage_path(s.child(2).gen, d, M, dt)
    vals = np.concatenate([up, down[::-1][1:]])
    return Excursion(dt, vals, delta)


# -- stable processes -------------------------------------------------------

def _stable_increments(gen, alpha, size):
    """Standard totally skewed (beta = 1) alpha-stable variates with zero mean."""
    return stats.levy_stable.rvs(alpha, 1.0, size=size, random_state=gen)


def sample_stable(stream, params: StableParams, n, dt, cutoff=None):
    """Totally asymmetric alpha-stable path with n values.

    Increments over dt are exact.  An increment whose magnitude exceeds
    cutoff (default 5 scale dt^(1/alpha)) in the jump direction is logged as a
    single jump; at that size the increment is dominated by its largest jump.
    Returns (series, jumps) where jumps is an array of (time, size) rows.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    a, sign, sc = params.alpha, params.jump_sign, params.scale
    if sc == 0:
        return TimeSeries(dt, np.zeros(n), {"process": "stable", "alpha": a}), np.zeros((0, 2))
    g = as_stream(stream).gen
    inc = sign * sc * dt ** (1 / a) * _stable_increments(g, a, n - 1)
    vals = np.concatenate([[0.0], np.cumsum(inc)])
    if cutoff is None:
        cutoff = 5 * sc * dt ** (1 / a)
    idx = np.flatnonzero(sign * inc > cutoff)
    jumps = np.column_stack([(idx + 1) * dt, inc[idx]])
    meta = {"process": "stable", "alpha": a, "jump_sign": sign, "scale": sc, "cutoff": cutoff}
    return TimeSeries(dt, vals, meta), jumps


def hill_estimator(jumps, k):
    """Hill estimate of the tail index from the k largest magnitudes."""
    x = np.sort(np.abs(np.asarray(jumps, dtype=float).ravel()))[::-1]
    if k < 10:
        raise ValueError("k must be at least 10")
    if len(x) < k + 1:
        raise ValueError("need at least k + 1 observations")
    logs = np.log(x[:k]) - np.log(x[k])
    tot = logs.sum()
    if not tot > 0:
        raise ValueError("Hill estimator undefined: top magnitudes are all equal")
    a = k / tot
    return TailEstimate(float(a), int(k), float(a / math.sqrt(k)))


def censored_pareto_index(values, censored, threshold):
    """MLE of a Pareto tail index from observations above threshold, some of
    which are right-censored (only a lower bound is known)."""
    v = np.asarray(values, dtype=float)
    c = np.asarray(censored, dtype=bool)
    m = v > threshold
    r = int((m & ~c).sum())
    if r < 10:
        raise ValueError("too few uncensored exceedances")
    tot = np.log(v[m] / threshold).sum()
    a = r / tot
    return TailEstimate(float(a), r, float(a / math.sqrt(r)))


def loglog_density_slope(values, lo, hi, bins=20):
    """Slope of the log-density on log-spaced bins in [lo, hi] (least squares)."""
    v = np.asarray(values, dtype=float)
    edges = np.geomspace(lo, hi, bins + 1)
    cnt, _ = np.histogram(v, edges)
    w = np.diff(edges)
    mid = np.sqrt(edges[1:] * edges[:-1])
    ok = cnt > 0
    x, y = np.log(mid[ok]), np.log(cnt[ok] / w[ok])
    wt = np.sqrt(cnt[ok])
    A = np.column_stack([x, np.ones_like(x)]) * wt[:, None]
    coef, *_ = np.linalg.lstsq(A, y * wt, rcond=None)
    return float(coef[0])


# -- distributional self-checks ---------------------------------------------

def besq_additivity(stream, delta1, delta2, z1=0.5, z2=0.5, n=200, dt=0.01, trials=2000,
                    alpha=0.01):
    """BESQ^d1(z1) + BESQ^d2(z2) against BESQ^(d1+d2)(z1+z2) at the final time."""
    if min(delta1, delta2) <= 0:
        raise ValueError("additivity is stated for positive dimensions")
    s = as_stream(stream)

    def run(i, d, z):
        pol = "reflect" if d < 2 else "absorb"  # the SDE solution reflects for 0 < d < 2
        X, _ = sample_bessel_paths(s.child(i), d, math.sqrt(z), n, dt, pol, "time", trials)
        return X[:, -1] ** 2

    X1, X2, X3 = run(0, delta1, z1), run(1, delta2, z2), run(2, delta1 + delta2, z1 + z2)
    return _ks_report(X1 + X2, X3, alpha)


def stable_self_similarity(stream, alpha, c=4.0, n=256, dt=0.01, trials=2000, level=0.01):
    """c^(-1/alpha) X_(c t) against a fresh X_t at t = (n - 1) dt."""
    s = as_stream(stream)
    p = StableParams(alpha)
    a = np.empty(trials)
    b = np.empty(trials)
    for i in range(trials):
        x, _ = sample_stable(s.child(2 * i), p, n, c * dt)
        y, _ = sample_stable(s.child(2 * i + 1), p, n, dt)
        a[i] = c ** (-1 / alpha) * x.values[-1]
        b[i] = y.values[-1]
    return _ks_report(a, b, level)

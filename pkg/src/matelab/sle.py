"""Chordal and radial SLE_kappa(rho) driving processes in one dimension."""
from dataclasses import dataclass
import math

import numpy as np
from scipy import stats
from scipy.integrate import cumulative_trapezoid

from .rng import as_stream
from .stochastic import TimeSeries, log_qv_reparam, pooled_drift, reversal_marginals, \
    sample_bessel_paths


@dataclass
class DrivingPair:
    W: TimeSeries
    V: TimeSeries
    kappa: float
    rho: float
    direction: str

    @property
    def gap(self):
        return self.V.values - self.W.values

    @property
    def t(self):
        return self.W.t


@dataclass
class ThetaProcess:
    theta: TimeSeries
    kappa: float
    rho: float
    variant: str

    @property
    def interval(self):
        return (0.0, 2 * math.pi) if self.variant == "forward_radial" else (0.0, math.pi)


def forward_dimension(kappa, rho):
    return 1 + 2 * (rho + 2) / kappa


def reverse_dimension(kappa, rho_tilde):
    return 1 + 2 * (rho_tilde - 2) / kappa


def _check_kappa(kappa):
    if not (0 < kappa < 4):
        raise ValueError("kappa must lie in (0, 4)")


def sample_chordal_driving_batch(stream, kappa, rho, direction, n, dt, paths=1, clock="time"):
    """Driving pairs (W, V) with a single force point started at 0+.

    The gap (V - W)/sqrt(kappa) is an exact Bessel process (reflecting for a
    forward process below dimension 2, absorbed for a reverse one) and V is
    rebuilt from dV = +-2 dt / (V - W); W = V - gap.
    """
    _check_kappa(kappa)
    if direction == "forward":
        if rho <= -2:
            raise ValueError("forward SLE_kappa(rho) needs rho > -2 (continuation threshold)")
        delta = forward_dimension(kappa, rho)
        policy = "reflect" if delta < 2 else "absorb"
        sign = 1.0
    elif direction == "reverse":
        delta = reverse_dimension(kappa, rho)
        policy = "absorb"
        sign = -1.0
    else:
        raise ValueError("direction must be 'forward' or 'reverse'")
    eps0 = math.sqrt(dt)
    sk = math.sqrt(kappa)
    X, T = sample_bessel_paths(stream, delta, eps0 / sk, n, dt, policy, clock, paths)
    T = np.broadcast_to(T, X.shape)
    out = []
    for x, t in zip(X, T):
        gap = sk * x
        h = np.diff(t)
        with np.errstate(divide="ignore"):
            dv = np.where(gap[:-1] > 0, sign * 2 * h / gap[:-1], 0.0)
        V = eps0 + np.concatenate([[0.0], np.cumsum(dv)])
        W = V - gap
        W[0] = 0.0
        meta = {"process": "sle_driving", "kappa": kappa, "rho": rho, "direction": direction,
                "delta": delta, "clock": clock}
        times = None if clock == "time" else np.array(t)
        out.append(DrivingPair(TimeSeries(dt, W, dict(meta), times),
                               TimeSeries(dt, V, dict(meta), times), kappa, rho, direction))
    return out


def sample_chordal_driving(stream, kappa, rho, direction, n, dt, clock="time"):
    return sample_chordal_driving_batch(stream, kappa, rho, direction, n, dt, 1, clock)[0]


def gap_dimension_estimate(pairs, clock="realized", qv_step=None):
    """Bessel dimension of (V - W)/sqrt(kappa) from its log-QV drift.

    Accepts one DrivingPair or a list (pooled over paths).  Each gap is cut at
    its first zero."""
    if isinstance(pairs, DrivingPair):
        pairs = [pairs]
    reps = []
    for p in pairs:
        g = p.gap / math.sqrt(p.kappa)
        z = np.flatnonzero(~(g > 0))
        m = z[0] if z.size else len(g)
        if m < 2:
            raise ValueError("gap has no positive sub-horizon")
        t = p.W.t[:m]
        ser = TimeSeries(p.W.dt, g[:m], {"process": "gap"}, None if p.W.times is None else t)
        r, _ = log_qv_reparam(ser, qv_step=qv_step, clock=clock)
        reps.append(r)
    drift, se = pooled_drift(reps)
    return 2 * drift + 2, 2 * se


def estimate_gap_dimension(stream, kappa, rho, direction, paths=800, n=5000, h=0.005):
    """Sample QV-clock driving pairs and return (delta_hat, stderr)."""
    pairs = sample_chordal_driving_batch(stream, kappa, rho, direction, n, h, paths, clock="qv")
    return gap_dimension_estimate(pairs)


def reverse_forward_gap_test(kappa, rho_tilde, trials=2000, seed=0, dt=0.005, cap=20.0, alpha=0.01):
    """Time-reversed reverse SLE_kappa(rho~) gaps against forward SLE_kappa(kappa - rho~) gaps.

    Both gaps are measured in units of sqrt(kappa); the reverse force point
    starts at distance sqrt(kappa) and is zipped until it reaches 0."""
    _check_kappa(kappa)
    if rho_tilde >= kappa / 2 + 2:
        raise ValueError("rho_tilde >= kappa/2 + 2: the force point never reaches 0")
    d_rev = reverse_dimension(kappa, rho_tilde)
    d_fwd = forward_dimension(kappa, kappa - rho_tilde)
    rep = reversal_marginals(as_stream(seed), d_rev, d_fwd, 1.0, trials, dt, cap, alpha=alpha)
    rep.update({"kappa": kappa, "rho_tilde": rho_tilde, "rho_forward": kappa - rho_tilde})
    return rep


# -- radial theta processes ------------------------------------------------

def stationary_density(variant, kappa, rho, x):
    """Unnormalized stationary density of the theta process."""
    x = np.asarray(x, dtype=float)
    if variant == "forward_radial":
        return np.sin(x / 2) ** (forward_dimension(kappa, rho) - 1)
    if variant == "reverse_interior":
        return np.sin(x) ** ((8 - 2 * rho) / kappa)
    raise ValueError("unknown variant")


def _theta_check(kappa, rho, variant):
    if not kappa > 0:
        raise ValueError("kappa must be positive")
    if variant == "forward_radial":
        if rho <= -2:
            raise ValueError("forward_radial needs rho > -2")
        return 2 * math.pi
    if variant == "reverse_interior":
        if rho >= kappa / 2 + 4:
            raise ValueError("reverse_interior needs rho < kappa/2 + 4")
        return math.pi
    raise ValueError("variant must be 'forward_radial' or 'reverse_interior'")


def _fold(x, top):
    x = np.abs(x)
    x = np.mod(x, 2 * top)
    return np.where(x > top, 2 * top - x, x)


def _theta_chains(gen, kappa, rho, variant, n, dt, chains, theta0=None, record_every=None):
    top = _theta_check(kappa, rho, variant)
    th = np.full(chains, top / 2) if theta0 is None else np.array(theta0, dtype=float)
    sk = math.sqrt(kappa)
    sd = math.sqrt(dt)
    c = 2 + kappa / 2 - rho / 2
    rec = []
    tiny = 1e-12
    for k in range(n):
        z = gen.standard_normal(chains)
        if variant == "forward_radial":
            th = th + (rho + 2) / 2 / np.tan(th / 2) * dt + sk * sd * z
        else:
            th = th + c * np.sin(2 * th) * dt + sk * np.sin(th) * sd * z
        th = np.clip(_fold(th, top), tiny, top - tiny)
        if record_every and (k + 1) % record_every == 0:
            rec.append(th.copy())
    return th, rec


def sample_radial_theta(stream, kappa, rho, variant, n, dt, theta0=None):
    """Euler-Maruyama path of the theta SDE, folded back into the interval."""
    _theta_check(kappa, rho, variant)
    g = as_stream(stream).gen
    top = 2 * math.pi if variant == "forward_radial" else math.pi
    th = top / 2 if theta0 is None else float(theta0)
    vals = np.empty(n)
    vals[0] = th
    z = g.standard_normal(n - 1)
    sk, sd = math.sqrt(kappa), math.sqrt(dt)
    c = 2 + kappa / 2 - rho / 2
    for k in range(1, n):
        if variant == "forward_radial":
            th = th + (rho + 2) / 2 / math.tan(th / 2) * dt + sk * sd * z[k - 1]
        else:
            th = th + c * math.sin(2 * th) * dt + sk * math.sin(th) * sd * z[k - 1]
        th = float(np.clip(_fold(th, top), 1e-12, top - 1e-12))
        vals[k] = th
    meta = {"process": "theta", "variant": variant, "kappa": kappa, "rho": rho}
    return ThetaProcess(TimeSeries(dt, vals, meta), kappa, rho, variant)


def theta_stationary_samples(stream, kappa, rho, variant, chains=4000, burn=10.0, dt=1e-3):
    """Approximately independent stationary draws: endpoints of independent chains."""
    th, _ = _theta_chains(as_stream(stream).gen, kappa, rho, variant, int(round(burn / dt)), dt, chains)
    return th


def theta_chi2_test(samples, kappa, rho, variant, bins=20, alpha=0.01):
    """Chi-square goodness of fit against the stationary density on equiprobable bins."""
    top = _theta_check(kappa, rho, variant)
    x = np.linspace(0, top, 20001)
    cdf = cumulative_trapezoid(stationary_density(variant, kappa, rho, x), x, initial=0.0)
    cdf /= cdf[-1]
    edges = np.interp(np.linspace(0, 1, bins + 1), cdf, x)
    edges[0], edges[-1] = 0.0, top
    obs, _ = np.histogram(samples, edges)
    exp = np.full(bins, len(samples) / bins)
    stat, p = stats.chisquare(obs, exp)
    crit = stats.chi2.ppf(1 - alpha, bins - 1)
    return {"statistic": float(stat), "critical_value": float(crit), "p_value": float(p),
            "pass": bool(p > alpha), "n": int(len(samples))}


def theta_boundary_exponent(stream, kappa, rho, chains=2000, burn=5.0, dt=1e-3, span=(0.2, 1.5),
                            records=200):
    """Slope of log density against log sin(theta/2) near theta = 0 (forward radial)."""
    g = as_stream(stream).gen
    th, _ = _theta_chains(g, kappa, rho, "forward_radial", int(round(burn / dt)), dt, chains)
    _, rec = _theta_chains(g, kappa, rho, "forward_radial", records * 50, dt, chains, theta0=th,
                           record_every=50)
    s = np.concatenate(rec)
    s = np.minimum(s, 2 * math.pi - s)  # the density is symmetric about pi
    edges = np.geomspace(span[0], span[1], 16)
    cnt, _ = np.histogram(s, edges)
    dens = cnt / np.diff(edges)
    mid = np.sqrt(edges[1:] * edges[:-1])
    ok = cnt > 0
    X = np.log(np.sin(mid[ok] / 2))
    slope, intercept = np.polyfit(X, np.log(dens[ok]), 1)
    return float(slope)

"""Stable boundary-length processes: Levy trees of disks, forested lines and the
atomic dual measure."""
from dataclasses import dataclass, field
import math

import numpy as np
from scipy import integrate, special, stats

from .gff import LqgMeasureGrid, ResourceError
from .peanosphere import _next_smaller_or_equal
from .rng import RngStream, as_stream
from .stochastic import StableParams, TailEstimate, TimeSeries, _ks_report, \
    censored_pareto_index, hill_estimator, loglog_density_slope, sample_bessel_paths, \
    sample_stable


@dataclass
class JumpPath:
    base: TimeSeries
    jumps: np.ndarray  # rows (time, signed size)

    def __post_init__(self):
        j = np.asarray(self.jumps, dtype=float).reshape(-1, 2)
        if len(j) and not (np.all(j[:, 1] > 0) or np.all(j[:, 1] < 0)):
            raise ValueError("jump signs must be homogeneous")
        self.jumps = j

    @property
    def sign(self):
        return 1 if not len(self.jumps) or self.jumps[0, 1] > 0 else -1


@dataclass
class LevyTree:
    parent: np.ndarray           # -1 for roots
    boundary_length: np.ndarray  # jump magnitudes
    start: np.ndarray            # index of the post-jump value
    end: np.ndarray              # first index back at or below the pre-jump level
    level: np.ndarray            # pre-jump value

    def __len__(self):
        return len(self.parent)

    @property
    def roots(self):
        return np.flatnonzero(self.parent < 0)

    def depth(self):
        d = np.zeros(len(self), dtype=int)
        for k in range(len(self)):  # parents precede children
            if self.parent[k] >= 0:
                d[k] = d[self.parent[k]] + 1
        return d

    def nesting_ok(self):
        p = self.parent
        c = np.flatnonzero(p >= 0)
        return bool(np.all(self.start[p[c]] < self.start[c]) and np.all(self.end[c] <= self.end[p[c]])
                    and np.all(self.start[c] < self.end[p[c]]))


@dataclass
class ForestedLine:
    length: float     # line length: minus the running infimum at the horizon
    tree: LevyTree
    root_position: np.ndarray  # position on the line of every root disk, increasing
    areas: np.ndarray = None
    path: JumpPath = None


@dataclass
class AtomicMeasure:
    masses: np.ndarray
    cells: np.ndarray  # flat cell indices into the carrier grid
    theta: float
    u_min: float

    def __post_init__(self):
        if len(self.masses) and self.masses.min() < self.u_min:
            raise ValueError("atom below the truncation")

    def total(self):
        return float(self.masses.sum())


# -- trees ------------------------------------------------------------------

def build_levy_tree(path: JumpPath):
    """Tree of jumps of a positive-jump path (negative-jump paths are negated).

    Jump k sits at step i (value i -> i + 1).  Its interval runs from i + 1 to
    the first later index where the path is back at or below the pre-jump
    level; the parent of k is the innermost jump whose interval strictly
    contains the start of k.  Intervals of a path without negative jumps are
    laminar, so a stack sweep finds all parents."""
    j = path.jumps
    vals = path.base.values * path.sign
    if len(j) and np.any(np.diff(j[:, 0]) <= 0):
        raise ValueError("jumps must be strictly ordered in time")
    steps = np.rint(j[:, 0] / path.base.dt).astype(np.int64) - 1
    if len(j) and (steps.min() < 0 or steps.max() >= len(vals) - 1):
        raise ValueError("jump times outside the path")
    nse = _next_smaller_or_equal(vals) if len(j) else np.zeros(0, dtype=np.int64)
    start = steps + 1
    end = nse[steps] if len(j) else np.zeros(0, dtype=np.int64)
    parent = np.full(len(j), -1, dtype=np.int64)
    stack = []
    for k in range(len(j)):
        while stack and end[stack[-1]] <= start[k]:
            stack.pop()
        if stack:
            parent[k] = stack[-1]
        stack.append(k)
    return LevyTree(parent, np.abs(j[:, 1]), start, end, vals[steps] if len(j) else np.zeros(0))


def forested_line(stream, kappa_prime, horizon, dt=1e-4, cutoff=None, areas=False):
    """kappa'/4-stable path with positive jumps on [0, horizon] and its tree.

    Disk boundary lengths are the recorded jump magnitudes.  With areas=True
    each disk gets (length)^2 * A with A ~ Exp(1) from a child stream: a
    surrogate, not the conditional area law of a quantum disk."""
    if not 4 < kappa_prime < 8:
        raise ValueError("kappa_prime must lie in (4, 8)")
    a = kappa_prime / 4
    n = int(round(horizon / dt)) + 1
    if n < 2:
        z = np.zeros(0, dtype=np.int64)
        empty = LevyTree(z, np.zeros(0), z, z, np.zeros(0))
        return ForestedLine(0.0, empty, np.zeros(0), np.zeros(0) if areas else None)
    s = as_stream(stream)
    series, jumps = sample_stable(s, StableParams(a, 1), n, dt, cutoff)
    path = JumpPath(series, jumps)
    tree = build_levy_tree(path)
    run_min = np.minimum.accumulate(series.values)
    roots = tree.roots
    pos = -run_min[tree.start[roots] - 1]
    A = None
    if areas:
        A = tree.boundary_length ** 2 * s.child(7).gen.exponential(size=len(tree))
    return ForestedLine(float(-run_min[-1]), tree, pos, A, path)


def jump_tail_index(lines, threshold):
    """Hill estimate over all disk boundary lengths >= threshold."""
    x = np.concatenate([fl.tree.boundary_length for fl in lines])
    k = min(int((x >= threshold).sum()), len(x) - 1)
    return hill_estimator(x, k)


def jump_intensity_slope(lines, lo, hi, bins=20):
    x = np.concatenate([fl.tree.boundary_length for fl in lines])
    return loglog_density_slope(x, lo, hi, bins)


# -- inverse local time -------------------------------------------------------

def _runs(mask):
    """Lengths of runs of True per row, and whether each run hits the row end."""
    lens, cens = [], []
    for row in mask:
        d = np.diff(np.concatenate([[0], row.astype(np.int8), [0]]))
        st, en = np.flatnonzero(d == 1), np.flatnonzero(d == -1)
        lens.append(en - st)
        cens.append(en == len(row))
    return np.concatenate(lens), np.concatenate(cens)


def inverse_local_time_index(stream, delta, horizon=100000, paths=400, threshold=300, level=1.0):
    """Stable index of the inverse local time at 0 of reflected BES^delta.

    Paths run on a unit grid from 0; a grid time counts as a zero when
    X^2 < level.  Gaps between zeros longer than threshold are fitted by a
    Pareto MLE, with the final gap of each path treated as censored."""
    if not 0 < delta < 2:
        raise ValueError("delta must lie in (0, 2)")
    X, _ = sample_bessel_paths(stream, delta, 0.0, int(horizon), 1.0, "reflect", paths=paths)
    L, C = _runs(X ** 2 >= level)
    try:
        return censored_pareto_index(L, C, threshold)
    except ValueError:
        # delta close to 2: almost no long gaps; report 0 with an uninformative error
        return TailEstimate(0.0, int((L > threshold).sum()), 1.0)


# -- conditioning on positivity ----------------------------------------------

def conditioned_positive_check(stream, kappa_prime, horizon=0.1, x0=1.0, dt=1e-4, paths=2000,
                               max_size=0.05, budget=20000, level=0.01):
    """Negative-jump kappa'/4-stable paths from x0 conditioned to stay >= 0 on
    [0, horizon] by rejection.  The sizes of jumps smaller than max_size (far
    from the boundary effect) are KS-compared with those of unconditioned paths."""
    if not 4 < kappa_prime < 8:
        raise ValueError("kappa_prime must lie in (4, 8)")
    p = StableParams(kappa_prime / 4, -1)
    n = int(round(horizon / dt)) + 1
    s = as_stream(stream)
    acc, free = [], []
    tried = accepted = 0
    min_ok = True
    while accepted < paths:
        if tried >= budget:
            raise ResourceError(f"accepted {accepted} of {tried} proposals "
                                f"(rate {accepted / tried:.3g}) for horizon {horizon}")
        ser, jumps = sample_stable(s.child(0, tried), p, n, dt)
        tried += 1
        if x0 + ser.values.min() >= 0:
            accepted += 1
            acc.append(jumps[:, 1])
            min_ok &= bool(np.all(x0 + ser.values >= 0))
        _, jf = sample_stable(s.child(1, tried), p, n, dt)
        free.append(jf[:, 1])
    a = -np.concatenate(acc)
    b = -np.concatenate(free)
    a, b = a[a < max_size], b[b < max_size]
    rep = _ks_report(a, b, level)
    rep.update({"acceptance_rate": accepted / tried, "all_nonnegative": min_ok,
                "proposals": tried})
    rep["pass"] = rep["pass"] and min_ok
    return rep


def acceptance_rate(stream, kappa_prime, horizon, x0=1.0, dt=1e-3, trials=500):
    """Fraction of unconditioned negative-jump paths staying >= -x0 up to horizon."""
    p = StableParams(kappa_prime / 4, -1)
    n = int(round(horizon / dt)) + 1
    s = as_stream(stream)
    ok = sum(x0 + sample_stable(s.child(k), p, n, dt)[0].values.min() >= 0 for k in range(trials))
    return ok / trials


# -- cross-module agreement -------------------------------------------------------

def normalized_jumps(sizes, threshold):
    """Magnitudes >= threshold divided by the threshold (Pareto(alpha) if the tail is exact)."""
    x = np.abs(np.asarray(sizes, dtype=float))
    return x[x >= threshold] / threshold


def cross_module_ks(forest_sizes, forest_threshold, mating_sizes, mating_threshold, level=0.01):
    return _ks_report(normalized_jumps(forest_sizes, forest_threshold),
                      normalized_jumps(mating_sizes, mating_threshold), level)


# -- atomic dual measure ------------------------------------------------------

def _theta(carrier_gamma, gamma_prime):
    if not gamma_prime > 2:
        raise ValueError("gamma_prime must exceed 2")
    if abs(carrier_gamma * gamma_prime - 4) > 1e-9:
        raise ValueError("carrier gamma and gamma_prime must satisfy gamma * gamma' = 4")
    return 4 / gamma_prime ** 2


def dual_atomic_measure(stream, carrier: LqgMeasureGrid, gamma_prime, u_min):
    """Poisson atoms with intensity u^(-1-theta) du x mu_gamma(dz), masses >= u_min."""
    th = _theta(carrier.gamma, gamma_prime)
    if not u_min > 0:
        raise ValueError("u_min must be positive")
    g = as_stream(stream).gen
    lam = carrier.cell_mass.ravel() * u_min ** (-th) / th
    counts = g.poisson(lam)
    cells = np.repeat(np.arange(lam.size), counts)
    masses = u_min * (1 - g.random(cells.size)) ** (-1 / th)
    return AtomicMeasure(masses, cells, th, u_min)


def _compound_sums(gen, rate, th, u_min, trials, chunk=100000):
    """Totals of independent Poisson(rate) sets of Pareto(theta, u_min) atoms."""
    out = np.empty(trials)
    for a in range(0, trials, chunk):
        m = min(chunk, trials - a)
        N = gen.poisson(rate, m)
        x = u_min * (1 - gen.random(N.sum())) ** (-1 / th)
        out[a:a + m] = np.bincount(np.repeat(np.arange(m), N), weights=x, minlength=m)
    return out


def small_atom_laplace_exponent(phi, th, u_min):
    """int_0^u_min (1 - e^(-phi u)) u^(-1-theta) du by adaptive quadrature."""
    if phi == 0:
        return 0.0
    f = lambda u: -math.expm1(-phi * u) * u ** (-1 - th)
    val, _ = integrate.quad(f, 0, u_min, limit=200)
    return val


def laplace_duality_test(carrier: LqgMeasureGrid, gamma_prime, phis, trials=10 ** 6, seed=0,
                         u_min=0.01, tol=0.02):
    """E[exp(-phi mu_gamma'(U)) | mu_gamma] against exp(Gamma(-theta) phi^theta mu_gamma(U)).

    Atoms above u_min are simulated (the Poisson sets of all cells are pooled
    into one set with the total rate); the atoms below u_min enter through the
    exact factor exp(-mu_gamma(U) int_0^u_min (1 - e^(-phi u)) u^(-1-theta) du)."""
    th = _theta(carrier.gamma, gamma_prime)
    if any(p < 0 for p in phis):
        raise ValueError("phi must be nonnegative")
    M = carrier.mass()
    S = _compound_sums(RngStream(seed, 11).gen, M * u_min ** (-th) / th, th, u_min, trials)
    rows = []
    for phi in phis:
        e = np.exp(-phi * S)
        mc = e.mean() * math.exp(-M * small_atom_laplace_exponent(phi, th, u_min))
        exact = math.exp(special.gamma(-th) * phi ** th * M)
        rel = abs(mc / exact - 1)
        rows.append({"phi": phi, "monte_carlo": float(mc), "exact": exact, "rel_error": float(rel),
                     "stderr": float(e.std() / math.sqrt(trials) / e.mean()) if phi else 0.0,
                     "pass": bool(rel < tol)})
    return {"theta": th, "carrier_mass": M, "trials": trials, "rows": rows,
            "pass": all(r["pass"] for r in rows)}


def moment_formula(p, th, M):
    """E[mu_gamma'(U)^p | mu_gamma] for 0 < p < theta, M = mu_gamma(U)."""
    return special.gamma(1 - p / th) * (-special.gamma(-th) * M) ** (p / th) / special.gamma(1 - p)


def moment_check(carrier: LqgMeasureGrid, gamma_prime, p=None, trials=200000, seed=0, u_min=1e-4,
                 tol=0.05):
    """Monte Carlo p-th moment of the atomic total mass against the closed form.

    Atoms below u_min are replaced by their mean mass M u_min^(1-theta)/(1-theta)."""
    th = _theta(carrier.gamma, gamma_prime)
    p = th / 2 if p is None else p
    M = carrier.mass()
    S = _compound_sums(RngStream(seed, 12).gen, M * u_min ** (-th) / th, th, u_min, trials,
                       chunk=2000)
    S = S + M * u_min ** (1 - th) / (1 - th)
    mc = float(np.mean(S ** p))
    exact = float(moment_formula(p, th, M))
    rel = abs(mc / exact - 1)
    return {"p": p, "theta": th, "monte_carlo": mc, "exact": exact, "rel_error": float(rel),
            "pass": bool(rel < tol)}

"""Verification suites: numbered acceptance checks grouped by topic.

Each suite returns a SuiteReport whose overall flag is the conjunction of its
checks.  Seeded checks run once per seed in range(seeds)."""
from dataclasses import dataclass, field, asdict
import math
import time

import numpy as np

from . import exponents as ex
from . import gff, levy_forest as lf, peanosphere as pe, sle
from .context import GammaContext
from .rng import RngStream
from .stochastic import bessel_qv_drift, covariance_rate, hill_estimator, reversal_marginals, \
    sample_bm, sample_correlated_bm


@dataclass
class Check:
    name: str
    statistic: float
    target: float
    tolerance: float
    passed: bool
    criterion: int = 0
    detail: dict = field(default_factory=dict)


@dataclass
class SuiteReport:
    suite: str
    checks: list
    seconds: float = 0.0

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def as_dict(self):
        return {"suite": self.suite, "pass": self.passed, "seconds": self.seconds,
                "checks": [asdict(c) for c in self.checks]}

    def failing(self):
        return [c.name for c in self.checks if not c.passed]


def _close(name, value, target, tol, criterion, **detail):
    value = float(value)
    return Check(name, value, float(target), float(tol), bool(abs(value - target) <= tol),
                 criterion, detail)


def _flag(name, ok, criterion, statistic=float("nan"), target=float("nan"), tol=float("nan"),
          **detail):
    return Check(name, float(statistic), float(target), float(tol), bool(ok), criterion, detail)


# -- 1-3 exact algebra ----------------------------------------------------------

def algebra(seeds=3):
    checks = []
    worst = 0.0
    for g in np.linspace(0.05, 1.95, 50):
        worst = max(worst, max(abs(v) for v in GammaContext(float(g)).identity_residuals().values()))
    checks.append(_close("gamma_identities", worst, 0.0, 1e-12, 1))

    rt = 0.0
    for g in (0.5, 1.0, math.sqrt(2), math.sqrt(8 / 3), 1.8):
        ctx = GammaContext(g)
        for W in (0.3, 1.0, 2.0, 4.5):
            w = ex.wedge_from("W", W, ctx)
            c = ex.cone_from("W", W, ctx)
            for name in ex.PARAM_NAMES:
                rt = max(rt, abs(ex.wedge_from(name, getattr(w, name), ctx).W - W))
                rt = max(rt, abs(ex.cone_from(name, getattr(c, name), ctx).W - W))
            cone, _ = ex.zip_wedge_to_cone(w, ctx)
            rt = max(rt, abs(ex.cut_cone_to_wedge(cone, ctx).W - W))
            total, rhos, gaps = ex.weld([W, 1.5, 0.7], ctx)
            rt = max(rt, abs(total - (W + 2.2)), abs(ex.wedge_from("W", total, ctx).theta
                                                      - sum(ex.wedge_from("W", x, ctx).theta
                                                            for x in (W, 1.5, 0.7))))
    checks.append(_close("table_round_trips_zip_cut_weld", rt, 0.0, 1e-12, 1))

    cut = 0.0
    for kp in (4.5, 5.0, 16 / 3, 6.0, 7.5):
        ctx = GammaContext.from_kappa_prime(kp)
        cat = ex.exponent_catalog(ctx)
        e = [x for x in cat if x.name == "cut_points"][0]
        cut = max(cut, abs(e.dim - (3 - 3 * kp / 8)))
    checks.append(_close("cut_point_dimension_closed_form", cut, 0.0, 1e-12, 1, grid=5))

    ctx = GammaContext.from_gamma2("8/3")
    checks.append(_close("kpz_spot_x", ex.kpz(0.25, ctx), 1 / 8, 1e-12, 2))
    checks.append(_close("kpz_inverse_spot", ex.kpz_inverse(2.0, ctx), 1.5, 1e-12, 2))

    f1, f2 = ex.fk_dictionary(1), ex.fk_dictionary(2)
    checks.append(_close("fk_q1_kappa_prime", f1.kappa_prime, 6, 1e-9, 3))
    checks.append(_close("fk_q1_p", f1.p, 1 / 3, 1e-9, 3))
    checks.append(_close("fk_q1_var_ratio", f1.var_ratio, 1 / 3, 1e-9, 3))
    checks.append(_close("fk_q2_kappa_prime", f2.kappa_prime, 16 / 3, 1e-9, 3))
    checks.append(_close("fk_q2_p", f2.p, math.sqrt(2) - 1, 1e-9, 3))
    return checks


# -- 4-5 Brownian covariance and Bessel ---------------------------------------------

def bessel(seeds=3):
    """Criteria 4 and 5 have separate time budgets, so each check records its
    own wall time in detail['seconds']."""
    checks = []
    for kp in (16 / 3, 6.0, 8.0):
        t0 = time.perf_counter()
        pair = sample_correlated_bm(RngStream(0, 4), 10 ** 7, 1.0, kp)
        est, se = covariance_rate(pair)
        target = -math.cos(4 * math.pi / kp)
        checks.append(_close(f"covariance_rate_kp{kp:.4g}", est, target, 4 * se, 4, stderr=se,
                             seconds=time.perf_counter() - t0))
    t0 = time.perf_counter()
    d, se, used = bessel_qv_drift(RngStream(0, 5), 3.0, 10 ** 6)
    checks.append(_close("bes3_log_qv_drift", d, 0.5, 0.02, 5, stderr=se, effective_steps=used,
                         seconds=time.perf_counter() - t0))
    for s in range(seeds):
        t0 = time.perf_counter()
        r = reversal_marginals(RngStream(s, 6), 1.0, 3.0)
        checks.append(_flag(f"bes1_bes3_reversal_seed{s}", r["pass"], 5,
                            min(c["p_value"] for c in r["checks"]), 0.01,
                            p_values=[c["p_value"] for c in r["checks"]],
                            seconds=time.perf_counter() - t0))
    return checks


# -- 6 driving processes ------------------------------------------------------

GAP_CASES = [  # (kappa, rho, direction)
    (8 / 3, 0.0, "forward"),
    (8 / 3, -4 / 3, "forward"),
    (2.0, 0.0, "forward"),
    (3.2, -1.9, "forward"),
    (8 / 3, 4.0, "reverse"),
]

THETA_CASES = [(8 / 3, 0.0, "forward_radial"), (8 / 3, 2.0, "reverse_interior")]


def driving(seeds=3):
    checks = []
    for i, (k, rho, d) in enumerate(GAP_CASES):
        target = sle.forward_dimension(k, rho) if d == "forward" else sle.reverse_dimension(k, rho)
        est, se = sle.estimate_gap_dimension(RngStream(0, 60 + i), k, rho, d)
        checks.append(_close(f"gap_dimension_{d}_k{k:.3g}_rho{rho:.3g}", est, target, 0.05, 6,
                             stderr=se))
    for s in range(seeds):
        r = sle.reverse_forward_gap_test(8 / 3, 8 / 3, seed=RngStream(s, 66))
        checks.append(_flag(f"reverse_forward_gap_seed{s}", r["pass"], 6,
                            min(c["p_value"] for c in r["checks"]), 0.01))
    for k, rho, var in THETA_CASES:
        for s in range(seeds):
            x = sle.theta_stationary_samples(RngStream(s, 67), k, rho, var)
            r = sle.theta_chi2_test(x, k, rho, var)
            checks.append(_flag(f"theta_chi2_{var}_seed{s}", r["pass"], 6, r["p_value"], 0.01))
    return checks


# -- 7 mating ---------------------------------------------------------------------

def mating(seeds=3, instances=100, n=10 ** 4):
    euler_ok = pre_ok = mass_ok = True
    worst_pre = 0
    for i in range(instances):
        pair = pe.random_pair(RngStream(0, 7).child(i), n, "brownian" if i % 2 == 0 else "walk")
        m = pe.mate(pair)
        euler_ok &= m.euler_characteristic == 2
        census = pe.class_census(pair)
        worst_pre = max(worst_pre, census.max_preimage)
        mass_ok &= pe.pushforward_measure(m, pair).sum() == n
    return [
        _flag("euler_characteristic_2", euler_ok, 7, 2, 2, 0, instances=instances, n=n),
        _flag("max_class_preimage_le_3", worst_pre <= 3, 7, worst_pre, 3, 0),
        _flag("measure_total_n", mass_ok, 7, n, n, 0),
    ]


# -- 8 cone times -------------------------------------------------------------------

def cone_time_sets(replicas=16, n=2 ** 20, seed=0):
    """Cut times of kappa' = 6 pairs and 2pi/3-cone times of independent standard planar BMs."""
    cuts, cones = [], []
    for r in range(replicas):
        pair = sample_correlated_bm(RngStream(seed, 81).child(r), n, 1.0, 6.0)
        cuts.append(pe.cut_times(pair))
        s = RngStream(seed, 82).child(r)
        Z = np.vstack([sample_bm(s.child(0), n, 1.0).values, sample_bm(s.child(1), n, 1.0).values])
        cones.append(pe.cone_times(Z, 2 * math.pi / 3))
    return cuts, cones


def ancestor_free_jumps(replicas=16, n=2 ** 21, epsilon=20.0, seed=0):
    out = []
    for r in range(replicas):
        pair = sample_correlated_bm(RngStream(seed, 83).child(r), n, 1.0, 6.0)
        jL, jR = pe.extract_jump_processes(pair, epsilon)
        out.append(np.concatenate([jL[:, 3], jR[:, 3]]))
    return np.concatenate(out)


def cone_times_suite(seeds=3):
    checks = []
    n = 2 ** 20
    cuts, cones = cone_time_sets(16, n)
    d1, se1 = pe.pooled_boxcount_dimension(cuts, n)
    d2, se2 = pe.pooled_boxcount_dimension(cones, n)
    checks.append(_close("cut_time_dimension", d1, 0.25, 0.10, 8, stderr=se1))
    checks.append(_close("cone_2pi3_dimension", d2, 0.25, 0.10, 8, stderr=se2))
    joint = 4 * math.hypot(se1, se2)
    checks.append(_close("cut_vs_cone_joint_ci", d1 - d2, 0.0, joint, 8))
    J = ancestor_free_jumps()
    eps = 20.0
    h = hill_estimator(J, min(int((J >= eps).sum()), len(J) - 1))
    checks.append(_close("ancestor_free_jump_hill", h.alpha_hat, 1.5, 0.1, 8, stderr=h.stderr,
                         k=h.k_used))
    return checks


# -- 9 GFF / LQG --------------------------------------------------------------------

def gff_measure(seeds=3):
    checks = []
    s_int, _ = gff.variance_slope(512, "dirichlet")
    s_bdy, _ = gff.variance_slope(512, "free_mean_zero", point=(0, 256), half=True)
    checks.append(_close("interior_variance_slope", s_int, 1.0, 0.05, 9))
    checks.append(_close("boundary_variance_slope", s_bdy, 2.0, 0.10, 9))
    ratio, oracle = gff.disk_first_moment_ratio(RngStream(0, 91), 1.0)
    checks.append(_close("disk_first_moment_ratio", ratio / oracle, 1.0, 0.10, 9,
                         ratio=ratio, oracle=oracle))
    s = RngStream(0, 92)
    fields = [gff.sample_gff(s.child(k), 256) for k in range(1000)]
    rep = gff.coordinate_change_check(fields, 1.0, 2)
    checks.append(_close("coordinate_change_averaged", rep["max_rel_dev_averaged"], 0.0, 0.05, 9))
    return checks


# -- 10 stable boundary lengths ------------------------------------------------------------

def forest_sample(lines=200, seed=0, dt=1e-4):
    return [lf.forested_line(RngStream(seed, 101).child(k), 6.0, 1.0, dt=dt) for k in range(lines)]


def stable_boundary(seeds=3):
    checks = []
    dt = 1e-4
    L = forest_sample(dt=dt)
    unit = dt ** (1 / 1.5)
    h = lf.jump_tail_index(L, 20 * unit)
    checks.append(_close("forest_jump_hill", h.alpha_hat, 1.5, 0.1, 10, stderr=h.stderr))
    sl = lf.jump_intensity_slope(L, 20 * unit, 2000 * unit)
    checks.append(_close("jump_intensity_slope", sl, -6 / 4 - 1, 0.1, 10))
    for delta, target in ((1.0, 0.5), (1.5, 0.25)):
        t = lf.inverse_local_time_index(RngStream(0, 102), delta)
        checks.append(_close(f"inverse_local_time_delta{delta}", t.alpha_hat, target, 0.05, 10,
                             stderr=t.stderr))
    forest = np.concatenate([x.tree.boundary_length for x in L])
    mating_jumps = ancestor_free_jumps(replicas=4, seed=1)
    r = lf.cross_module_ks(forest, 20 * unit, mating_jumps, 20.0)
    checks.append(_flag("cross_module_jump_ks", r["pass"], 10, r["p_value"], 0.01))
    return checks


# -- 11 duality -------------------------------------------------------------------

def duality(seeds=3):
    gp = math.sqrt(6)
    f = gff.sample_gff(RngStream(0, 111), 128)
    car = gff.lqg_area_measure(f, 4 / gp)
    rep = lf.laplace_duality_test(car, gp, [0.5, 1.0, 2.0])
    checks = [_close(f"laplace_phi{r['phi']}", r["rel_error"], 0.0, 0.02, 11,
                     monte_carlo=r["monte_carlo"], exact=r["exact"]) for r in rep["rows"]]
    m = lf.moment_check(car, gp)
    checks.append(_close("moment_p_theta_half", m["rel_error"], 0.0, 0.05, 11,
                         monte_carlo=m["monte_carlo"], exact=m["exact"]))
    return checks


SUITES = {
    "algebra": algebra,
    "bessel": bessel,
    "driving": driving,
    "mating": mating,
    "cone-times": cone_times_suite,
    "gff-measure": gff_measure,
    "stable-boundary": stable_boundary,
    "duality": duality,
}


def run_suite(name, seeds=3):
    if name not in SUITES:
        raise KeyError(name)
    t = time.perf_counter()
    checks = SUITES[name](seeds)
    return SuiteReport(name, checks, time.perf_counter() - t)

"""Exact parameter algebra for quantum wedges and cones, KPZ, and the FK dictionary.

Every wedge/cone parameterization is affine in the weight W, so each table is
implemented as a pair of maps (parameter -> W, W -> parameter).
"""
from dataclasses import dataclass, asdict, field
import math

import numpy as np

from .context import GammaContext

PARAM_NAMES = ("alpha", "W", "theta", "delta", "a", "Delta")


@dataclass(frozen=True)
class WedgeParams:
    alpha: float
    W: float
    theta: float
    delta: float
    a: float
    Delta: float

    @property
    def thin(self):
        # W > 0 is enforced, so this is 0 < W < gamma^2/2
        return self.delta < 2

    def as_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class ConeParams:
    alpha: float
    W: float
    theta: float
    delta: float
    a: float
    Delta: float

    def as_dict(self):
        return asdict(self)


# -- wedges -----------------------------------------------------------------

def _wedge_W(name, v, ctx):
    g, Q, chi = ctx.gamma, ctx.Q, ctx.chi
    if name == "alpha":
        return g * (g / 2 + Q - v)
    if name == "W":
        return v
    if name == "theta":
        return chi * g * v / math.pi
    if name == "delta":
        return g * g / 2 * (v - 1)
    if name == "a":
        return g * v + g * g / 2
    if name == "Delta":
        return 2 + g * g * v
    raise ValueError(f"unknown parameter {name!r}")


def _wedge_all(W, ctx):
    g, Q, chi = ctx.gamma, ctx.Q, ctx.chi
    return WedgeParams(
        alpha=g / 2 + Q - W / g,
        W=W,
        theta=math.pi * W / (g * chi),
        delta=1 + 2 * W / g ** 2,
        a=W / g - g / 2,
        Delta=(W - 2) / g ** 2,
    )


def wedge_from(name, value, ctx: GammaContext) -> WedgeParams:
    """All six wedge parameters from any one of them."""
    W = _wedge_W(name, float(value), ctx)
    if not W > 0:
        raise ValueError(f"wedge weight must be positive (got W={W} from {name}={value})")
    return _wedge_all(W, ctx)


def is_thin_wedge(W, ctx):
    return 0 < W < ctx.gamma2 / 2


# -- cones ------------------------------------------------------------------

def _cone_W(name, v, ctx):
    g, Q, chi = ctx.gamma, ctx.Q, ctx.chi
    if name == "alpha":
        return 2 * g * (Q - v)
    if name == "W":
        return v
    if name == "theta":
        return g * chi * v / math.pi
    if name == "delta":
        return g * g / 2 * (v - 2)
    if name == "a":
        return 2 * g * v
    if name == "Delta":
        return g * g * (2 * v - 1) + 4
    raise ValueError(f"unknown parameter {name!r}")


def _cone_all(W, ctx):
    g, Q, chi = ctx.gamma, ctx.Q, ctx.chi
    return ConeParams(
        alpha=Q - W / (2 * g),
        W=W,
        theta=math.pi * W / (g * chi),
        delta=2 + 2 * W / g ** 2,
        a=W / (2 * g),
        Delta=0.5 + (W - 4) / (2 * g ** 2),
    )


def cone_from(name, value, ctx: GammaContext) -> ConeParams:
    W = _cone_W(name, float(value), ctx)
    if not W > 0:
        raise ValueError(f"cone weight must be positive (got W={W} from {name}={value})")
    return _cone_all(W, ctx)


# -- zipping, cutting, welding ----------------------------------------------

def zip_wedge_to_cone(w: WedgeParams, ctx: GammaContext):
    """Zip the two sides of a wedge together; returns (cone, rho of the interface)."""
    if not w.W > 0:
        raise ValueError("wedge weight must be positive")
    g = ctx.gamma
    cone = cone_from("alpha", w.alpha / 2 + 1 / g, ctx)
    rho = w.W - 2
    rho_alt = 2 + g * g - 2 * cone.alpha * g
    if abs(cone.W - w.W) > 1e-9 * max(1.0, abs(w.W)) or abs(rho - rho_alt) > 1e-9 * max(1.0, abs(rho)):
        raise ArithmeticError("zip relations inconsistent")
    return cone, rho


def cut_cone_to_wedge(c: ConeParams, ctx: GammaContext) -> WedgeParams:
    return wedge_from("alpha", 2 * c.alpha - 2 / ctx.gamma, ctx)


def weld(weights, ctx: GammaContext):
    """Weld wedges of the given weights left to right.

    Returns (total weight, interface rhos, angle gaps).  For two wedges the
    interface is SLE_kappa(W1-2; W2-2); for n wedges the i-th angle gap is
    W_i * lambda / chi.
    """
    ws = [float(w) for w in weights]
    if not ws or any(w <= 0 for w in ws):
        raise ValueError("all weights must be positive")
    total = float(sum(ws))
    rhos = [w - 2 for w in ws]
    gaps = [w * ctx.lam / ctx.chi for w in ws]
    return total, rhos, gaps


# -- KPZ ----------------------------------------------------------------------

def kpz(Delta, ctx: GammaContext):
    g2 = ctx.gamma2
    return g2 / 4 * Delta ** 2 + (1 - g2 / 4) * Delta


def kpz_inverse(x, ctx: GammaContext):
    """Positive root of the KPZ quadratic."""
    if x < 0:
        raise ValueError("x must be nonnegative")
    a = ctx.gamma2 / 4
    b = 1 - a
    disc = b * b + 4 * a * x
    assert disc >= 0
    # rationalized root, stable for small x and for b < 0
    r = math.sqrt(disc)
    if b >= 0:
        return 2 * x / (b + r) if x > 0 else 0.0
    return (r - b) / (2 * a)


def dual(Delta, ctx: GammaContext):
    g2 = ctx.gamma2
    return 1 - g2 / 4 + g2 / 4 * Delta


def kpz_dual(Delta_tilde, ctx: GammaContext):
    gp2 = ctx.gamma_prime ** 2
    return gp2 / 4 * Delta_tilde ** 2 + (1 - gp2 / 4) * Delta_tilde


# -- FK dictionary --------------------------------------------------------

@dataclass(frozen=True)
class FkParams:
    q: float
    kappa_prime: float
    p: float
    theta_kappa: float
    cov_rate: float
    var_ratio: float

    def as_dict(self):
        return asdict(self)


def fk_dictionary(q) -> FkParams:
    q = float(q)
    if not (0 < q < 4):
        raise ValueError("q must lie in (0, 4)")
    # q = 2 + 2 cos(8 pi / kp) with 8 pi / kp in (pi, 2 pi)
    kp = 8 * math.pi / (2 * math.pi - math.acos((q - 2) / 2))
    th = 4 * math.pi / kp
    p_theta = -math.cos(th) / (1 - math.cos(th))
    p_q = math.sqrt(q) / (2 + math.sqrt(q))
    if abs(p_theta - p_q) > 1e-12:
        raise ArithmeticError("p computed two ways disagrees")
    return FkParams(q=q, kappa_prime=kp, p=p_q, theta_kappa=th,
                    cov_rate=-math.cos(4 * math.pi / kp), var_ratio=1 - 2 * p_q)


def brownian_covariance_matrix(kappa_prime, scale=1.0):
    """Lambda = a [[sin th, -cos th], [0, 1]] with th = 4 pi / kappa'.

    Maps a standard planar BM to (L, R) with unit variances and correlation
    -cos th."""
    th = 4 * math.pi / kappa_prime
    return scale * np.array([[math.sin(th), -math.cos(th)], [0.0, 1.0]])


# -- exponent catalogue -------------------------------------------------------

@dataclass
class ExponentEntry:
    name: str
    locus: str  # "bulk" or "boundary"
    Delta: float
    x: float
    dim: float
    Delta_dual: float
    n: int = 0
    rho: float = float("nan")
    paths: int = 0
    interfaces: int = 0
    weight: float = float("nan")

    def alpha(self, gamma):
        return gamma * (1 - self.Delta)

    def as_row(self):
        return {"name": self.name, "locus": self.locus, "n": self.n, "rho": self.rho,
                "Delta": self.Delta, "Delta_dual": self.Delta_dual, "x": self.x, "dim": self.dim}


def _entry(name, locus, Delta, ctx, dim=None, **kw):
    x = kpz(Delta, ctx)
    euclid = (2 - 2 * x) if locus == "bulk" else (1 - x)
    if dim is not None and abs(dim - euclid) > 1e-9:
        raise ArithmeticError(f"{name}: closed-form dimension {dim} != KPZ pipeline {euclid}")
    return ExponentEntry(name=name, locus=locus, Delta=Delta, x=x, dim=euclid,
                         Delta_dual=dual(Delta, ctx), **kw)


def exponent_catalog(ctx: GammaContext, n_max=3, rhos=None):
    """The exponent catalogue for n = 1..n_max and a grid of rho values.

    Each entry is derived from its wedge/cone weights (weight sum -> alpha ->
    Delta -> KPZ) and compared with the closed form where one exists.
    """
    k, kp, g2 = ctx.kappa, ctx.kappa_prime, ctx.gamma2
    out = []
    for n in range(1, n_max + 1):
        # n + 1 weight-2 wedges welded: n interfaces = n simple boundary paths
        w = wedge_from("W", 2.0 * (n + 1), ctx)
        x_closed = n * (2 * n + 4 - k) / (2 * k)
        e = _entry("boundary_paths", "boundary", w.Delta, ctx, n=n, paths=n, interfaces=n, weight=w.W)
        _check(e.x, x_closed, "boundary n-path x")
        _check(w.Delta, 2 * n / k, "boundary n-path Delta")
        out.append(e)
        # n weight-2 wedges zipped into a cone: n non-intersecting whole-plane paths
        c, _ = zip_wedge_to_cone(wedge_from("W", 2.0 * n, ctx), ctx)
        _check(c.Delta, (2 * n + k - 4) / (2 * k), "bulk n-path Delta")
        e = _entry("bulk_paths", "bulk", c.Delta, ctx, n=n, paths=n, interfaces=n - 1, weight=c.W)
        _check(e.x, (4 * n * n - (4 - k) ** 2) / (16 * k), "bulk n-path x")
        out.append(e)
        if kp > 4:
            # n non-intersecting SLE_kappa' paths: alternating weights 2 - g2/2 and 2
            W = (4 - g2 / 2) * n
            c = cone_from("W", W, ctx)
            _check(c.Delta, 0.5 - 2 / g2 + (2 / g2 - 0.25) * n, "disconnection Delta")
            e = _entry("disconnection", "bulk", c.Delta, ctx, n=n, paths=n, weight=W)
            out.append(e)
            if n == 2:
                out.append(_entry("cut_points", "bulk", c.Delta, ctx, dim=3 - 3 * kp / 8,
                                  n=2, paths=2, weight=W))
            if abs(g2 - 8 / 3) < 1e-12:
                _check(e.x, (4 * n * n - 1) / 24, "Brownian intersection x")
            # multiple points of order n: 2n wedges alternating 2 - g2/2, g2 - 2
            if g2 > 2:
                W = n * (2 - g2 / 2) + n * (g2 - 2)
                c = cone_from("W", W, ctx)
                _check(c.Delta, 0.5 + n / 4 - kp / 8, "multiple point Delta")
                out.append(_entry("multiple_points", "bulk", c.Delta, ctx, n=n, weight=W))
                # boundary multiple points: n + 1 wedges of g2 - 2, n of 2 - g2/2
                W = (n + 1) * (g2 - 2) + n * (2 - g2 / 2)
                w = wedge_from("W", W, ctx)
                _check(w.Delta, 1 + n / 2 - kp / 4, "boundary multiple point Delta")
                e = _entry("boundary_multiple_points", "boundary", w.Delta, ctx, n=n, weight=W)
                _check(e.Delta_dual, 2 * n / kp, "boundary multiple point dual")
                out.append(e)
    if kp > 4 and g2 > 2:
        # double points: eight wedges alternating 2 - g2/2 and g2 - 2
        W = 4 * (2 - g2 / 2) + 4 * (g2 - 2)
        c = cone_from("W", W, ctx)
        _check(c.alpha, ctx.chi, "double point cone alpha")
        e = _entry("double_points", "bulk", c.Delta, ctx,
                   dim=2 - (12 - kp) * (4 + kp) / (8 * kp), n=4, weight=W)
        _check(e.Delta, 1.5 - kp / 8, "double point Delta")
        _check(e.x, 0.5 + 3 / kp - kp / 16, "double point x")
        out.append(e)
    if rhos is None:
        rhos = [-1.5, -1.0, -0.5, 0.0, 0.5, 1.0]
    for rho in rhos:
        if rho <= -2:
            continue
        # boundary intersection of SLE_kappa(rho): weights rho+2, 2, rho+2
        W = 2 * (rho + 2) + 2
        w = wedge_from("W", W, ctx)
        _check(w.Delta, 2 * (2 + rho) / k, "SLE_kappa(rho) Delta")
        dim = (4 + rho) * (k - 2 * (2 + rho)) / (2 * k)
        e = _entry("sle_rho_boundary", "boundary", w.Delta, ctx, dim=dim, rho=rho, weight=W)
        _check(e.x, (2 + rho) * (2 * (4 + rho) - k) / (2 * k), "SLE_kappa(rho) x")
        out.append(e)
        # flow-line intersections: weights rho+2, 2, rho+2, 2 welded into a cone
        W = 2 * (rho + 2) + 4
        c = cone_from("W", W, ctx)
        _check(c.Delta, (4 + k + 2 * rho) / (2 * k), "flow line Delta")
        prod = (rho + k / 2 + 2) * (rho - k / 2 + 6)
        e = _entry("flow_line_intersection", "bulk", c.Delta, ctx, dim=2 - prod / (2 * k),
                   rho=rho, weight=W)
        _check(e.x, prod / (4 * k), "flow line x")
        out.append(e)
    for e in out:
        check_entry(e, ctx)
    return out


def _check(a, b, what, tol=1e-9):
    if abs(a - b) > tol * max(1.0, abs(b)):
        raise ArithmeticError(f"{what}: {a} != {b}")


def check_entry(e: ExponentEntry, ctx: GammaContext, tol=1e-12):
    """The invariants every catalogue entry satisfies; returns max residual."""
    res = [
        abs(e.x - kpz(e.Delta, ctx)),
        abs(e.x - e.Delta * e.Delta_dual),
        abs(e.x - kpz_dual(e.Delta_dual, ctx)),
        abs(ctx.gamma * (1 - e.Delta) - ctx.gamma_prime * (1 - e.Delta_dual)),
    ]
    r = max(res)
    if r > tol * max(1.0, abs(e.x)):
        raise ArithmeticError(f"entry {e.name} fails invariants (residual {r})")
    return r


def slekr_dual_dimension(kappa):
    """Boundary-intersection dimension at rho = kappa - 4 (the SLE_kappa' boundary set)."""
    rho = kappa - 4
    return (4 + rho) * (kappa - 2 * (2 + rho)) / (2 * kappa)

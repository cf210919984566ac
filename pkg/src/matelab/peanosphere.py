"""Discrete mating of trees, class census, and cone-time structure of (L, R)."""
from dataclasses import dataclass, field
import math

import numpy as np

from .rng import as_stream
from .stochastic import CorrelatedPair, hill_estimator


# -- excursion pairs ----------------------------------------------------------

def jitter(X):
    """Break ties in a lattice excursion: later indices are pushed up by a
    multiple of the spacing of max|X| (boundary zeros untouched)."""
    X = np.asarray(X, dtype=float).copy()
    eps = 4 * np.spacing(max(1.0, float(np.abs(X).max())))
    X[1:-1] += eps * np.arange(1, len(X) - 1)
    return X


def brownian_excursion(stream, n):
    """Gaussian-step excursion with n steps via the Vervaat transform of a bridge."""
    if n < 2:
        raise ValueError("n must be at least 2")
    z = as_stream(stream).gen.standard_normal(n)
    B = np.concatenate([[0.0], np.cumsum(z - z.mean())])
    B[-1] = 0.0
    k = int(np.argmin(B[:-1]))
    X = np.concatenate([B[k:-1], B[:k + 1]]) - B[k]
    X[0] = X[-1] = 0.0
    return X


def walk_excursion(stream, n):
    """Simple random walk excursion with n steps (n even), jitter-free."""
    if n < 2 or n % 2:
        raise ValueError("n must be an even number >= 2")
    m = n // 2 - 1
    g = as_stream(stream).gen
    steps = np.concatenate([np.ones(m), -np.ones(m + 1)])
    g.shuffle(steps)
    S = np.concatenate([[0], np.cumsum(steps)])
    k = int(np.argmin(S[:-1]))  # first minimum: the cycle lemma rotation
    rot = np.concatenate([steps[k:], steps[:k]])[:-1]
    dyck = np.concatenate([[0], np.cumsum(rot)])
    return np.concatenate([[0.0], dyck + 1.0, [0.0]])


@dataclass
class ExcursionPairGrid:
    X: np.ndarray
    Y: np.ndarray
    C: float = None

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=float)
        self.Y = np.asarray(self.Y, dtype=float)
        if len(self.X) != len(self.Y):
            raise ValueError("X and Y must have the same length")
        if len(self.X) < 3:
            raise ValueError("need n >= 2 steps")
        for Z in (self.X, self.Y):
            if Z[0] != 0 or Z[-1] != 0 or np.any(Z[1:-1] <= 0):
                raise ValueError("excursions must vanish at the ends and be positive inside")
            inner = Z[1:-1]
            if len(np.unique(inner)) != len(inner):
                raise ValueError("tie in excursion values; apply jitter() first")
        top = self.X.max() + self.Y.max()
        if self.C is None:
            self.C = top + 1.0
        elif not self.C > top:
            raise ValueError("C must exceed max X + max Y")

    @property
    def n(self):
        return len(self.X) - 1


def random_pair(stream, n, kind="brownian"):
    s = as_stream(stream)
    if kind == "brownian":
        return ExcursionPairGrid(brownian_excursion(s.child(0), n), brownian_excursion(s.child(1), n))
    if kind == "walk":
        return ExcursionPairGrid(jitter(walk_excursion(s.child(0), n)),
                                 jitter(walk_excursion(s.child(1), n)))
    raise ValueError("kind must be 'brownian' or 'walk'")


# -- trees and the mated map ---------------------------------------------------

def build_tree(X):
    """parent[i] = largest j < i with X[j] < X[i]; -1 for none (index 0 and the
    final index, which is identified with the root).  The strict comparison
    makes the rule well defined with ties too; ExcursionPairGrid is what
    rejects them."""
    X = np.asarray(X, dtype=float)
    if len(X) < 3 or X[0] != 0 or X[-1] != 0 or np.any(X[1:-1] <= 0):
        raise ValueError("not an excursion")
    par = np.full(len(X), -1, dtype=np.int64)
    stack = []
    for i, x in enumerate(X):
        while stack and X[stack[-1]] >= x:
            stack.pop()
        if stack:
            par[i] = stack[-1]
        stack.append(i)
    par[-1] = -1
    return par


@dataclass
class MatedMap:
    n_vertices: int
    edges: np.ndarray          # (E, 2) endpoints
    labels: list               # 'tree', 'dual-tree' or 'gluing' per edge
    rotation: list             # per vertex, outgoing darts in counterclockwise order
    faces: list = field(default_factory=list)

    @property
    def n_edges(self):
        return len(self.edges)

    @property
    def n_faces(self):
        return len(self.faces)

    @property
    def euler_characteristic(self):
        return self.n_vertices - self.n_edges + self.n_faces

    def dart_head(self, d):
        e = self.edges[d >> 1]
        return int(e[1]) if d % 2 == 0 else int(e[0])

    def to_text(self):
        lines = [f"# V={self.n_vertices} E={self.n_edges} F={self.n_faces}"]
        for i, (u, v) in enumerate(self.edges):
            lines.append(f"e{i} {u} {v} {self.labels[i]}")
        for v, darts in enumerate(self.rotation):
            lines.append(f"{v}: " + ",".join(str(d) for d in darts))
        return "\n".join(lines) + "\n"


def _trace_faces(rotation, n_darts):
    nxt = np.empty(n_darts, dtype=np.int64)
    for darts in rotation:
        k = len(darts)
        for j, d in enumerate(darts):
            nxt[d] = darts[(j + 1) % k]
    face_next = nxt[np.arange(n_darts) ^ 1]  # turn at the head of each dart
    seen = np.zeros(n_darts, dtype=bool)
    faces = []
    for d0 in range(n_darts):
        if seen[d0]:
            continue
        cyc = []
        d = d0
        while not seen[d]:
            seen[d] = True
            cyc.append(d)
            d = face_next[d]
        if d != d0:
            raise RuntimeError("rotation system is inconsistent")
        faces.append(cyc)
    return faces


def mate(pair: ExcursionPairGrid):
    """Glue the trees of X (below) and Y (above, via C - Y) along the n
    vertical segments; check that the result is a sphere."""
    n = pair.n
    if n < 2:
        raise ValueError("n must be at least 2")
    pX, pY = build_tree(pair.X), build_tree(pair.Y)
    edges, labels = [], []
    childX = [[] for _ in range(n)]
    childY = [[] for _ in range(n)]
    par_dart_X = [None] * n
    par_dart_Y = [None] * n
    for i in range(1, n):
        e = len(edges)
        edges.append((i, int(pX[i])))
        labels.append("tree")
        par_dart_X[i] = 2 * e
        childX[pX[i]].append((i, 2 * e + 1))
    for i in range(1, n):
        e = len(edges)
        edges.append((n + i, n + int(pY[i])))
        labels.append("dual-tree")
        par_dart_Y[i] = 2 * e
        childY[pY[i]].append((i, 2 * e + 1))
    glue = []
    for i in range(n):
        e = len(edges)
        edges.append((i, n + i))
        labels.append("gluing")
        glue.append(2 * e)
    rotation = []
    for i in range(n):  # X side: children right to left, up the glue edge, then the parent
        r = [d for _, d in sorted(childX[i], reverse=True)] + [glue[i]]
        if par_dart_X[i] is not None:
            r.append(par_dart_X[i])
        rotation.append(r)
    for i in range(n):  # Y side (mirror image): glue, children left to right, parent
        r = [glue[i] + 1] + [d for _, d in sorted(childY[i])]
        if par_dart_Y[i] is not None:
            r.append(par_dart_Y[i])
        rotation.append(r)
    edges = np.array(edges, dtype=np.int64)
    faces = _trace_faces(rotation, 2 * len(edges))
    m = MatedMap(2 * n, edges, labels, rotation, faces)
    if m.euler_characteristic != 2:
        raise RuntimeError(f"Euler characteristic {m.euler_characteristic} != 2")
    return m


# -- classes and measure -------------------------------------------------------

@dataclass
class ClassCensus:
    counts: dict
    max_preimage: int
    n_classes: int
    both_chord: int  # diagnostic: times with a chord on each side


def _local_flags(Z):
    left, mid, right = Z[:-2], Z[1:-1], Z[2:]
    is_max = (mid > left) & (mid > right)
    is_min = (mid < left) & (mid < right)
    return is_max, is_min


def class_types(pair: ExcursionPairGrid):
    """Type of the class of each integer time 0..n-1 (0 for the boundary class).

    A time carries a chord below X unless X has a strict local max there, and
    a chord above C - Y unless Y has one; a strict local min (of X or Y)
    puts the vertical segment inside a horizontal segment (type 3)."""
    n = pair.n
    xmax, xmin = _local_flags(pair.X)
    ymax, ymin = _local_flags(pair.Y)
    low, up = ~xmax, ~ymax
    t = np.where(xmin | ymin, 3, np.where(low | up, 2, 1))
    types = np.concatenate([[0], t])[:n]
    both = int((low & up).sum())
    return types, both


def class_census(pair: ExcursionPairGrid):
    """Counts of class types; the type of an interior class is the number of
    points of [0, n] it identifies, so max_preimage is the largest interior type."""
    types, both = class_types(pair)
    counts = {k: int((types == k).sum()) for k in range(4)}
    return ClassCensus(counts, int(types[1:].max()), len(types), both)


def pushforward_measure(mated_map, pair: ExcursionPairGrid):
    """Mass of each class: the number of integer times in its preimage (times 0
    and n share the boundary class, which gets the single cell [0, 1))."""
    mass = np.ones(pair.n)
    if mated_map is not None:
        n = pair.n
        for f in mated_map.faces:
            heads = {mated_map.dart_head(d) % n for d in f}
            if not sum(mass[h] for h in heads) > 0:
                raise RuntimeError("face with zero mass")
    return mass


# -- cone structure of a correlated pair ------------------------------------

def _next_smaller_or_equal(x):
    n = len(x)
    out = np.full(n, n, dtype=np.int64)
    stack = []
    for i in range(n):
        xi = x[i]
        while stack and x[stack[-1]] >= xi:
            out[stack.pop()] = i
        stack.append(i)
    return out


@dataclass
class ConeStructure:
    ancestor: np.ndarray   # earliest ancestor per time, -1 if none
    reach: np.ndarray      # s is an ancestor of exactly the times in (s, reach[s])
    free: np.ndarray       # ancestor-free time indices
    excursions: np.ndarray  # rows (start, end, side, displacement), side 0 = L, 1 = R

    def is_ancestor(self, s, t):
        return s < t < self.reach[s]


def cone_structure(pair):
    """Ancestor relation: s < t are related when L and R both stay strictly
    above their values at s throughout (s, t].  Each maximal such interval is
    an excursion; at its end one coordinate has returned and the other one
    carries the displacement."""
    L = np.asarray(pair.L.values if isinstance(pair, CorrelatedPair) else pair[0], dtype=float)
    R = np.asarray(pair.R.values if isinstance(pair, CorrelatedPair) else pair[1], dtype=float)
    n = len(L)
    nL, nR = _next_smaller_or_equal(L), _next_smaller_or_equal(R)
    reach = np.minimum(nL, nR)
    anc = np.full(n, -1, dtype=np.int64)
    S, E = -1, -1
    rows = []
    for t in range(n):
        if t < E:
            anc[t] = S
            continue
        S, E = t, int(reach[t])
        if E < n and E > t + 1:
            if nL[t] == E and nR[t] == E:
                continue  # both coordinates return together: no jump
            side = 0 if nR[t] == E else 1  # the coordinate that did not return
            disp = (L[E] - L[t]) if side == 0 else (R[E] - R[t])
            rows.append((t, E, side, disp))
    free = np.flatnonzero(anc < 0)
    exc = np.array(rows, dtype=float).reshape(-1, 4)
    return ConeStructure(anc, reach, free, exc)


def extract_jump_processes(pair, epsilon, cs=None, extrapolate=False):
    kp = pair.kappa_prime
    if not (4 < kp < 8) and not extrapolate:
        raise ValueError("kappa_prime must lie in (4, 8)")
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    cs = cone_structure(pair) if cs is None else cs
    e = cs.excursions
    big = e[:, 3] >= epsilon
    jL = e[big & (e[:, 2] == 0)]
    jR = e[big & (e[:, 2] == 1)]
    return jL, jR


def local_time(cs, eps_clock=1.0):
    """Local time of the ancestor-free set at each excursion start, taken as
    the running count of excursions with displacement >= eps_clock
    (normalization constant 1)."""
    e = cs.excursions
    return np.cumsum(e[:, 3] >= eps_clock)


def jump_count_correlation(structures, epsilon, eps_clock=1.0, bin_width=50):
    """Correlation of L and R counts of jumps >= epsilon over local-time bins.

    Accepts one ConeStructure or a list; bins are pooled.  Returns (corr, stderr)."""
    if isinstance(structures, ConeStructure):
        structures = [structures]
    cL, cR = [], []
    for cs in structures:
        e = cs.excursions
        lt = local_time(cs, eps_clock)
        nb = int(lt[-1] // bin_width) if len(lt) else 0
        if nb < 1:
            continue
        b = np.minimum(lt // bin_width, nb - 1)
        big = e[:, 3] >= epsilon
        cL.append(np.bincount(b[big & (e[:, 2] == 0)], minlength=nb))
        cR.append(np.bincount(b[big & (e[:, 2] == 1)], minlength=nb))
    cL, cR = np.concatenate(cL), np.concatenate(cR)
    r = float(np.corrcoef(cL, cR)[0, 1])
    return r, 1 / math.sqrt(len(cL))


# -- standardization and cone times -------------------------------------------

@dataclass
class Standardizer:
    theta_kappa: float
    a: float = 1.0

    @property
    def Lam(self):
        th = self.theta_kappa
        return self.a * np.array([[math.sin(th), -math.cos(th)], [0.0, 1.0]])

    @property
    def Lam_inv(self):
        th = self.theta_kappa
        return np.array([[1 / math.sin(th), 1 / math.tan(th)], [0.0, 1.0]]) / self.a


def standardizer_for(kappa_prime, extrapolate=False):
    if kappa_prime <= 4 or (kappa_prime > 8 and not extrapolate):
        raise ValueError("kappa_prime must lie in (4, 8] (or pass extrapolate=True)")
    return Standardizer(math.pi * (16 / kappa_prime) / 4)


def standardize(pair: CorrelatedPair, extrapolate=False):
    """Map (L, R) to an uncorrelated standard pair Z = Lam^{-1} (L, R)."""
    st = standardizer_for(pair.kappa_prime, extrapolate)
    Z = st.Lam_inv @ np.vstack([pair.L.values, pair.R.values])
    return Z, st


def cone_normals(theta):
    """Inward normals of the cone spanned by directions at angles 0 and theta."""
    if not (0 < theta <= math.pi):
        raise ValueError("cone times are supported for opening angles in (0, pi]")
    return np.array([[0.0, 1.0], [math.sin(theta), -math.cos(theta)]])


def _future_strict_min(f):
    """True where f[t] < f[r] for every r > t."""
    suf = np.minimum.accumulate(f[::-1])[::-1]
    out = np.ones(len(f), dtype=bool)
    out[:-1] = f[:-1] < suf[1:]
    return out


def cone_times(Z, theta=None, normals=None):
    """Times t with Z_r - Z_t in the open cone for all r > t (to the end)."""
    Z = np.asarray(Z, dtype=float)
    N = cone_normals(theta) if normals is None else np.asarray(normals)
    ok = np.ones(Z.shape[1], dtype=bool)
    for v in N:
        ok &= _future_strict_min(v @ Z)
    return np.flatnonzero(ok)


def cut_times(pair):
    """Simultaneous future running minima of L and R."""
    return cone_times(np.vstack([pair.L.values, pair.R.values]), normals=np.eye(2))


def boxcount_dimension(idx, n, scales=None):
    """Box-counting slope for a subset of {0, ..., n-1} viewed inside [0, 1].

    Returns (slope, stderr)."""
    if scales is None:
        scales = [2.0 ** -k for k in range(6, 17)]
    if len(scales) < 4:
        raise ValueError("need at least 4 scales")
    idx = np.asarray(idx)
    counts = []
    for s in scales:
        counts.append(len(np.unique(np.floor(idx / n / s))))
    x = -np.log(np.asarray(scales))
    y = np.log(np.asarray(counts, dtype=float))
    A = np.column_stack([x, np.ones_like(x)])
    coef, res, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    s2 = resid @ resid / max(1, len(x) - 2)
    se = math.sqrt(s2 / ((x - x.mean()) ** 2).sum())
    return float(coef[0]), se


def _box_counts(idx, n, scales):
    idx = np.asarray(idx)
    return np.array([len(np.unique(np.floor(idx / n / s))) for s in scales], dtype=float)


def pooled_boxcount_dimension(index_sets, n, scales=None, n_boot=200, seed=0, log_factor=False):
    """Slope of log mean box count over independent replicas (each a subset of
    {0, ..., n-1}); stderr by bootstrap over replicas.  Averaging the counts
    first removes most of the path-to-path scatter of single-path slopes.

    log_factor=True divides the counts by log(1/s) before the fit, for sets
    whose counts grow like s^-d log(1/s)."""
    if scales is None:
        scales = [2.0 ** -k for k in range(6, 17)]
    if len(scales) < 4:
        raise ValueError("need at least 4 scales")
    C = np.array([_box_counts(i, n, scales) for i in index_sets])
    x = -np.log(np.asarray(scales))
    shift = np.log(x) if log_factor else 0.0

    def slope(rows):
        return np.polyfit(x, np.log(rows.mean(axis=0)) - shift, 1)[0]

    est = float(slope(C))
    g = np.random.default_rng(seed)
    boots = [slope(C[g.integers(0, len(C), len(C))]) for _ in range(n_boot)]
    return est, float(np.std(boots, ddof=1))


def cone_dim_boxcount(paths, theta, scales=None):
    """Box-counting dimension of theta-cone times.

    paths: a standard planar path (2 x n array), a CorrelatedPair (which is
    standardized first), or a list of either (pooled).  Returns (dim, stderr).
    At the critical angle pi/2 the expected count of occupied boxes grows like
    log(1/s), which biases the plain slope upward by about 1/log(1/s); the
    pooled fit then divides that factor out."""
    if not isinstance(paths, list):
        paths = [paths]
    sets, n = [], None
    for p in paths:
        if isinstance(p, CorrelatedPair):
            p, _ = standardize(p)
        p = np.asarray(p, dtype=float)
        n = p.shape[1]
        sets.append(cone_times(p, theta))
    if len(sets) == 1:
        return boxcount_dimension(sets[0], n, scales)
    return pooled_boxcount_dimension(sets, n, scales, log_factor=abs(theta - math.pi / 2) < 1e-12)


def evans_dimension(theta):
    return max(0.0, 1 - math.pi / (2 * theta))


def cut_time_gap_index(pairs, k=None):
    """Hill index of gaps between consecutive cut times, pooled over pairs.
    For a regenerative set the gap tail index equals the index of its inverse
    local time (the stable subordinator), i.e. the set's dimension."""
    if isinstance(pairs, CorrelatedPair):
        pairs = [pairs]
    gaps = np.concatenate([np.diff(cut_times(p)).astype(float) for p in pairs])
    gaps = gaps[gaps > 1]
    k = k or max(10, len(gaps) // 4)
    return hill_estimator(gaps, k)

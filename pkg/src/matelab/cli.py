"""matelab command line: samplers, constructions and verification suites.

Exit status: 0 success/pass, 1 statistical or acceptance failure, 2 usage or
configuration error."""
import argparse
from dataclasses import dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
import hashlib
import json
import math
from pathlib import Path
import sys

import numpy as np

from . import __version__
from . import exponents as ex
from . import gff, io, levy_forest as lf, peanosphere as pe, sle, stochastic as st
from .context import GammaContext
from .rng import RngStream, default_seed


class ConfigError(Exception):
    pass


def _real(s):
    return float(Fraction(str(s)))


def _int(s):
    v = _real(s)
    if v != int(v):
        raise ValueError(f"not an integer: {s}")
    return int(v)


def _str(s):
    return str(s)


# command -> {key: (parser, default)}; None defaults are optional keys
SCHEMAS = {
    "bm": {"n": (_int, 10000), "dt": (_real, 1e-3), "kappa_prime": (_real, None)},
    "bessel": {"delta": (_real, 3.0), "x0": (_real, 1.0), "n": (_int, 10000), "dt": (_real, 1e-3),
               "zero_policy": (_str, "absorb"), "clock": (_str, "time")},
    "stable": {"alpha": (_real, None), "kappa_prime": (_real, 6.0), "n": (_int, 10000),
               "dt": (_real, 1e-3), "jump_sign": (_int, 1)},
    "sle-driving": {"kappa": (_real, 8 / 3), "rho": (_real, 0.0), "direction": (_str, "forward"),
                    "n": (_int, 10000), "dt": (_real, 1e-3)},
    "mate": {"n": (_int, 1000), "kind": (_str, "brownian")},
    "gff": {"n": (_int, 256), "boundary": (_str, "dirichlet")},
    "measure": {"n": (_int, 256), "boundary": (_str, "dirichlet"), "gamma2": (_real, 2.0),
                "eps": (_real, 3.0)},
    "surface": {"kind": (_str, "wedge"), "alpha": (_real, None), "gamma2": (_real, 2.0),
                "horizon": (_real, 10.0), "du": (_real, 0.01)},
    "exponents": {"gamma2": (_real, 8 / 3), "n_max": (_int, 3)},
    "fk": {"q": (_real, 1.0)},
    "levy": {"kappa_prime": (_real, 6.0), "horizon": (_real, 1.0), "dt": (_real, 1e-4)},
    "dual-measure": {"gamma2": (_real, 8 / 3), "n": (_int, 128), "u_min": (_real, 0.01)},
    "verify": {"suite": (_str, None), "seeds": (_int, 3)},
}


@dataclass
class ExperimentConfig:
    command: str
    params: dict
    seed: int
    out: Path
    streams: int = 1
    files: list = field(default_factory=list)


# -- config resolution -----------------------------------------------------------

def read_config(path):
    """key=value lines ('#' comments), or a manifest.json written by a run."""
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {path}")
    if p.suffix == ".json":
        m = json.loads(p.read_text())
        d = {k: v for k, v in m.get("params", {}).items() if v is not None}
        d.update({"seed": m.get("seed"), "streams": m.get("streams")})
        return {k: v for k, v in d.items() if v is not None}
    out = {}
    for i, line in enumerate(p.read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{i}: expected key=value")
        k, v = line.split("=", 1)
        out[k.strip().replace("-", "_")] = v.strip()
    return out


def _extra_pairs(tokens):
    """--key value / --key=value pairs left over by argparse."""
    out = {}
    i = 0
    while i < len(tokens):
        t = tokens[i]
        if not t.startswith("--"):
            raise ConfigError(f"unexpected argument {t!r}")
        if "=" in t:
            k, v = t[2:].split("=", 1)
            i += 1
        else:
            if i + 1 >= len(tokens):
                raise ConfigError(f"missing value for {t}")
            k, v = t[2:], tokens[i + 1]
            i += 2
        out[k.replace("-", "_")] = v
    return out


def resolve(command, args, extra):
    schema = SCHEMAS[command]
    raw = {}
    if args.config:
        raw.update(read_config(args.config))
    for k in ("gamma2", "kappa_prime", "n", "dt", "suite"):
        v = getattr(args, k, None)
        if v is not None:
            raw[k] = v
    raw.update(extra)
    seed = raw.pop("seed", None)
    streams = raw.pop("streams", None)
    raw.pop("out", None)
    if args.seed is not None:
        seed = args.seed
    if args.streams is not None:
        streams = args.streams
    unknown = sorted(set(raw) - set(schema))
    if unknown:
        raise ConfigError(f"unknown key(s) for {command}: {', '.join(unknown)}")
    params = {}
    for k, (cast, default) in schema.items():
        if k in raw:
            try:
                params[k] = cast(raw[k])
            except (ValueError, ZeroDivisionError):
                raise ConfigError(f"bad value for {k}: {raw[k]!r}")
        else:
            params[k] = default
    try:
        seed = default_seed() if seed is None else _int(seed)
        streams = 1 if streams is None else _int(streams)
    except ValueError as e:
        raise ConfigError(str(e))
    if streams < 1:
        raise ConfigError("streams must be >= 1")
    out = Path(args.out) if args.out else Path("matelab_out") / command
    return ExperimentConfig(command, params, seed, out, streams)


def _name(base, i, cfg):
    stem, ext = base.rsplit(".", 1)
    return f"{stem}_r{i}.{ext}" if cfg.streams > 1 else base


def _record(cfg, path):
    cfg.files.append(Path(path).name)


def write_manifest(cfg, extra=None):
    files = {}
    for f in sorted(cfg.files):
        files[f] = hashlib.sha256((cfg.out / f).read_bytes()).hexdigest()
    m = {"command": cfg.command, "params": cfg.params, "seed": cfg.seed, "streams": cfg.streams,
         "version": __version__, "created": datetime.now(timezone.utc).isoformat(),
         "files": files}
    if extra:
        m.update(extra)
    io.write_json(cfg.out / "manifest.json", m)
    (cfg.out / "config.txt").write_text(
        "".join(f"{k}={v}\n" for k, v in sorted(cfg.params.items()) if v is not None)
        + f"seed={cfg.seed}\nstreams={cfg.streams}\n")


# -- commands -------------------------------------------------------------------

def _ctx(g2):
    return GammaContext(math.sqrt(g2))


def cmd_bm(cfg, s, i):
    p = cfg.params
    if p["kappa_prime"] is None:
        x = st.sample_bm(s, p["n"], p["dt"])
        rows = zip(x.t, x.values)
        return [io.write_csv(cfg.out / _name("series.csv", i, cfg), ["t", "value"], rows)], {}
    pair = st.sample_correlated_bm(s, p["n"], p["dt"], p["kappa_prime"])
    est, se = st.covariance_rate(pair)
    f = io.write_csv(cfg.out / _name("series.csv", i, cfg), ["t", "L", "R"],
                     zip(pair.L.t, pair.L.values, pair.R.values))
    return [f], {"cov_rate": est, "cov_rate_stderr": se, "target": pair.target_cov_rate}


def cmd_bessel(cfg, s, i):
    p = cfg.params
    x = st.sample_bessel(s, st.BesselParams(p["delta"], p["x0"]), p["n"], p["dt"],
                         p["zero_policy"], p["clock"])
    return [io.write_csv(cfg.out / _name("series.csv", i, cfg), ["t", "value"],
                         zip(x.t, x.values))], {"hit_index": x.meta.get("hit_index")}


def cmd_stable(cfg, s, i):
    p = cfg.params
    a = p["alpha"] if p["alpha"] is not None else p["kappa_prime"] / 4
    ser, jumps = st.sample_stable(s, st.StableParams(a, p["jump_sign"]), p["n"], p["dt"])
    f1 = io.write_csv(cfg.out / _name("series.csv", i, cfg), ["t", "value"], zip(ser.t, ser.values))
    f2 = io.write_csv(cfg.out / _name("jumps.csv", i, cfg), ["t", "size"], jumps)
    return [f1, f2], {"alpha": a, "jumps": len(jumps)}


def cmd_sle(cfg, s, i):
    p = cfg.params
    d = sle.sample_chordal_driving(s, p["kappa"], p["rho"], p["direction"], p["n"], p["dt"])
    f = io.write_csv(cfg.out / _name("driving.csv", i, cfg), ["t", "W", "V"],
                     zip(d.t, d.W.values, d.V.values))
    return [f], {"gap_dimension": d.W.meta["delta"]}


def cmd_mate(cfg, s, i):
    p = cfg.params
    pair = pe.random_pair(s, p["n"], p["kind"])
    m = pe.mate(pair)
    f = io.write_csv(cfg.out / _name("edges.csv", i, cfg), ["u", "v", "label"],
                     ((a, b, lab) for (a, b), lab in zip(m.edges, m.labels)))
    c = pe.class_census(pair)
    return [f], {"euler_characteristic": m.euler_characteristic, "faces": len(m.faces),
                 "vertices": m.n_vertices, "class_counts": c.counts, "max_preimage": c.max_preimage}


def cmd_gff(cfg, s, i):
    p = cfg.params
    f = gff.sample_gff(s, p["n"], p["boundary"])
    a = io.write_grid_csv(cfg.out / _name("field.csv", i, cfg), f.values)
    b = io.write_pgm(cfg.out / _name("field.pgm", i, cfg), f.values)
    return [a, b], {"mean": float(f.values.mean()), "var": float(f.values.var())}


def cmd_measure(cfg, s, i):
    p = cfg.params
    f = gff.sample_gff(s, p["n"], p["boundary"])
    m = gff.lqg_area_measure(f, math.sqrt(p["gamma2"]), p["eps"])
    a = io.write_grid_csv(cfg.out / _name("measure.csv", i, cfg), m.cell_mass)
    b = io.write_pgm(cfg.out / _name("measure.pgm", i, cfg), np.log(m.cell_mass))
    return [a, b], {"total_mass": m.mass()}


def cmd_surface(cfg, s, i):
    p = cfg.params
    ctx = _ctx(p["gamma2"])
    alpha = ctx.gamma if p["alpha"] is None else p["alpha"]
    prof = gff.sample_surface_profile(s, p["kind"], alpha, ctx, p["horizon"], p["du"])
    f = io.write_csv(cfg.out / _name("profile.csv", i, cfg), ["u", "H1"],
                     zip(prof.H1.t, prof.H1.values))
    return [f], {"alpha": alpha, "Q": ctx.Q, "drift": prof.H1.meta["drift"]}


def cmd_exponents(cfg, s, i):
    p = cfg.params
    ctx = _ctx(p["gamma2"])
    cat = ex.exponent_catalog(ctx, p["n_max"])
    hdr = ["name", "locus", "n", "rho", "Delta", "Delta_dual", "x", "dim"]
    f = io.write_csv(cfg.out / _name("exponents.csv", i, cfg), hdr,
                     ([e.as_row()[h] for h in hdr] for e in cat))
    return [f], {"entries": len(cat)}


def cmd_fk(cfg, s, i):
    d = ex.fk_dictionary(cfg.params["q"]).as_dict()
    return [io.write_json(cfg.out / _name("fk.json", i, cfg), d)], d


def cmd_levy(cfg, s, i):
    p = cfg.params
    fl = lf.forested_line(s, p["kappa_prime"], p["horizon"], p["dt"])
    t = fl.tree
    times = (t.start * p["dt"]) if len(t) else []
    f = io.write_csv(cfg.out / _name("tree.csv", i, cfg), ["node", "parent", "time", "boundary_length"],
                     zip(range(len(t)), t.parent, times, t.boundary_length))
    return [f], {"disks": len(t), "roots": len(t.roots), "line_length": fl.length}


def cmd_dual(cfg, s, i):
    p = cfg.params
    g = math.sqrt(p["gamma2"])
    f = gff.sample_gff(s.child(0), p["n"])
    car = gff.lqg_area_measure(f, g)
    am = lf.dual_atomic_measure(s.child(1), car, 4 / g, p["u_min"])
    out = io.write_csv(cfg.out / _name("atoms.csv", i, cfg), ["cell", "mass"],
                       zip(am.cells, am.masses))
    return [out], {"atoms": len(am.masses), "theta": am.theta, "carrier_mass": car.mass(),
                   "total": am.total()}


COMMANDS = {
    "bm": cmd_bm, "bessel": cmd_bessel, "stable": cmd_stable, "sle-driving": cmd_sle,
    "mate": cmd_mate, "gff": cmd_gff, "measure": cmd_measure, "surface": cmd_surface,
    "exponents": cmd_exponents, "fk": cmd_fk, "levy": cmd_levy, "dual-measure": cmd_dual,
}


def run(cfg):
    cfg.out.mkdir(parents=True, exist_ok=True)
    summaries = []
    for i in range(cfg.streams):
        files, summ = COMMANDS[cfg.command](cfg, RngStream(cfg.seed, i), i)
        for f in files:
            _record(cfg, f)
        summaries.append(summ)
    io.write_json(cfg.out / "summary.json", {"replicas": summaries})
    _record(cfg, cfg.out / "summary.json")
    write_manifest(cfg)
    return 0


def verify(cfg):
    from .suites import SUITES, run_suite
    name = cfg.params["suite"]
    if name not in SUITES:
        raise ConfigError(f"unknown suite {name!r} (choose from {', '.join(SUITES)})")
    cfg.out.mkdir(parents=True, exist_ok=True)
    rep = run_suite(name, cfg.params["seeds"])
    for c in rep.checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {name}:{c.name}  statistic={c.statistic:.6g} "
              f"target={c.target:.6g} tol={c.tolerance:.3g}")
    print(f"{name}: {'PASS' if rep.passed else 'FAIL'} ({rep.seconds:.1f} s)")
    io.write_json(cfg.out / "report.json", rep.as_dict())
    _record(cfg, cfg.out / "report.json")
    write_manifest(cfg, {"suite": name, "pass": rep.passed})
    return 0 if rep.passed else 1


def report(run_dir):
    d = Path(run_dir)
    manifests = sorted(d.rglob("manifest.json")) if d.is_dir() else []
    if not manifests:
        raise ConfigError(f"no manifest found under {run_dir}")
    suites = []
    for m in manifests:
        r = m.parent / "report.json"
        if r.is_file():
            suites.append(json.loads(r.read_text()))
    suites.sort(key=lambda s: s["suite"])
    failing = [f"{s['suite']}:{c['name']}" for s in suites for c in s["checks"] if not c["passed"]]
    ok = not failing
    merged = {"pass": ok, "suites": [{"suite": s["suite"], "pass": s["pass"],
                                      "checks": s["checks"]} for s in suites],
              "failing": failing, "runs": [str(m.parent.relative_to(d)) for m in manifests]}
    io.write_json(d / "consolidated.json", merged)
    for s in suites:
        print(f"{'PASS' if s['pass'] else 'FAIL'}  {s['suite']}  ({len(s['checks'])} checks)")
    for f in failing:
        print(f"  failing: {f}")
    print(f"overall: {'PASS' if ok else 'FAIL'}")
    return 0 if ok else 1


# -- entry point ----------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser():
    p = _Parser(prog="matelab", description=__doc__.splitlines()[0], allow_abbrev=False)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    for name in list(COMMANDS) + ["verify"]:
        sp = sub.add_parser(name, allow_abbrev=False)
        sp.add_argument("--seed")
        sp.add_argument("--streams")
        sp.add_argument("--out")
        sp.add_argument("--config")
        sp.add_argument("--gamma2")
        sp.add_argument("--kappa-prime", dest="kappa_prime")
        sp.add_argument("--n")
        sp.add_argument("--dt")
        if name == "verify":
            sp.add_argument("suite_pos", nargs="?")
            sp.add_argument("--suite")
    rp = sub.add_parser("report")
    rp.add_argument("run_dir")
    return p


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args, rest = parser.parse_known_args(argv)
        if args.command is None:
            raise ConfigError("a command is required")
        if args.command == "report":
            if rest:
                raise ConfigError(f"unexpected arguments {rest}")
            return report(args.run_dir)
        extra = _extra_pairs(rest)
        if args.command == "verify" and args.suite_pos:
            extra.setdefault("suite", args.suite_pos)
        cfg = resolve(args.command, args, extra)
        if args.command == "verify":
            if cfg.params["suite"] is None:
                raise ConfigError("verify needs a suite name")
            return verify(cfg)
        return run(cfg)
    except ConfigError as e:
        print(f"matelab: error: {e}", file=sys.stderr)
        return 2
    except gff.ResourceError as e:
        print(f"matelab: resource limit: {e}", file=sys.stderr)
        return 1
    except (ValueError, ArithmeticError) as e:
        print(f"matelab: error: {e}".replace("\n", " "), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

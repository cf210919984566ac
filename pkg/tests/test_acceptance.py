"""Acceptance criteria 1-11, one test (and one printed PASS/FAIL line) each.

Each criterion is evaluated by a verification suite from matelab.suites; a
suite serving several criteria runs once per session.  Run standalone with
    python3 tests/test_acceptance.py
"""
from functools import lru_cache
import sys

import pytest

from matelab.suites import run_suite

# criterion -> (suite, runtime budget in seconds, summary)
CRITERIA = {
    1: ("algebra", 1.0, "exact parameter algebra"),
    2: ("algebra", 1.0, "KPZ spot values"),
    3: ("algebra", 1.0, "FK dictionary"),
    4: ("bessel", 30.0, "correlated Brownian covariance (budget per kappa')"),
    5: ("bessel", 60.0, "Bessel drift and reversal"),
    6: ("driving", 120.0, "driving-process symmetries"),
    7: ("mating", 60.0, "mating: Euler characteristic, preimages, mass"),
    8: ("cone-times", 300.0, "cone-time geometry at kappa' = 6"),
    9: ("gff-measure", 600.0, "GFF circle averages and LQG measure"),
    10: ("stable-boundary", 300.0, "stable boundary lengths"),
    11: ("duality", 120.0, "atomic dual measure"),
}


@lru_cache(maxsize=None)
def suite_report(name):
    return run_suite(name)


def criterion_seconds(n, rep, checks):
    if rep.suite == "bessel":
        secs = [c.detail["seconds"] for c in checks]
        return max(secs) if n == 4 else sum(secs)
    return rep.seconds


def evaluate(n):
    name, budget, summary = CRITERIA[n]
    rep = suite_report(name)
    checks = [c for c in rep.checks if c.criterion == n]
    secs = criterion_seconds(n, rep, checks)
    failing = [c.name for c in checks if not c.passed]
    ok = bool(checks) and not failing and secs < budget
    stats = ", ".join(f"{c.name}={c.statistic:.5g}" for c in checks)
    line = (f"criterion {n:2d} {'PASS' if ok else 'FAIL'}  {summary}  "
            f"[{len(checks)} checks, {secs:.1f} s / {budget:g} s]  {stats}")
    return ok, line, failing, secs, budget


@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_criterion(n, capsys):
    ok, line, failing, secs, budget = evaluate(n)
    with capsys.disabled():
        print("\n" + line)
    assert not failing, f"failing checks: {failing}"
    assert secs < budget, f"runtime {secs:.1f} s exceeds {budget:g} s"
    assert ok


if __name__ == "__main__":
    results = [evaluate(n) for n in sorted(CRITERIA)]
    for r in results:
        print(r[1])
    sys.exit(0 if all(r[0] for r in results) else 1)

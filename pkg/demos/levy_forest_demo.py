"""Forested line at kappa' = 6: disk boundary lengths and their stable index.

    python3 demos/levy_forest_demo.py [lines]
"""
import sys

from matelab import levy_forest as lf
from matelab.rng import RngStream

lines = int(sys.argv[1]) if len(sys.argv) > 1 else 50
dt = 1e-4
L = [lf.forested_line(RngStream(0, k), 6.0, 1.0, dt=dt) for k in range(lines)]
disks = sum(len(x.tree) for x in L)
depth = max(int(x.tree.depth().max()) for x in L if len(x.tree))
est = lf.jump_tail_index(L, 20 * dt ** (2 / 3))
print(f"{lines} lines, {disks} disks, deepest nesting {depth}")
print(f"Hill index of boundary lengths {est.alpha_hat:.3f} +- {est.stderr:.3f} (expected 1.5)")

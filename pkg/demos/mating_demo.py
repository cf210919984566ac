"""Mate two random excursions, check the sphere topology and print the class census.

    python3 demos/mating_demo.py [n] [seed]
"""
import sys

from matelab import peanosphere as pe
from matelab.rng import RngStream

n = int(sys.argv[1]) if len(sys.argv) > 1 else 2000
seed = int(sys.argv[2]) if len(sys.argv) > 2 else 0

for kind in ("brownian", "walk"):
    pair = pe.random_pair(RngStream(seed), n, kind)
    m = pe.mate(pair)
    c = pe.class_census(pair)
    print(f"{kind:9s} V={m.n_vertices} E={m.n_edges} F={m.n_faces} "
          f"chi={m.euler_characteristic} types={c.counts} max_preimage={c.max_preimage}")

"""Cut times of a kappa' = 6 Brownian pair and their box-counting dimension.

The cut times of (L, R) are the 2pi/3-cone times of the standardized pair;
the expected dimension is 1/4.

    python3 demos/cone_times_demo.py [replicas]
"""
import math
import sys

import numpy as np

from matelab import peanosphere as pe
from matelab.rng import RngStream
from matelab.stochastic import sample_correlated_bm

reps = int(sys.argv[1]) if len(sys.argv) > 1 else 8
n = 2 ** 18
sets = []
for r in range(reps):
    pair = sample_correlated_bm(RngStream(0, r), n, 1.0, 6.0)
    cuts = pe.cut_times(pair)
    Z, st = pe.standardize(pair)
    assert np.array_equal(cuts, pe.cone_times(Z, st.theta_kappa))
    sets.append(cuts)
d, se = pe.pooled_boxcount_dimension(sets, n)
print(f"cut-time dimension {d:.3f} +- {se:.3f} (Evans: {pe.evans_dimension(2 * math.pi / 3):.3f})")

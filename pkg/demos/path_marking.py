"""
Paths through random marking
============================

Each node draws a mark in 0..k and only takes part in the round of its mark,
so no node can appear twice in a counted sequence. Averaging over all mark
vectors gives the exact path count; a single draw is a scaled sample.
"""

import itertools

import numpy as np

from ldpcount import MarkedRunConfig, gen_erdos_renyi, run_path
from ldpcount.oracle import path_count_oriented

# a 5-node graph is small enough to enumerate every mark vector
g = gen_erdos_renyi(5, 0.6, seed=2)
k = 3
outs = [run_path(g, k, MarkedRunConfig(noiseless=True, fixed_marks=m)).value
        for m in itertools.product(range(k + 1), repeat=g.n)]
print("mean over all markings:", sum(outs) / len(outs))
print("exact oriented 3-paths:", path_count_oriented(g, k))

# on a larger graph, one noisy run
g = gen_erdos_renyi(2000, 0.005, seed=3)
exact = path_count_oriented(g, 4)
vals = [run_path(g, 4, MarkedRunConfig(eps=1.0, seed=4, trial=t)).value for t in range(10)]
print(f"4-paths exact {exact}, mean of 10 runs {np.mean(vals):.0f}")

"""
The randomized-response baseline
================================

One round of randomized response gives the analyzer a noisy adjacency matrix.
Its estimates are unbiased, but every pair of nodes costs a bit, and summing
over all node tuples is only feasible for tiny graphs.
"""

import numpy as np

from ldpcount import MarkedRunConfig, gen_erdos_renyi, parse_pattern, run_path, run_rr
from ldpcount.oracle import path_count_oriented

g = gen_erdos_renyi(40, 0.15, seed=10)
p = parse_pattern("path:2")
exact = path_count_oriented(g, 2)

rr = [run_rr(g, p, 2.0, seed=11, trial=t) for t in range(200)]
print(f"exact {exact}  rr mean {np.mean([e.value for e in rr]):.1f}  rr bytes {rr[0].comm_bytes}")

# the gap in cost grows with N: quadratic for RR, linear in M + N for marking
g = gen_erdos_renyi(2000, 0.005, seed=12)
path_bytes = run_path(g, 4, MarkedRunConfig(eps=1.0)).comm_bytes
print(f"N=2000: rr payload {g.n * (g.n - 1) // 16:,} bytes, path mechanism {path_bytes:,} bytes")

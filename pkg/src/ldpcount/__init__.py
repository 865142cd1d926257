"""Multi-round edge-LDP counting of walks, paths and acyclic patterns."""

from .baseline_rr import build_noisy_graph, rr_count, run_rr
from .estimate import Estimate
from .graph import Graph, gen_average_degree, gen_erdos_renyi, load_edge_list
from .marked import (MarkedRunConfig, error_decompose, marked_error_bound, run_path,
                     run_pattern, run_star, run_with_reps, trimmed_mean)
from .oracle import (marked_pattern_count, path_count_oriented, pattern_count, star_count,
                     walk_count_oriented, walk_count_unoriented)
from .pattern import Pattern, TreeForm, automorphism_count, formulate_tree, parse_pattern, round_count
from .privacy import PrivacyAccountant, RunKeys, laplace, rr_perturb, rr_unbias
from .walk import WalkRunConfig, run_walk_basic, run_walk_opt, run_walk_unoriented, walk_error_bound

__version__ = "0.1.0"

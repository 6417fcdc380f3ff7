"""Treewidth approximation, vertex-disjoint paths and tree-decomposition DP on a CONGEST simulator."""

from .aggregation import (AggOp, DirectAggregator, SimulatedAggregator, pa_round, path_aggregate,
                          rooted_aggregate, sa_round, spanning_tree, st_path)
from .decomposition import TreeDecomposition, decomposition_of_replicated, join_decompositions, single_bag
from .dp import Solution, dp_downsweep, dp_upsweep, solve_problem
from .generators import generate, generate_with_certificate
from .graph import Graph, GraphFormatError, parse_graph, read_graph, replicate, serialize_graph, write_graph
from .oracles import (oracle_bruteforce, oracle_optimal_decomposition, oracle_treewidth_exact,
                      oracle_vertex_maxflow)
from .paths import DisjointPathsResult, batch_disjoint_paths, disjoint_paths, disjoint_paths_sets
from .sim import MessageBudgetError, RoundStats, run_on_replicated, run_rounds
from .treewidth import TwExceeded, approx_treewidth, build_splitter, decompose, even_step, odd_step
from .validators import ValidationReport, validate_decomposition

__version__ = "0.1.0"

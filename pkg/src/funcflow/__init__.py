"""Max-rate in-network function computation over capacitated networks.

Exact solvers (embedding packing and node-arc linear programs over exact
rationals), a combinatorial primal-dual approximation driven by a min-cost
tree-embedding oracle, flow decomposition back onto embeddings, extensions
(multiple trees, multiple terminals, precision weights, node energy budgets),
and a frame-based protocol simulator that executes schedules on symbol
streams.
"""

from .network import Alphabet, BIG_CAPACITY, Edge, Network, as_fraction, validate_network
from .tree import ComputationTree, evaluate_function, pre_edges, suc_edges, validate_tree
from .embedding import (Embedding, OracleStats, edge_usage, embedding_weight,
                        enumerate_embeddings, optimal_embedding,
                        optimal_embedding_with_cost, uniform_lengths,
                        validate_embedding)
from .lp import (DualSolution, EmbeddingFlows, NodeArcSolution, dual_feasible,
                 dual_objective, min_embedding_weight, node_arc_dimensions,
                 node_arc_from_embedding_flows, solve_embedding_edge_exact,
                 solve_node_arc, verify_embedding_flows, verify_node_arc)
from .decompose import DecomposeStats, decompose
from .primal_dual import ApproxParams, ApproxResult, approx_max_rate, iteration_bound
from .extensions import (EnergyModel, MultiTerminalInstance, TerminalProblem,
                         energy_approx, energy_exact, energy_load,
                         multi_terminal_concurrent,
                         multi_terminal_concurrent_exact,
                         multi_terminal_weighted_sum,
                         multi_terminal_weighted_sum_exact, multi_tree_approx,
                         multi_tree_exact, optimal_embedding_energy,
                         precision_approx, precision_exact)
from .protocol import (RoundedFlows, Schedule, best_rational_below,
                       build_schedule, compute_delays, expected_outputs,
                       round_flows, simulate, verify_schedule)
from . import errors

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from funcflow.embedding import Embedding, edge_usage
from funcflow.instances import (butterfly_instance, diamond_instance,
                                line_instance, product_sum_instance,
                                random_instance, relay_instance)
from funcflow.lp import (EmbeddingFlows, NodeArcSolution, dual_feasible,
                         dual_objective, min_embedding_weight,
                         node_arc_dimensions, node_arc_from_embedding_flows,
                         solve_embedding_edge_exact, solve_node_arc,
                         verify_embedding_flows, verify_node_arc)
from funcflow.network import Alphabet, Edge, Network
from funcflow.tree import ComputationTree


def test_diamond_exact_rate_one():
    net, tree = diamond_instance()
    flows, dual = solve_embedding_edge_exact(net, tree)
    assert flows.total == 1
    assert dual.objective == 1
    assert verify_embedding_flows(net, flows) == []


def test_zero_capacity_terminal_edge():
    net, tree = diamond_instance()
    edges = list(net.edges)
    edges[2] = Edge(2, 3, Fraction(0), True)
    crippled = Network(net.n, edges, net.sources, net.terminal, net.alphabet)
    flows, _dual = solve_embedding_edge_exact(crippled, tree)
    assert flows.total == 0


def test_butterfly_exact_three_halves():
    net, tree = butterfly_instance()
    flows, dual = solve_embedding_edge_exact(net, tree)
    assert flows.total == Fraction(3, 2)
    assert dual.objective == Fraction(3, 2)


def test_node_arc_identity_single_edge():
    net = Network(2, [Edge(0, 1, Fraction(7, 3))], sources=(0,), terminal=1,
                  alphabet=Alphabet(5))
    tree = ComputationTree(2, [(1, 2)])
    sol = solve_node_arc(net, tree)
    assert sol.rate == Fraction(7, 3)
    assert verify_node_arc(net, tree, sol) == []


def test_node_arc_matches_embedding_edge_on_diamond():
    net, tree = diamond_instance()
    sol = solve_node_arc(net, tree)
    flows, _ = solve_embedding_edge_exact(net, tree)
    assert sol.rate == flows.total == 1


def test_superposed_embedding_flows_verify():
    # rate-1 and rate-1/2 flows on two hand-drawn plans stay feasible jointly
    net, tree = product_sum_instance(cap=2)
    plan_a = Embedding(((0, 2), (1, 2), (3, 4), (2, 4), (4, 5)))
    plan_b = Embedding(((0, 2), (1, 2), (3, 4, 5), (2, 4, 5), (5,)))
    flows = EmbeddingFlows({plan_a: Fraction(1), plan_b: Fraction(1, 2)})
    sol = node_arc_from_embedding_flows(net, tree, flows)
    assert sol.rate == Fraction(3, 2)
    assert verify_node_arc(net, tree, sol) == []


def test_verify_node_arc_zero_solution():
    net, tree = diamond_instance()
    assert verify_node_arc(net, tree, NodeArcSolution(rate=Fraction(0))) == []


def test_verify_node_arc_missing_flows():
    net, tree = diamond_instance()
    bad = NodeArcSolution(rate=Fraction(1))
    kinds = {v[0] for v in verify_node_arc(net, tree, bad)}
    assert "termination" in kinds and "generation" in kinds


def test_verify_node_arc_accepts_solver_output():
    net, tree = relay_instance()
    sol = solve_node_arc(net, tree)
    assert sol.rate == Fraction(3, 2)
    assert verify_node_arc(net, tree, sol) == []


def test_dual_objective_and_feasibility():
    net, tree = line_instance()
    assert dual_objective(net, [Fraction(0)] * 2) == 0
    assert not dual_feasible(net, tree, [Fraction(0)] * 2)
    halves = [Fraction(1, 2), Fraction(1, 2)]
    assert dual_objective(net, halves) == 1
    assert min_embedding_weight(net, tree, halves) == 1
    assert dual_feasible(net, tree, halves)


def test_weak_duality_on_line():
    net, tree = line_instance()
    flows, _ = solve_embedding_edge_exact(net, tree)
    halves = [Fraction(1, 2), Fraction(1, 2)]
    assert dual_feasible(net, tree, halves)
    assert dual_objective(net, halves) >= flows.total


def test_node_arc_dimensions_formulas():
    net, tree = line_instance()          # n=3, m=2 directed, kappa=2, 3 types
    variables, constraints = node_arc_dimensions(net, tree)
    assert variables == 2 * 3 + 3 * 3 + 1
    assert constraints == 2 * 3 + 3 + 2 * 3 + 2

    net, tree = relay_instance()         # n=6, m=7 undirected, kappa=2, 3 types
    variables, constraints = node_arc_dimensions(net, tree)
    assert variables == 2 * 7 * 3 + 6 * 3 + 1
    assert constraints == 2 * 6 + 6 + 2 * 6 + 7


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6))
def test_strong_duality_and_decompose(seed):
    from funcflow.decompose import decompose
    r = random.Random(seed)
    net, tree = random_instance(r, n_max=6, m_max=9, max_embeddings=250)
    flows, dual = solve_embedding_edge_exact(net, tree)
    sol = solve_node_arc(net, tree)
    assert sol.rate == flows.total
    assert dual.objective == flows.total
    if flows.total > 0:
        # the exact dual prices form a feasible length function
        assert min_embedding_weight(net, tree, dual.lengths) >= 1
    assert verify_node_arc(net, tree, sol) == []
    assert verify_embedding_flows(net, flows) == []
    back = decompose(net, tree, sol)
    assert back.total == sol.rate
    assert verify_embedding_flows(net, back) == []

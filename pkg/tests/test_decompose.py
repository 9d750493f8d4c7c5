import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from funcflow import errors
from funcflow.decompose import DecomposeStats, decompose
from funcflow.embedding import Embedding, validate_embedding
from funcflow.instances import diamond_instance, random_instance
from funcflow.lp import (EmbeddingFlows, NodeArcSolution,
                         node_arc_from_embedding_flows,
                         solve_embedding_edge_exact, solve_node_arc,
                         verify_embedding_flows, verify_node_arc)
from funcflow.network import Alphabet, Edge, Network
from funcflow.tree import ComputationTree


def test_inverts_single_embedding():
    net, tree = diamond_instance()
    emb = Embedding(((0, 2), (1, 2), (2, 3)))
    sol = node_arc_from_embedding_flows(net, tree, EmbeddingFlows({emb: Fraction(1)}))
    out = decompose(net, tree, sol, debug=True)
    assert out.flows == {emb: Fraction(1)}


def cyclic_net():
    # triangle b=0, c=1, a=2 hangs off the compute node a; node ids of the
    # cycle are smaller than the source, so the walker meets the cycle first
    edges = [Edge(3, 2, Fraction(3)), Edge(4, 2, Fraction(3)),
             Edge(2, 5, Fraction(3)), Edge(2, 0, Fraction(3)),
             Edge(0, 1, Fraction(3)), Edge(1, 2, Fraction(3))]
    net = Network(6, edges, sources=(3, 4), terminal=5, alphabet=Alphabet(5))
    tree = ComputationTree(4, [(1, 3), (2, 3), (3, 4)], {3: "add-mod-q"})
    return net, tree


def test_redundant_cycle_removed_without_rate_change():
    net, tree = cyclic_net()
    emb = Embedding(((3, 2), (4, 2), (2, 5)))
    base = node_arc_from_embedding_flows(net, tree, EmbeddingFlows({emb: Fraction(1)}))
    plain = decompose(net, tree, base, debug=True)

    # a circulation of type 1 around the triangle 2 -> 0 -> 1 -> 2
    y = Fraction(1, 2)
    noisy = NodeArcSolution(rate=base.rate,
                            edge_flows=dict(base.edge_flows),
                            self_flows=dict(base.self_flows))
    for (a, b) in ((2, 0), (0, 1), (1, 2)):
        key = (1, a, b)
        noisy.edge_flows[key] = noisy.edge_flows.get(key, Fraction(0)) + y
    assert verify_node_arc(net, tree, noisy) == []

    stats = DecomposeStats()
    cleaned = decompose(net, tree, noisy, debug=True, stats=stats)
    assert cleaned.flows == plain.flows
    assert stats.cycles_removed >= 1
    # every excision and extraction kills at least one variable
    assert all(b > a for b, a in zip(stats.nonzero_history,
                                     stats.nonzero_history[1:]))


def test_zero_rate_gives_empty_flows():
    net, tree = diamond_instance()
    out = decompose(net, tree, NodeArcSolution(rate=Fraction(0)))
    assert out.flows == {}


def test_infeasible_input_rejected():
    net, tree = diamond_instance()
    with pytest.raises(errors.InfeasibleInput):
        decompose(net, tree, NodeArcSolution(rate=Fraction(1)))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_round_trip_from_node_arc(seed):
    r = random.Random(seed)
    net, tree = random_instance(r, n_max=6, m_max=9, max_embeddings=250)
    sol = solve_node_arc(net, tree)
    stats = DecomposeStats()
    flows = decompose(net, tree, sol, debug=True, stats=stats)
    assert flows.total == sol.rate
    assert verify_embedding_flows(net, flows) == []
    for emb in flows.flows:
        validate_embedding(net, tree, emb)
    assert stats.extractions <= len(stats.nonzero_history)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6))
def test_round_trip_from_embedding_flows(seed):
    r = random.Random(seed)
    net, tree = random_instance(r, n_max=6, m_max=9, max_embeddings=250)
    flows, _ = solve_embedding_edge_exact(net, tree)
    sol = node_arc_from_embedding_flows(net, tree, flows)
    assert verify_node_arc(net, tree, sol) == []
    back = decompose(net, tree, sol, debug=True)
    assert back.total == flows.total

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from funcflow import errors
from funcflow.embedding import (Embedding, OracleStats, edge_usage,
                                embedding_weight, enumerate_embeddings,
                                optimal_embedding, optimal_embedding_with_cost,
                                validate_embedding)
from funcflow.instances import (diamond_instance, line_instance,
                                random_instance, random_lengths)

from conftest import brute_min_weight


def line_embeddings():
    compute_mid = Embedding(((0, 1), (1,), (1, 2)))
    compute_end = Embedding(((0, 1, 2), (1, 2), (2,)))
    return compute_mid, compute_end


def test_edge_usage_compute_at_terminal():
    net, tree = line_instance()
    _mid, end = line_embeddings()
    usage = edge_usage(net, end)
    assert usage == {net.edge_index(1, 2): 2, net.edge_index(0, 1): 1}


def test_edge_usage_compute_at_middle():
    net, tree = line_instance()
    mid, _end = line_embeddings()
    usage = edge_usage(net, mid)
    assert usage == {net.edge_index(0, 1): 1, net.edge_index(1, 2): 1}


def test_edge_usage_disjoint_paths_binary():
    net, tree = diamond_instance()
    emb = Embedding(((0, 2), (1, 2), (2, 3)))
    assert set(edge_usage(net, emb).values()) == {1}


def test_weight_unit_lengths():
    net, _tree = line_instance()
    _mid, end = line_embeddings()
    assert embedding_weight(net, end, [Fraction(1)] * 2) == 3
    assert embedding_weight(net, end, [Fraction(0)] * 2) == 0


def test_weight_single_lengths():
    net, _tree = line_instance()
    mid, end = line_embeddings()
    lengths = [Fraction(1), Fraction(3)]
    assert embedding_weight(net, mid, lengths) == 4
    assert embedding_weight(net, end, lengths) == 7


def test_weight_dimension_mismatch():
    net, _tree = line_instance()
    mid, _ = line_embeddings()
    with pytest.raises(errors.DimensionMismatch):
        embedding_weight(net, mid, [Fraction(1)])


def test_validate_embedding_catches_broken_anchor():
    net, tree = line_instance()
    with pytest.raises(errors.InvalidEmbedding):
        validate_embedding(net, tree, Embedding(((1,), (1,), (1, 2))))


def test_line_enumeration_exactly_two():
    net, tree = line_instance()
    embs = enumerate_embeddings(net, tree)
    assert sorted(e.paths for e in embs) == [
        ((0, 1), (1,), (1, 2)),
        ((0, 1, 2), (1, 2), (2,)),
    ]


def test_diamond_enumeration_two_sites():
    net, tree = diamond_instance()
    embs = enumerate_embeddings(net, tree)
    starts = sorted(e.path(3)[0] for e in embs)
    assert starts == [2, 3]   # compute at the relay or at the terminal


def test_enumeration_cap():
    net, tree = diamond_instance()
    with pytest.raises(errors.TooMany):
        enumerate_embeddings(net, tree, cap=1)


def test_oracle_line_weights():
    net, tree = line_instance()
    emb, cost = optimal_embedding_with_cost(net, tree, [Fraction(1), Fraction(3)])
    assert emb.paths == ((0, 1), (1,), (1, 2))
    assert cost == 4


def test_oracle_zero_lengths_returns_zero_weight():
    net, tree = diamond_instance()
    emb, cost = optimal_embedding_with_cost(net, tree, [Fraction(0)] * net.m)
    assert cost == 0


def test_oracle_matches_enumeration_on_diamond():
    net, tree = diamond_instance()
    lengths = [Fraction(1)] * net.m
    _emb, cost = optimal_embedding_with_cost(net, tree, lengths)
    assert cost == brute_min_weight(net, tree, lengths)


def test_oracle_unreachable():
    net, tree = line_instance()
    bad = net.with_endpoints((2, 1), 0)  # directed edges forbid reaching node 0
    with pytest.raises(errors.Unreachable):
        optimal_embedding(bad, tree, [Fraction(1), Fraction(1)])


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_oracle_equals_bruteforce(seed):
    r = random.Random(seed)
    net, tree = random_instance(r, n_max=6, m_max=9, max_embeddings=300)
    lengths = random_lengths(r, net.m)
    emb, cost = optimal_embedding_with_cost(net, tree, lengths)
    validate_embedding(net, tree, emb)
    assert embedding_weight(net, emb, lengths) == cost
    assert cost == brute_min_weight(net, tree, lengths)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_oracle_monotone_in_lengths(seed):
    r = random.Random(seed)
    net, tree = random_instance(r, n_max=6, m_max=9, max_embeddings=300)
    lengths = random_lengths(r, net.m, zero_prob=0)
    _, before = optimal_embedding_with_cost(net, tree, lengths)
    bumped = list(lengths)
    bumped[r.randrange(net.m)] += Fraction(3, 2)
    _, after = optimal_embedding_with_cost(net, tree, bumped)
    assert after >= before


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([Fraction(2), Fraction(1, 3), Fraction(7, 2)]))
def test_oracle_scale_equivariant(seed, c):
    r = random.Random(seed)
    net, tree = random_instance(r, n_max=6, m_max=9, max_embeddings=300)
    lengths = random_lengths(r, net.m)
    _, base = optimal_embedding_with_cost(net, tree, lengths)
    _, scaled = optimal_embedding_with_cost(net, tree, [c * l for l in lengths])
    assert scaled == c * base


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_omega_tables_are_relaxation_fixpoints(seed):
    from funcflow.embedding import _forward_tables
    r = random.Random(seed)
    net, tree = random_instance(r, n_max=6, m_max=9, max_embeddings=300)
    lengths = random_lengths(r, net.m)
    arc_cost = [lengths[e] for (_v, _u, e) in net.arcs]
    omega, _sigma = _forward_tables(net, tree, lambda i: arc_cost,
                                    lambda i: 0, lambda i, u: 0)
    for i in range(1, tree.num_edges + 1):
        om = omega[i]
        for (v, u, e) in net.arcs:
            if om[v] is None:
                continue
            assert om[u] is not None and om[u] <= om[v] + lengths[e]


def test_oracle_stats_counters():
    net, tree = diamond_instance()
    stats = OracleStats()
    optimal_embedding(net, tree, [Fraction(1)] * net.m, stats=stats)
    assert stats.pops > 0 and stats.relaxations > 0

import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from funcflow import errors
from funcflow.instances import (butterfly_instance, diamond_instance,
                                random_instance)
from funcflow.lp import solve_embedding_edge_exact, verify_embedding_flows
from funcflow.network import Alphabet, Edge, Network
from funcflow.primal_dual import (ApproxParams, approx_max_rate,
                                  iteration_bound)
from funcflow.tree import ComputationTree


def identity_instance(cap=1):
    net = Network(2, [Edge(0, 1, Fraction(cap))], sources=(0,), terminal=1,
                  alphabet=Alphabet(5))
    return net, ComputationTree(2, [(1, 2)])


def test_diamond_within_ten_percent():
    net, tree = diamond_instance()
    res = approx_max_rate(net, tree, 0.1)
    assert Fraction(9, 10) <= res.rate_exact <= 1


def test_single_edge_identity():
    net, tree = identity_instance()
    res = approx_max_rate(net, tree, 0.1)
    assert Fraction(9, 10) <= res.rate_exact <= 1


def test_flows_exactly_feasible():
    net, tree = butterfly_instance()
    res = approx_max_rate(net, tree, 0.1)
    assert verify_embedding_flows(net, res.flows) == []
    assert res.rate_exact <= Fraction(3, 2)


def test_dual_monotone_and_saturation():
    net, tree = butterfly_instance()
    records = []
    res = approx_max_rate(net, tree, 0.3, trace=records.append)
    assert len(records) == res.iterations
    assert all(a["D"] < b["D"] for a, b in zip(records, records[1:]))
    eps = ApproxParams.from_accuracy(0.3).eps
    assert all(rec["factor_star"] == 1.0 + eps for rec in records)


def test_iteration_bound_shape():
    net7 = Network(8, [Edge(i, i + 1, Fraction(1)) for i in range(7)],
                   sources=(0,), terminal=7, alphabet=Alphabet(2))
    b_m7 = iteration_bound(net7, ApproxParams(eps=0.1))
    assert isinstance(b_m7, int) and b_m7 > 0
    net14 = Network(15, [Edge(i, i + 1, Fraction(1)) for i in range(14)],
                    sources=(0,), terminal=14, alphabet=Alphabet(2))
    b_m14 = iteration_bound(net14, ApproxParams(eps=0.1))
    # m log m: doubling m scales by 2 log(2m)/log(m), just under e for m=7
    assert 2 * b_m7 <= b_m14 <= 3 * b_m7
    assert iteration_bound(net7, ApproxParams(eps=0.05)) > b_m7


def test_iteration_cap_enforced():
    net, tree = butterfly_instance()
    with pytest.raises(errors.IterationCapExceeded):
        approx_max_rate(net, tree, ApproxParams(eps=0.05, iteration_cap=3))


def test_zero_capacity_rejected():
    net, tree = diamond_instance()
    edges = list(net.edges)
    edges[0] = Edge(0, 2, Fraction(0), True)
    bad = Network(net.n, edges, net.sources, net.terminal, net.alphabet)
    with pytest.raises(errors.ZeroCapacity):
        approx_max_rate(bad, tree, 0.1)


@settings(max_examples=12, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([0.3, 0.1]))
def test_guarantee_and_sandwich(seed, eps_user):
    r = random.Random(seed)
    net, tree = random_instance(r, n_max=6, m_max=8, max_embeddings=200)
    exact, _ = solve_embedding_edge_exact(net, tree)
    opt = exact.total
    if opt == 0:
        return
    res = approx_max_rate(net, tree, eps_user)
    assert res.rate_exact <= opt
    assert res.rate_exact >= (1 - Fraction(str(eps_user))) * opt
    assert res.iterations <= iteration_bound(net, ApproxParams.from_accuracy(eps_user))
    assert res.dual.objective >= float(opt) - 1e-9

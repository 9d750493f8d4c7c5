from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from funcflow import errors
from funcflow.instances import random_network
from funcflow.network import Alphabet, Edge, Network, as_fraction, validate_network


def triangle(caps=(1, 1, 1)):
    return Network(3, [Edge(0, 1, Fraction(caps[0])),
                       Edge(1, 2, Fraction(caps[1])),
                       Edge(0, 2, Fraction(caps[2]))],
                   sources=(0,), terminal=1)


def test_triangle_validates():
    validate_network(triangle())


def test_two_disjoint_edges_disconnected():
    net = Network(4, [Edge(0, 1, Fraction(1)), Edge(2, 3, Fraction(1))],
                  sources=(0,), terminal=1)
    with pytest.raises(errors.Disconnected):
        validate_network(net)


def test_negative_capacity():
    net = Network(2, [Edge(0, 1, Fraction(-1))], sources=(0,), terminal=1)
    with pytest.raises(errors.NegativeCapacity):
        validate_network(net)


def test_duplicate_edge_rejected():
    net = Network(2, [Edge(0, 1, Fraction(1)), Edge(1, 0, Fraction(2))],
                  sources=(0,), terminal=1)
    with pytest.raises(errors.DuplicateEdge):
        validate_network(net)


def test_self_loop_rejected():
    net = Network(2, [Edge(0, 1, Fraction(1)), Edge(1, 1, Fraction(1))],
                  sources=(0,), terminal=1)
    with pytest.raises(errors.DuplicateEdge):
        validate_network(net)


def test_repeated_sources_rejected():
    net = Network(3, [Edge(0, 1, Fraction(1)), Edge(1, 2, Fraction(1))],
                  sources=(0, 0), terminal=2)
    with pytest.raises(errors.BadSourceTerminal):
        validate_network(net)


def test_terminal_out_of_range():
    net = Network(2, [Edge(0, 1, Fraction(1))], sources=(0,), terminal=5)
    with pytest.raises(errors.BadSourceTerminal):
        validate_network(net)


def test_alphabet_requires_two_symbols():
    with pytest.raises(ValueError):
        Alphabet(1)


def test_directed_edges_shape_arcs():
    net = Network(2, [Edge(0, 1, Fraction(1), directed=True)],
                  sources=(0,), terminal=1)
    assert [(b, e) for (b, e, _a) in net.out_arcs[0]] == [(1, 0)]
    assert net.out_arcs[1] == ()


@given(st.integers(0, 10**6))
def test_random_networks_validate_and_reach_terminal(seed):
    import random
    net = random_network(random.Random(seed))
    validate_network(net)
    # validation implies every node is reachable from the terminal
    seen = {net.terminal}
    frontier = [net.terminal]
    touch = [[] for _ in range(net.n)]
    for e in net.edges:
        touch[e.u].append(e.v)
        touch[e.v].append(e.u)
    while frontier:
        v = frontier.pop()
        for u in touch[v]:
            if u not in seen:
                seen.add(u)
                frontier.append(u)
    assert len(seen) == net.n


@pytest.mark.parametrize("text,expected", [
    ("3/2", Fraction(3, 2)),
    ("0.1", Fraction(1, 10)),
    (2, Fraction(2)),
    (Fraction(7, 3), Fraction(7, 3)),
])
def test_as_fraction(text, expected):
    assert as_fraction(text) == expected

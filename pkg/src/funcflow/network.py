"""Capacitated communication network: nodes, (un)directed edges, sources, one terminal.

Capacities are exact rationals in |alphabet|-ary units.  An undirected edge
shares one capacity across both directions; a directed edge carries flow only
from u to v.  Node ids are the integers 0..n-1.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from .errors import BadSourceTerminal, Disconnected, DuplicateEdge, NegativeCapacity

# Stand-in capacity for "infinite" links, e.g. when splitting a physical node
# that generates several data sequences into co-located virtual sources.
BIG_CAPACITY = Fraction(10**9)


def as_fraction(value) -> Fraction:
    """Coerce int/float/str/Fraction to an exact Fraction. Strings may be 'p/q' or decimal."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        # exact binary value of the float; CLI documents decimal strings for exactness
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as a rational")


@dataclass(frozen=True)
class Alphabet:
    """Finite symbol alphabet; symbols are residues 0..q-1."""

    q: int

    def __post_init__(self):
        if self.q < 2:
            raise ValueError(f"alphabet size must be >= 2, got {self.q}")


@dataclass(frozen=True)
class Edge:
    u: int
    v: int
    cap: Fraction
    directed: bool = False

    @property
    def key(self):
        return (self.u, self.v) if self.u <= self.v else (self.v, self.u)


class Network:
    """Immutable after construction; structural checks live in validate_network()."""

    def __init__(self, num_nodes, edges, sources, terminal, alphabet=Alphabet(2)):
        self.n = int(num_nodes)
        self.edges = tuple(
            e if isinstance(e, Edge) else Edge(e[0], e[1], as_fraction(e[2]), *e[3:])
            for e in edges
        )
        self.sources = tuple(sources)
        self.terminal = int(terminal)
        self.alphabet = alphabet
        self._index = {}
        for i, e in enumerate(self.edges):
            self._index.setdefault(e.key, i)
        # arcs = permitted directed traversals (v, u, edge_index, arc_id)
        arcs = []
        out = [[] for _ in range(self.n)]
        inn = [[] for _ in range(self.n)]
        for i, e in enumerate(self.edges):
            if not (0 <= e.u < self.n and 0 <= e.v < self.n):
                continue  # caught by validate_network
            pairs = [(e.u, e.v)] if e.directed else [(e.u, e.v), (e.v, e.u)]
            for a, b in pairs:
                aid = len(arcs)
                arcs.append((a, b, i))
                out[a].append((b, i, aid))
                inn[b].append((a, i, aid))
        for lst in out:
            lst.sort()
        for lst in inn:
            lst.sort()
        self.arcs = tuple(arcs)
        self.out_arcs = tuple(tuple(l) for l in out)
        self.in_arcs = tuple(tuple(l) for l in inn)

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def kappa(self) -> int:
        return len(self.sources)

    def edge_index(self, u, v):
        key = (u, v) if u <= v else (v, u)
        idx = self._index.get(key)
        if idx is None:
            raise KeyError(f"no edge between {u} and {v}")
        return idx

    def capacities(self):
        return [e.cap for e in self.edges]

    def with_endpoints(self, sources, terminal) -> "Network":
        """Same topology, different sources/terminal (multi-terminal problems)."""
        return Network(self.n, self.edges, sources, terminal, self.alphabet)

    def __repr__(self):
        return (f"Network(n={self.n}, m={self.m}, sources={self.sources}, "
                f"terminal={self.terminal})")


def validate_network(net: Network) -> None:
    """Raise a named error unless all structural invariants hold.

    Checks: node ids in range, simple graph (no self-loops, no parallel edges,
    including antiparallel directed pairs), nonnegative capacities, distinct
    sources and valid terminal, and connectivity ignoring edge directions.
    """
    if net.n < 1:
        raise BadSourceTerminal("network has no nodes")
    if not net.sources:
        raise BadSourceTerminal("at least one source is required")
    if len(set(net.sources)) != len(net.sources):
        raise BadSourceTerminal("sources must be pairwise distinct",
                                sources=net.sources)
    for s in net.sources:
        if not (0 <= s < net.n):
            raise BadSourceTerminal(f"source {s} is not a node id")
    if not (0 <= net.terminal < net.n):
        raise BadSourceTerminal(f"terminal {net.terminal} is not a node id")

    seen = set()
    for e in net.edges:
        if not (0 <= e.u < net.n and 0 <= e.v < net.n):
            raise BadSourceTerminal(f"edge endpoint out of range: {e.u},{e.v}")
        if e.u == e.v:
            raise DuplicateEdge(f"self-loop at node {e.u} is not a physical edge")
        if e.key in seen:
            raise DuplicateEdge(f"more than one edge between {e.key[0]} and {e.key[1]}")
        seen.add(e.key)
        if e.cap < 0:
            raise NegativeCapacity(f"edge {e.u}-{e.v} has capacity {e.cap}")

    # connectivity from the terminal, ignoring directions
    reached = {net.terminal}
    frontier = deque([net.terminal])
    undirected = [[] for _ in range(net.n)]
    for e in net.edges:
        undirected[e.u].append(e.v)
        undirected[e.v].append(e.u)
    while frontier:
        v = frontier.popleft()
        for u in undirected[v]:
            if u not in reached:
                reached.add(u)
                frontier.append(u)
    if len(reached) != net.n:
        missing = sorted(set(range(net.n)) - reached)
        raise Disconnected(f"nodes unreachable from terminal: {missing}")

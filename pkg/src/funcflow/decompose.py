"""Convert a feasible node-arc solution into embedding flows of the same rate.

Repeatedly walks each type backwards from the terminal along positive flow,
excising cycles of redundant flow as they are met, then extracts the largest
flow the assembled embedding supports and subtracts it from every edge and
generation self-loop it touches.  Exact rationals throughout; termination is
certified by the nonzero-variable count dropping at every excision and every
extraction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .embedding import Embedding
from .errors import InfeasibleInput, Nontermination
from .lp import EmbeddingFlows, NodeArcSolution, verify_node_arc
from .network import Network
from .tree import ComputationTree


@dataclass
class DecomposeStats:
    extractions: int = 0
    cycles_removed: int = 0
    nonzero_history: list = field(default_factory=list)
    dead_ends: int = 0


def decompose(net: Network, tree: ComputationTree, sol: NodeArcSolution,
              debug: bool = False, stats: DecomposeStats | None = None,
              precision=None) -> EmbeddingFlows:
    """Embedding flows with total exactly sol.rate; input must verify feasible."""
    violations = verify_node_arc(net, tree, sol, precision=precision)
    if violations:
        raise InfeasibleInput("node-arc solution violates constraints",
                              count=len(violations))

    g = tree.num_edges
    ef = {k: v for k, v in sol.edge_flows.items() if v}
    sf = {k: v for k, v in sol.self_flows.items() if v}
    lam_rem = sol.rate
    extracted = {}

    def nonzero_count():
        return len(ef) + len(sf)

    event_guard = nonzero_count() + 2
    events = 0
    if stats is not None:
        stats.nonzero_history.append(nonzero_count())

    def check(tag):
        if debug:
            current = NodeArcSolution(rate=lam_rem, edge_flows=ef, self_flows=sf)
            bad = verify_node_arc(net, tree, current, precision=precision)
            if bad:
                raise Nontermination(f"feasibility lost after {tag}", violations=bad[:3])

    def bump():
        nonlocal events
        events += 1
        if events > event_guard:
            raise Nontermination("more removals than flow variables", guard=event_guard)
        if stats is not None:
            before = stats.nonzero_history[-1]
            now = nonzero_count()
            stats.nonzero_history.append(now)
            if now >= before:
                raise Nontermination("nonzero-variable count did not decrease",
                                     before=before, now=now)

    def pick_pred(theta, v):
        if sf.get((theta, v), 0) > 0:
            return v
        for (u, _e, _a) in net.in_arcs[v]:
            if ef.get((theta, u, v), 0) > 0:
                return u
        return None

    while lam_rem != 0:
        z = {net.terminal: lam_rem}
        walk = {g: [net.terminal]}
        for i in range(g, 0, -1):
            path = walk[i]
            while True:
                v = path[0]
                u = pick_pred(i, v)
                if u is None:
                    if stats is not None:
                        stats.dead_ends += 1
                    raise Nontermination(f"walker stranded at node {v} for type {i}")
                if u != v and u in path:
                    # redundant flow cycle u -> v -> ... -> u; drain and excise it
                    idx = path.index(u)
                    cycle = [(u, path[0])] + [(path[j], path[j + 1]) for j in range(idx)]
                    y = min(ef[(i, a, b)] for a, b in cycle)
                    for a, b in cycle:
                        ef[(i, a, b)] -= y
                        if not ef[(i, a, b)]:
                            del ef[(i, a, b)]
                    del path[0:idx]
                    if stats is not None:
                        stats.cycles_removed += 1
                    bump()
                    check("cycle removal")
                    continue
                if u != v:
                    z[u] = min(z[v], ef[(i, u, v)])
                    path.insert(0, u)
                    continue
                z[v] = min(z[v], sf[(i, v)])
                for eta in tree._pre[i]:
                    walk[eta] = [v]
                break

        emb = Embedding(tuple(tuple(walk[i]) for i in range(1, g + 1)))
        x = lam_rem
        for i in range(1, g + 1):
            p = walk[i]
            for a, b in zip(p, p[1:]):
                x = min(x, ef[(i, a, b)])
            x = min(x, sf[(i, p[0])])
        if debug and z.get(net.sources[0]) is not None:
            assert x <= z[net.sources[0]]
        if x <= 0:
            raise Nontermination("extracted a nonpositive flow", value=x)
        for i in range(1, g + 1):
            p = walk[i]
            for a, b in zip(p, p[1:]):
                ef[(i, a, b)] -= x
                if not ef[(i, a, b)]:
                    del ef[(i, a, b)]
            key = (i, p[0])
            sf[key] -= x
            if not sf[key]:
                del sf[key]
        extracted[emb] = extracted.get(emb, Fraction(0)) + x
        lam_rem -= x
        if stats is not None:
            stats.extractions += 1
        bump()
        check("extraction")

    return EmbeddingFlows(extracted)

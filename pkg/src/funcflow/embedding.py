"""Embeddings of a computation tree into a network, and the min-cost embedding oracle.

An embedding maps every tree edge (data type) to a network path such that
source types start at their sources, each type starts where all of its
predecessor types end, and the final type ends at the terminal.  A length-1
path means the type is generated and consumed at that node without travelling.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import DimensionMismatch, InvalidEmbedding, TooMany, Unreachable
from .network import Network
from .tree import ComputationTree, pre_edges


@dataclass(frozen=True)
class Embedding:
    """paths[i] is the node path carrying edge type i+1; tree_id disambiguates
    embeddings of different trees in multi-tree problems."""

    paths: tuple
    tree_id: int = 0

    def path(self, theta: int):
        return self.paths[theta - 1]

    def __lt__(self, other):
        return (self.tree_id, self.paths) < (other.tree_id, other.paths)


@dataclass
class OracleStats:
    """Operation counters for complexity-trend checks."""

    pops: int = 0
    relaxations: int = 0
    init_ops: int = 0


def validate_embedding(net: Network, tree: ComputationTree, emb: Embedding) -> None:
    """Check anchoring, concatenation and adjacency; raise InvalidEmbedding."""
    g = tree.num_edges
    if len(emb.paths) != g:
        raise InvalidEmbedding(f"expected {g} paths, got {len(emb.paths)}")
    starts = {}
    ends = {}
    for i in range(1, g + 1):
        p = emb.path(i)
        if len(p) < 1:
            raise InvalidEmbedding(f"empty path for type {i}")
        for a, b in zip(p, p[1:]):
            ok = False
            for (nb, _e, _a) in net.out_arcs[a]:
                if nb == b:
                    ok = True
                    break
            if not ok:
                raise InvalidEmbedding(f"step {a}->{b} in type {i} is not a "
                                       f"permitted traversal")
        starts[i], ends[i] = p[0], p[-1]
    for l in range(1, tree.kappa + 1):
        if starts[l] != net.sources[l - 1]:
            raise InvalidEmbedding(f"type {l} must start at source node "
                                   f"{net.sources[l - 1]}, starts at {starts[l]}")
    if ends[g] != net.terminal:
        raise InvalidEmbedding(f"final type must end at terminal {net.terminal}")
    for i in range(1, g + 1):
        for eta in pre_edges(tree, i):
            if ends[eta] != starts[i]:
                raise InvalidEmbedding(f"type {eta} ends at {ends[eta]} but its "
                                       f"successor {i} starts at {starts[i]}")


def edge_usage(net: Network, emb: Embedding) -> dict:
    """Times each network edge is traversed, summed over all types.

    Repeated traversals inside one walk count repeatedly; unused edges are
    absent from the result.
    """
    usage = {}
    for p in emb.paths:
        for a, b in zip(p, p[1:]):
            e = net.edge_index(a, b)
            usage[e] = usage.get(e, 0) + 1
    return usage


def embedding_weight(net: Network, emb: Embedding, lengths):
    """Sum over edges of usage count times edge length."""
    if len(lengths) != net.m:
        raise DimensionMismatch(f"{len(lengths)} lengths for {net.m} edges")
    total = 0
    for e, r in edge_usage(net, emb).items():
        total += r * lengths[e]
    return total


def uniform_lengths(net: Network, value=1):
    return [value] * net.m


def _simple_paths(net: Network, a: int, b: int):
    """All simple directed traversals from a to b, including [a] when a == b."""
    out = net.out_arcs
    results = []
    stack = [(a, (a,), frozenset((a,)))]
    while stack:
        v, path, seen = stack.pop()
        if v == b:
            results.append(path)
            # a path may continue through b only if it returns, impossible when simple
        for (u, _e, _aid) in out[v]:
            if u not in seen:
                stack.append((u, path + (u,), seen | {u}))
    return results


def enumerate_embeddings(net: Network, tree: ComputationTree, cap: int = 100000):
    """All embeddings whose per-type paths are simple; TooMany above cap.

    Exhaustive baseline for the oracle and for the exact embedding-level LP.
    Placements of computing tree nodes range over all network nodes; the
    terminal type may be computed at the terminal itself (length-1 path).
    """
    g = tree.num_edges
    n_tree = tree.num_nodes
    kappa = tree.kappa
    placement = [None] * (n_tree + 1)
    for l in range(1, kappa + 1):
        placement[l] = net.sources[l - 1]
    placement[n_tree] = net.terminal
    computing = [v for v in range(1, n_tree + 1) if placement[v] is None]

    path_cache = {}

    def paths_between(a, b):
        if (a, b) not in path_cache:
            path_cache[(a, b)] = sorted(_simple_paths(net, a, b))
        return path_cache[(a, b)]

    results = []

    def assign(idx):
        if idx == len(computing):
            options = []
            for i in range(1, g + 1):
                t, h = tree.edges[i - 1]
                opts = paths_between(placement[t], placement[h])
                if not opts:
                    return
                options.append(opts)
            combo = [0] * g

            def fill(i):
                if i == g:
                    results.append(Embedding(tuple(options[j][combo[j]] for j in range(g))))
                    if len(results) > cap:
                        raise TooMany(f"more than {cap} embeddings", cap=cap)
                    return
                for c in range(len(options[i])):
                    combo[i] = c
                    fill(i + 1)

            fill(0)
            return
        node = computing[idx]
        for v in range(net.n):
            placement[node] = v
            assign(idx + 1)
        placement[node] = None

    assign(0)
    return results


def _seed_phase(net: Network, tree: ComputationTree, i, omega,
                source_init, compute_extra, stats=None):
    """Initial per-node cost of type i: zero-cost generation at its source, or
    the cost of computing it in place (predecessor-table sum plus an extra)."""
    n = net.n
    om = [None] * n
    sg = [None] * n
    if i <= tree.kappa:
        s = net.sources[i - 1]
        om[s] = source_init(i)
        sg[s] = s
        return om, sg
    pres = tree._pre[i]
    pre_tabs = [omega[eta] for eta in pres]
    for u in range(n):
        total = 0
        dead = False
        for tab in pre_tabs:
            w = tab[u]
            if w is None:
                dead = True
                break
            total += w
        if not dead:
            om[u] = total + compute_extra(i, u)
            sg[u] = u
    if stats is not None:
        stats.init_ops += n * len(pres)
    return om, sg


def _run_phase(net: Network, om, sg, arc_cost, stats: OracleStats | None = None):
    """Greedy selection sweep: finalize the cheapest unfinished node, relax its
    outgoing arcs, repeat.  None marks unreachable; ties go to the lowest id."""
    n = net.n
    out = net.out_arcs
    visited = [False] * n
    for _round in range(n):
        best = None
        bestu = -1
        for u in range(n):
            if not visited[u]:
                w = om[u]
                if w is not None and (best is None or w < best):
                    best = w
                    bestu = u
        if bestu < 0:
            break  # remaining nodes are unreachable for this type
        visited[bestu] = True
        if stats is not None:
            stats.pops += 1
        wv = best
        for (u, _e, aid) in out[bestu]:
            if visited[u]:
                continue
            c = wv + arc_cost[aid]
            wu = om[u]
            if wu is None or c < wu:
                om[u] = c
                sg[u] = bestu
            if stats is not None:
                stats.relaxations += 1


def _forward_tables(net: Network, tree: ComputationTree, arc_costs_for_phase,
                    source_init, compute_extra, stats: OracleStats | None = None):
    """Per-type min-cost tables via greedy selection with custom initialization.

    Phase i computes omega[i][u] = least cost of making type i available at u
    and sigma[i][u] = the node it is pulled from (u itself when computed
    there).  Unreachable is an explicit None, never a large number.

    arc_costs_for_phase(i) -> list over arc ids of the cost of moving type i
    along that arc; source_init(i) -> cost of generating source type i at its
    source; compute_extra(i, u) -> cost added on top of the predecessor sum
    when type i is computed at u.
    """
    g = tree.num_edges
    omega = [None] * (g + 1)
    sigma = [None] * (g + 1)
    for i in range(1, g + 1):
        om, sg = _seed_phase(net, tree, i, omega, source_init, compute_extra, stats)
        _run_phase(net, om, sg, arc_costs_for_phase(i), stats)
        omega[i] = om
        sigma[i] = sg
    return omega, sigma


def _backtrack(net: Network, tree: ComputationTree, omega, sigma, tree_id=0):
    g = tree.num_edges
    if omega[g][net.terminal] is None:
        raise Unreachable("terminal cannot obtain the final type")
    end_at = {g: net.terminal}
    paths = [None] * g
    for i in range(g, 0, -1):
        u = end_at[i]
        if omega[i][u] is None:
            raise Unreachable(f"type {i} cannot reach node {u}")
        chain = [u]
        sg = sigma[i]
        while sg[u] != u:
            u = sg[u]
            chain.append(u)
        chain.reverse()
        paths[i - 1] = tuple(chain)
        for eta in tree._pre[i]:
            end_at[eta] = u
    return Embedding(tuple(paths), tree_id=tree_id)


def optimal_embedding_with_cost(net: Network, tree: ComputationTree, lengths,
                                stats: OracleStats | None = None, tree_id=0):
    """Minimum-weight embedding for the given edge lengths, with its weight."""
    if len(lengths) != net.m:
        raise DimensionMismatch(f"{len(lengths)} lengths for {net.m} edges")
    arc_cost = [lengths[e] for (_v, _u, e) in net.arcs]

    omega, sigma = _forward_tables(
        net, tree,
        arc_costs_for_phase=lambda i: arc_cost,
        source_init=lambda i: 0,
        compute_extra=lambda i, u: 0,
        stats=stats,
    )
    emb = _backtrack(net, tree, omega, sigma, tree_id=tree_id)
    return emb, omega[tree.num_edges][net.terminal]


def optimal_embedding(net: Network, tree: ComputationTree, lengths,
                      stats: OracleStats | None = None) -> Embedding:
    """Argmin of embedding_weight over all embeddings.

    Forward pass: types in label order, each solved by greedy node selection
    seeded with the cost of computing the type in place (the predecessor-table
    sum).  Backward pass: backtrack pull-from pointers from the terminal in
    reverse label order.  Ties break toward the lowest node id.
    """
    emb, _cost = optimal_embedding_with_cost(net, tree, lengths, stats=stats)
    return emb


def forward_tables_for(net: Network, tree: ComputationTree, lengths,
                       type_weights=None, stats=None):
    """omega/sigma tables for the base or precision-scaled oracle (shared by
    multi-tree table memoization)."""
    if type_weights is None:
        arc_cost_base = [lengths[e] for (_v, _u, e) in net.arcs]
        per_phase = lambda i: arc_cost_base
    else:
        cache = {}

        def per_phase(i):
            w = type_weights[i]
            if w not in cache:
                cache[w] = [w * lengths[e] for (_v, _u, e) in net.arcs]
            return cache[w]

    zero = 0
    return _forward_tables(net, tree, per_phase, lambda i: zero,
                           lambda i, u: zero, stats=stats)

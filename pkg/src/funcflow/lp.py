"""The two exact linear programs and their supporting checks.

Embedding-level LP: maximize total flow packed onto explicitly enumerated
embeddings subject to edge capacities.  Node-arc LP: per-type directed edge
flows with functional conservation (a node may terminate predecessor types to
generate their successor on a virtual, uncapacitated self-loop), generation at
the sources, termination at the terminal, and shared capacity per edge.

Everything is exact: solutions verify with zero tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .embedding import Embedding, edge_usage, enumerate_embeddings, optimal_embedding_with_cost
from .errors import DimensionMismatch, NumericFailure
from .network import Network, as_fraction
from .simplex import solve_lp
from .tree import ComputationTree


@dataclass
class EmbeddingFlows:
    """Sparse nonnegative flow per embedding."""

    flows: dict = field(default_factory=dict)

    @property
    def total(self) -> Fraction:
        return sum(self.flows.values(), Fraction(0))

    def items_sorted(self):
        return sorted(self.flows.items(), key=lambda kv: kv[0])


@dataclass
class NodeArcSolution:
    """Per-type edge flows f[theta,u,v], self-loop flows f[theta,u] and a rate."""

    rate: Fraction
    edge_flows: dict = field(default_factory=dict)   # (theta, u, v) -> Fraction, directed u->v
    self_flows: dict = field(default_factory=dict)   # (theta, u) -> Fraction


@dataclass
class DualSolution:
    lengths: list
    objective: Fraction


def verify_embedding_flows(net: Network, flows: EmbeddingFlows, usage_of=None):
    """Capacity and nonnegativity violations of an embedding-level solution."""
    violations = []
    load = [Fraction(0)] * net.m
    for emb, x in flows.flows.items():
        if x < 0:
            violations.append(("negative-flow", emb, x))
            continue
        usage = usage_of(emb) if usage_of else edge_usage(net, emb)
        for e, r in usage.items():
            load[e] += r * x
    for e in range(net.m):
        if load[e] > net.edges[e].cap:
            violations.append(("capacity", net.edges[e].key, load[e] - net.edges[e].cap))
    return violations


def solve_packing_exact(limits, columns, objective=None):
    """Maximize sum of (weighted) column activities under row limits.

    limits: row capacities.  columns: list of (key, usage) where usage maps
    row index -> coefficient.  objective: per-column weight (default 1).
    Returns (values: {key: Fraction}, optimum, duals per row).
    """
    rows = [({}, "<=", as_fraction(limits[i])) for i in range(len(limits))]
    for j, (_key, usage) in enumerate(columns):
        for i, r in usage.items():
            if r:
                rows[i][0][j] = r
    obj = [Fraction(1)] * len(columns) if objective is None else [as_fraction(w) for w in objective]
    res = solve_lp(len(columns), obj, rows, maximize=True)
    if res.status != "optimal":
        raise NumericFailure(f"packing LP is {res.status}; some column consumes "
                             f"no capacity")
    values = {}
    for j, (key, _usage) in enumerate(columns):
        if res.x[j]:
            values[key] = res.x[j]
    return values, res.value, res.duals


def solve_embedding_edge_exact(net: Network, tree: ComputationTree, cap: int = 100000):
    """Optimal fractional packing of embeddings; exact flows plus the LP dual.

    Enumerates all embeddings (error above cap), then solves the packing LP.
    The returned dual lengths price the edges: their objective equals the
    primal optimum and the minimum embedding weight under them is >= 1
    whenever the optimum is positive.
    """
    embeddings = enumerate_embeddings(net, tree, cap=cap)
    columns = [(emb, edge_usage(net, emb)) for emb in sorted(embeddings)]
    values, opt, duals = solve_packing_exact(net.capacities(), columns)
    flows = EmbeddingFlows(values)
    dual = DualSolution(lengths=duals, objective=sum(
        (net.edges[e].cap * duals[e] for e in range(net.m)), Fraction(0)))
    return flows, dual


def _node_arc_vars(net: Network, tree: ComputationTree):
    """Column layout; source-type self-loops are fixed by generation and folded
    into the rate column."""
    vid = {}
    cols = 0
    g = tree.num_edges
    for theta in range(1, g + 1):
        for (a, b, _e) in net.arcs:
            vid[(theta, a, b)] = cols
            cols += 1
    for theta in range(tree.kappa + 1, g + 1):
        for u in range(net.n):
            vid[(theta, u, u)] = cols
            cols += 1
    lam = cols
    cols += 1
    return vid, lam, cols


def _self_coeff(tree, theta, v, net):
    """(var-or-lambda, coefficient-on-lambda) description of f[theta,v,v]."""
    if theta <= tree.kappa:
        return None, (1 if v == net.sources[theta - 1] else 0)
    return (theta, v, v), None


def solve_node_arc(net: Network, tree: ComputationTree, precision=None) -> NodeArcSolution:
    """Maximize the computation rate with per-type flow conservation.

    precision: optional per-type bit widths; scales the capacity rows (type
    theta consumes precision[theta] capacity units per symbol).
    """
    g = tree.num_edges
    vid, lam, cols = _node_arc_vars(net, tree)
    rows = []

    for theta in range(1, g):
        (eta,) = tree._suc[theta]
        for v in range(net.n):
            coeffs = {}
            coeffs[vid[(eta, v, v)]] = coeffs.get(vid[(eta, v, v)], 0) + 1
            for (u, _e, _a) in net.out_arcs[v]:
                j = vid[(theta, v, u)]
                coeffs[j] = coeffs.get(j, 0) + 1
            for (u, _e, _a) in net.in_arcs[v]:
                j = vid[(theta, u, v)]
                coeffs[j] = coeffs.get(j, 0) - 1
            key, lam_c = _self_coeff(tree, theta, v, net)
            if key is not None:
                coeffs[vid[key]] = coeffs.get(vid[key], 0) - 1
            elif lam_c:
                coeffs[lam] = coeffs.get(lam, 0) - lam_c
            rows.append((coeffs, "==", 0))

    for v in range(net.n):
        coeffs = {}
        for (u, _e, _a) in net.out_arcs[v]:
            j = vid[(g, v, u)]
            coeffs[j] = coeffs.get(j, 0) + 1
        for (u, _e, _a) in net.in_arcs[v]:
            j = vid[(g, u, v)]
            coeffs[j] = coeffs.get(j, 0) - 1
        key, lam_c = _self_coeff(tree, g, v, net)
        if key is not None:
            coeffs[vid[key]] = coeffs.get(vid[key], 0) - 1
        elif lam_c:
            coeffs[lam] = coeffs.get(lam, 0) - lam_c
        if v == net.terminal:
            coeffs[lam] = coeffs.get(lam, 0) + 1
        rows.append((coeffs, "==", 0))

    for e_idx, edge in enumerate(net.edges):
        coeffs = {}
        for theta in range(1, g + 1):
            w = precision[theta] if precision else 1
            for (a, b) in ((edge.u, edge.v), (edge.v, edge.u)):
                j = vid.get((theta, a, b))
                if j is not None:
                    coeffs[j] = coeffs.get(j, 0) + w
        rows.append((coeffs, "<=", edge.cap))

    res = solve_lp(cols, {lam: 1}, rows, maximize=True)
    if res.status != "optimal":
        raise NumericFailure(f"node-arc LP is {res.status}")
    rate = res.value
    sol = NodeArcSolution(rate=rate)
    for (key, j) in vid.items():
        v = res.x[j]
        if v:
            theta, a, b = key
            if a == b:
                sol.self_flows[(theta, a)] = v
            else:
                sol.edge_flows[(theta, a, b)] = v
    for l in range(1, tree.kappa + 1):
        if rate:
            sol.self_flows[(l, net.sources[l - 1])] = rate
    return sol


def node_arc_dimensions(net: Network, tree: ComputationTree):
    """Exact variable/constraint counts of the full formulation (before the
    solver folds fixed source self-loops): per-type direction variables plus
    all self-loops plus the rate; conservation for every non-final type,
    termination, generation per source, one capacity row per edge."""
    g = tree.num_edges
    direction_vars = sum(1 if e.directed else 2 for e in net.edges) * g
    variables = direction_vars + net.n * g + 1
    constraints = (g - 1) * net.n + net.n + tree.kappa * net.n + net.m
    return variables, constraints


def verify_node_arc(net: Network, tree: ComputationTree, sol: NodeArcSolution,
                    precision=None, rate=None):
    """Every violated constraint with its slack; empty list means feasible."""
    lam = sol.rate if rate is None else rate
    g = tree.num_edges
    violations = []

    def f(theta, a, b):
        if a == b:
            return sol.self_flows.get((theta, a), Fraction(0))
        return sol.edge_flows.get((theta, a, b), Fraction(0))

    if lam < 0:
        violations.append(("nonnegativity", ("lambda",), lam))
    for key, v in list(sol.edge_flows.items()) + list(sol.self_flows.items()):
        if v < 0:
            violations.append(("nonnegativity", key, v))

    for theta in range(1, g):
        (eta,) = tree._suc[theta]
        for v in range(net.n):
            acc = f(eta, v, v)
            for (u, _e, _a) in net.out_arcs[v]:
                acc += f(theta, v, u)
            for (u, _e, _a) in net.in_arcs[v]:
                acc -= f(theta, u, v)
            acc -= f(theta, v, v)
            if acc != 0:
                violations.append(("conservation", (theta, v), acc))

    for v in range(net.n):
        acc = Fraction(0)
        for (u, _e, _a) in net.out_arcs[v]:
            acc += f(g, v, u)
        for (u, _e, _a) in net.in_arcs[v]:
            acc -= f(g, u, v)
        acc -= f(g, v, v)
        want = -lam if v == net.terminal else Fraction(0)
        if acc != want:
            violations.append(("termination", (g, v), acc - want))

    for l in range(1, tree.kappa + 1):
        for v in range(net.n):
            want = lam if v == net.sources[l - 1] else Fraction(0)
            have = sol.self_flows.get((l, v), Fraction(0))
            if have != want:
                violations.append(("generation", (l, v), have - want))

    for edge in net.edges:
        acc = Fraction(0)
        for theta in range(1, g + 1):
            w = precision[theta] if precision else 1
            acc += w * (f(theta, edge.u, edge.v) + f(theta, edge.v, edge.u))
        if acc > edge.cap:
            violations.append(("capacity", edge.key, acc - edge.cap))

    return violations


def dual_objective(net: Network, lengths) -> Fraction:
    """Capacity-weighted total length."""
    if len(lengths) != net.m:
        raise DimensionMismatch(f"{len(lengths)} lengths for {net.m} edges")
    return sum((net.edges[e].cap * as_fraction(lengths[e]) for e in range(net.m)),
               Fraction(0))


def dual_feasible(net: Network, tree: ComputationTree, lengths, cap=None) -> bool:
    """Feasible iff the minimum embedding weight under these lengths is >= 1."""
    _emb, alpha = optimal_embedding_with_cost(net, tree, lengths)
    return alpha >= 1


def min_embedding_weight(net: Network, tree: ComputationTree, lengths):
    _emb, alpha = optimal_embedding_with_cost(net, tree, lengths)
    return alpha


def node_arc_from_embedding_flows(net: Network, tree: ComputationTree,
                                  flows: EmbeddingFlows) -> NodeArcSolution:
    """Superimpose embedding flows into per-type edge and self-loop flows."""
    sol = NodeArcSolution(rate=flows.total)
    for emb, x in flows.flows.items():
        if not x:
            continue
        for i in range(1, tree.num_edges + 1):
            p = emb.path(i)
            for a, b in zip(p, p[1:]):
                key = (i, a, b)
                sol.edge_flows[key] = sol.edge_flows.get(key, Fraction(0)) + x
            key = (i, p[0])
            sol.self_flows[key] = sol.self_flows.get(key, Fraction(0)) + x
    return sol

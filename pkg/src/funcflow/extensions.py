"""Variant problems solved by reparametrizing the oracle and the packing rows.

* several computation trees for one function (the oracle takes the cheapest
  embedding over all trees, sharing min-cost tables between structurally
  identical sub-expressions),
* several terminals wanting different functions of disjoint source sets,
  either maximizing a weighted sum of rates or a common scale factor of a
  demand vector,
* per-type precision: a type costs its bit width per capacity unit,
* energy budgets on nodes instead of capacities on edges.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .embedding import (Embedding, OracleStats, _backtrack, _forward_tables,
                        _run_phase, _seed_phase, edge_usage, enumerate_embeddings)
from .errors import (AllWeightsZero, DimensionMismatch, NonpositiveWeight,
                     SharedSources, Unreachable, ZeroBudget, ZeroCapacity)
from .lp import DualSolution, EmbeddingFlows, solve_packing_exact
from .network import Network, as_fraction, validate_network
from .primal_dual import (ApproxParams, ApproxResult, _coerce_params,
                          iteration_bound, packing_primal_dual)
from .tree import ComputationTree, edge_signature, validate_tree


# ---------------------------------------------------------------- multi-tree

def _forward_memo(net, tree, arc_cost, sig_cache, memo, stats=None):
    """Forward tables for one tree, reusing tables of identical expressions.

    memo maps expression signatures to finished (omega, sigma) columns, so
    when several trees assemble the same sub-function the sweep runs once per
    function rather than once per tree edge.
    """
    g = tree.num_edges
    omega = [None] * (g + 1)
    sigma = [None] * (g + 1)
    for i in range(1, g + 1):
        sig = edge_signature(tree, i, sig_cache)
        hit = memo.get(sig)
        if hit is not None:
            omega[i], sigma[i] = hit
            continue
        om, sg = _seed_phase(net, tree, i, omega, lambda _i: 0.0, lambda _i, _u: 0.0,
                             stats)
        _run_phase(net, om, sg, arc_cost, stats)
        omega[i], sigma[i] = om, sg
        memo[sig] = (om, sg)
    return omega, sigma


def multi_tree_oracle(net: Network, trees):
    sig_caches = [dict() for _ in trees]
    arcs = net.arcs

    def oracle(lengths):
        arc_cost = [lengths[e] for (_v, _u, e) in arcs]
        memo = {}
        best = None
        for j, tree in enumerate(trees):
            omega, sigma = _forward_memo(net, tree, arc_cost, sig_caches[j], memo)
            cost = omega[tree.num_edges][net.terminal]
            if cost is None:
                continue
            if best is None or cost < best[0]:
                best = (cost, j, omega, sigma)
        if best is None:
            raise Unreachable("no tree admits an embedding")
        cost, j, omega, sigma = best
        emb = _backtrack(net, trees[j], omega, sigma, tree_id=j)
        return emb, edge_usage(net, emb), cost

    return oracle


def _validate_trees(net, trees):
    if not trees:
        raise DimensionMismatch("need at least one computation tree")
    for tree in trees:
        validate_tree(tree)
        if tree.kappa != net.kappa:
            raise DimensionMismatch(f"tree has {tree.kappa} sources, network "
                                    f"has {net.kappa}")


def multi_tree_approx(net: Network, trees, params, trace=None) -> ApproxResult:
    """Approximate packing over the union of every tree's embeddings."""
    _validate_trees(net, trees)
    params = _coerce_params(params)
    for e in net.edges:
        if e.cap <= 0:
            raise ZeroCapacity(f"edge {e.u}-{e.v} has capacity {e.cap}")
    cap_iters = params.iteration_cap or iteration_bound(net, params)
    scaled, _usages, iters, (best_lengths, best_ratio) = packing_primal_dual(
        net.capacities(), multi_tree_oracle(net, trees), params, cap_iters,
        trace=trace)
    flows = EmbeddingFlows(scaled)
    return ApproxResult(flows=flows, rate=float(flows.total),
                        rate_exact=flows.total,
                        dual=DualSolution(best_lengths, best_ratio),
                        iterations=iters)


def multi_tree_exact(net: Network, trees, cap=100000):
    _validate_trees(net, trees)
    columns = []
    for j, tree in enumerate(trees):
        for emb in sorted(enumerate_embeddings(net, tree, cap=cap)):
            keyed = Embedding(emb.paths, tree_id=j)
            columns.append((keyed, edge_usage(net, keyed)))
        if len(columns) > cap:
            raise DimensionMismatch(f"union enumeration exceeds {cap}")
    values, opt, duals = solve_packing_exact(net.capacities(), columns)
    return EmbeddingFlows(values), DualSolution(duals, opt)


# ------------------------------------------------------------ multi-terminal

@dataclass(frozen=True)
class TerminalProblem:
    tree: ComputationTree
    sources: tuple
    terminal: int
    alpha: Fraction


@dataclass(frozen=True)
class MultiTerminalInstance:
    problems: tuple
    mode: str  # "weighted-sum" or "concurrent"


def validate_multi_terminal(net: Network, inst: MultiTerminalInstance):
    if inst.mode not in ("weighted-sum", "concurrent"):
        raise DimensionMismatch(f"unknown mode {inst.mode!r}")
    if not inst.problems:
        raise DimensionMismatch("no terminal problems")
    seen = set()
    for p in inst.problems:
        overlap = seen & set(p.sources)
        if overlap:
            raise SharedSources(f"sources {sorted(overlap)} serve several "
                                f"terminals")
        seen |= set(p.sources)
        if p.alpha < 0:
            raise NonpositiveWeight(f"negative weight {p.alpha}")
        sub = net.with_endpoints(p.sources, p.terminal)
        validate_network(sub)
        validate_tree(p.tree)
        if p.tree.kappa != len(p.sources):
            raise DimensionMismatch("tree arity does not match its source set")
    if all(p.alpha == 0 for p in inst.problems):
        raise AllWeightsZero("every terminal weight is zero")


def _subnets(net, inst):
    return [net.with_endpoints(p.sources, p.terminal) for p in inst.problems]


def multi_terminal_weighted_sum(net: Network, inst: MultiTerminalInstance,
                                params, trace=None):
    """Maximize the weighted sum of per-terminal rates.

    The oracle prices a candidate embedding of problem i at weight/alpha_i (the
    dual constraint is weight >= alpha_i), so it returns the globally cheapest
    normalized column.  Returns (per-problem EmbeddingFlows, weighted rate,
    dual, iterations).
    """
    validate_multi_terminal(net, inst)
    if inst.mode != "weighted-sum":
        raise DimensionMismatch("instance mode is not weighted-sum")
    params = _coerce_params(params)
    subnets = _subnets(net, inst)
    active = [j for j, p in enumerate(inst.problems) if p.alpha > 0]
    alphas = {j: float(inst.problems[j].alpha) for j in active}
    arcs = net.arcs

    def oracle(lengths):
        arc_cost = [lengths[e] for (_v, _u, e) in arcs]
        best = None
        for j in active:
            sub = subnets[j]
            tree = inst.problems[j].tree
            omega, sigma = _forward_memo(sub, tree, arc_cost, {}, {})
            cost = omega[tree.num_edges][sub.terminal]
            if cost is None:
                continue
            scorej = cost / alphas[j]
            if best is None or scorej < best[0]:
                best = (scorej, j, omega, sigma)
        if best is None:
            raise Unreachable("no terminal can be served")
        score, j, omega, sigma = best
        emb = _backtrack(subnets[j], inst.problems[j].tree, omega, sigma, tree_id=j)
        return emb, edge_usage(net, emb), score

    for e in net.edges:
        if e.cap <= 0:
            raise ZeroCapacity(f"edge {e.u}-{e.v} has capacity {e.cap}")
    cap_iters = params.iteration_cap or iteration_bound(net, params)
    scaled, _usages, iters, (best_lengths, best_ratio) = packing_primal_dual(
        net.capacities(), oracle, params, cap_iters, trace=trace)
    per_problem = [EmbeddingFlows({}) for _ in inst.problems]
    weighted = Fraction(0)
    for emb, x in scaled.items():
        per_problem[emb.tree_id].flows[emb] = x
        weighted += inst.problems[emb.tree_id].alpha * x
    dual = DualSolution(best_lengths, best_ratio)
    return per_problem, weighted, dual, iters


def multi_terminal_weighted_sum_exact(net: Network, inst: MultiTerminalInstance,
                                      cap=100000):
    validate_multi_terminal(net, inst)
    columns = []
    weights = []
    for j, p in enumerate(inst.problems):
        if p.alpha == 0:
            continue
        sub = net.with_endpoints(p.sources, p.terminal)
        for emb in sorted(enumerate_embeddings(sub, p.tree, cap=cap)):
            keyed = Embedding(emb.paths, tree_id=j)
            columns.append((keyed, edge_usage(net, keyed)))
            weights.append(p.alpha)
    values, opt, _duals = solve_packing_exact(net.capacities(), columns, weights)
    per_problem = [EmbeddingFlows({}) for _ in inst.problems]
    for emb, x in values.items():
        per_problem[emb.tree_id].flows[emb] = x
    return per_problem, opt


def _tuple_usage(net, inst, embs):
    usage = {}
    for p, emb in zip(inst.problems, embs):
        if p.alpha == 0:
            continue
        for e, r in edge_usage(net, emb).items():
            usage[e] = usage.get(e, Fraction(0)) + p.alpha * r
    return usage


def multi_terminal_concurrent(net: Network, inst: MultiTerminalInstance,
                              params, trace=None):
    """Maximize lambda with every terminal i served at rate lambda*alpha_i.

    Columns are tuples of one embedding per problem; a tuple uses an edge
    alpha_i times as much as its i-th component does, and the oracle optimizes
    the components independently.  Returns (lambda, per-problem EmbeddingFlows
    at rates lambda*alpha_i, dual, iterations).
    """
    validate_multi_terminal(net, inst)
    if inst.mode != "concurrent":
        raise DimensionMismatch("instance mode is not concurrent")
    params = _coerce_params(params)
    subnets = _subnets(net, inst)
    arcs = net.arcs

    def oracle(lengths):
        arc_cost = [lengths[e] for (_v, _u, e) in arcs]
        chosen = []
        weight = 0.0
        for j, p in enumerate(inst.problems):
            sub = subnets[j]
            omega, sigma = _forward_memo(sub, p.tree, arc_cost, {}, {})
            cost = omega[p.tree.num_edges][sub.terminal]
            if cost is None:
                raise Unreachable(f"terminal {sub.terminal} cannot be served")
            emb = _backtrack(sub, p.tree, omega, sigma, tree_id=j)
            chosen.append(emb)
            weight += float(p.alpha) * cost
        key = tuple(chosen)
        return key, _tuple_usage(net, inst, chosen), weight

    for e in net.edges:
        if e.cap <= 0:
            raise ZeroCapacity(f"edge {e.u}-{e.v} has capacity {e.cap}")
    cap_iters = params.iteration_cap or iteration_bound(net, params)
    scaled, _usages, iters, (best_lengths, best_ratio) = packing_primal_dual(
        net.capacities(), oracle, params, cap_iters, trace=trace)
    lam = sum(scaled.values(), Fraction(0))
    per_problem = [EmbeddingFlows({}) for _ in inst.problems]
    for key, x in scaled.items():
        for j, emb in enumerate(key):
            contribution = x * inst.problems[j].alpha
            if contribution:
                flows = per_problem[j].flows
                flows[emb] = flows.get(emb, Fraction(0)) + contribution
    dual = DualSolution(best_lengths, best_ratio)
    return lam, per_problem, dual, iters


def multi_terminal_concurrent_exact(net: Network, inst: MultiTerminalInstance,
                                    cap=20000):
    """Exact concurrent optimum over the full product of embedding sets."""
    validate_multi_terminal(net, inst)
    import itertools
    per_sets = []
    for j, p in enumerate(inst.problems):
        sub = net.with_endpoints(p.sources, p.terminal)
        embs = [Embedding(e.paths, tree_id=j)
                for e in sorted(enumerate_embeddings(sub, p.tree, cap=cap))]
        per_sets.append(embs)
    columns = []
    for combo in itertools.product(*per_sets):
        columns.append((combo, _tuple_usage(net, inst, combo)))
        if len(columns) > cap:
            raise DimensionMismatch(f"product enumeration exceeds {cap}")
    values, opt, _duals = solve_packing_exact(net.capacities(), columns)
    return opt, values


# ---------------------------------------------------------------- precision

def check_precision(tree: ComputationTree, widths):
    w = {}
    for i in range(1, tree.num_edges + 1):
        if i not in widths:
            raise NonpositiveWeight(f"no bit width for type {i}")
        wi = as_fraction(widths[i])
        if wi <= 0:
            raise NonpositiveWeight(f"type {i} has width {wi}")
        w[i] = wi
    return w


def precision_usage(net: Network, tree: ComputationTree, widths, emb: Embedding):
    """Edge usage where each traversal of type theta counts widths[theta]."""
    usage = {}
    for i in range(1, tree.num_edges + 1):
        p = emb.path(i)
        for a, b in zip(p, p[1:]):
            e = net.edge_index(a, b)
            usage[e] = usage.get(e, Fraction(0)) + widths[i]
    return usage


def precision_oracle(net: Network, tree: ComputationTree, widths):
    arcs = net.arcs
    wf = {i: float(widths[i]) for i in widths}

    def oracle(lengths):
        def per_phase(i):
            w = wf[i]
            return [w * lengths[e] for (_v, _u, e) in arcs]
        omega, sigma = _forward_tables(net, tree, per_phase,
                                       lambda i: 0.0, lambda i, u: 0.0)
        emb = _backtrack(net, tree, omega, sigma)
        return emb, precision_usage(net, tree, widths, emb), \
            omega[tree.num_edges][net.terminal]

    return oracle


def precision_approx(net: Network, tree: ComputationTree, widths, params,
                     trace=None) -> ApproxResult:
    """Approximate max rate when type theta occupies widths[theta] capacity
    units per symbol; the oracle scales each hop cost by the type's width."""
    widths = check_precision(tree, widths)
    params = _coerce_params(params)
    for e in net.edges:
        if e.cap <= 0:
            raise ZeroCapacity(f"edge {e.u}-{e.v} has capacity {e.cap}")
    cap_iters = params.iteration_cap or iteration_bound(net, params)
    scaled, _usages, iters, (best_lengths, best_ratio) = packing_primal_dual(
        net.capacities(), precision_oracle(net, tree, widths), params,
        cap_iters, trace=trace)
    flows = EmbeddingFlows(scaled)
    return ApproxResult(flows=flows, rate=float(flows.total),
                        rate_exact=flows.total,
                        dual=DualSolution(best_lengths, best_ratio),
                        iterations=iters)


def precision_exact(net: Network, tree: ComputationTree, widths, cap=100000):
    widths = check_precision(tree, widths)
    columns = [(emb, precision_usage(net, tree, widths, emb))
               for emb in sorted(enumerate_embeddings(net, tree, cap=cap))]
    values, opt, duals = solve_packing_exact(net.capacities(), columns)
    return EmbeddingFlows(values), DualSolution(duals, opt)


# ------------------------------------------------------------------- energy

@dataclass(frozen=True)
class EnergyModel:
    """Per-node budgets and per-type compute/transmit/receive costs."""

    budgets: tuple          # indexed by node id
    compute: dict           # type -> energy to generate/compute one symbol
    transmit: dict
    receive: dict

    def cost_triple(self, theta):
        return (as_fraction(self.compute.get(theta, 0)),
                as_fraction(self.transmit.get(theta, 0)),
                as_fraction(self.receive.get(theta, 0)))


def check_energy(net: Network, tree: ComputationTree, em: EnergyModel):
    if len(em.budgets) != net.n:
        raise DimensionMismatch(f"{len(em.budgets)} budgets for {net.n} nodes")
    for u, b in enumerate(em.budgets):
        if as_fraction(b) <= 0:
            raise ZeroBudget(f"node {u} has budget {b}")
    for d in (em.compute, em.transmit, em.receive):
        for theta, v in d.items():
            if as_fraction(v) < 0:
                raise NonpositiveWeight(f"negative energy cost for type {theta}")


def energy_load(net: Network, tree: ComputationTree, em: EnergyModel,
                emb: Embedding):
    """Energy drawn from each node per unit flow on the embedding: compute
    cost at every path start, transmit cost at every non-final path node,
    receive cost at every non-initial one."""
    load = {}

    def add(u, amount):
        if amount:
            load[u] = load.get(u, Fraction(0)) + amount

    for i in range(1, tree.num_edges + 1):
        ec, et, er = em.cost_triple(i)
        p = emb.path(i)
        add(p[0], ec)
        if len(p) > 1:
            for u in p[:-1]:
                add(u, et)
            for u in p[1:]:
                add(u, er)
    return load


def _energy_forward(net, tree, em, node_lengths, stats=None):
    def per_phase(i):
        _ec, et, er = em.cost_triple(i)
        return [et * node_lengths[v] + er * node_lengths[u]
                for (v, u, _e) in net.arcs]

    def source_init(i):
        ec, _et, _er = em.cost_triple(i)
        return ec * node_lengths[net.sources[i - 1]]

    def compute_extra(i, u):
        ec, _et, _er = em.cost_triple(i)
        return ec * node_lengths[u]

    return _forward_tables(net, tree, per_phase, source_init, compute_extra,
                           stats=stats)


def optimal_embedding_energy(net: Network, tree: ComputationTree,
                             em: EnergyModel, node_lengths,
                             stats: OracleStats | None = None):
    """Embedding minimizing the node-length-priced energy load, with its cost.

    Generation/computation of type theta at u is priced at compute-cost times
    l(u); moving it along an arc v->u costs transmit at l(v) plus receive at
    l(u).
    """
    if len(node_lengths) != net.n:
        raise DimensionMismatch(f"{len(node_lengths)} lengths for {net.n} nodes")
    omega, sigma = _energy_forward(net, tree, em, node_lengths, stats=stats)
    emb = _backtrack(net, tree, omega, sigma)
    return emb, omega[tree.num_edges][net.terminal]


def energy_approx(net: Network, tree: ComputationTree, em: EnergyModel,
                  params, trace=None) -> ApproxResult:
    """Approximate max rate under node energy budgets (edge capacities unused).

    Packing rows are the nodes; a column's coefficient at u is its per-unit
    energy load there.
    """
    check_energy(net, tree, em)
    params = _coerce_params(params)
    cap_iters = params.iteration_cap or iteration_bound(net, params)

    def oracle(lengths):
        omega, sigma = _energy_forward(net, tree, em, lengths)
        emb = _backtrack(net, tree, omega, sigma)
        return emb, energy_load(net, tree, em, emb), \
            omega[tree.num_edges][net.terminal]

    budgets = [as_fraction(b) for b in em.budgets]
    scaled, _usages, iters, (best_lengths, best_ratio) = packing_primal_dual(
        budgets, oracle, params, cap_iters, trace=trace)
    flows = EmbeddingFlows(scaled)
    return ApproxResult(flows=flows, rate=float(flows.total),
                        rate_exact=flows.total,
                        dual=DualSolution(best_lengths, best_ratio),
                        iterations=iters)


def energy_exact(net: Network, tree: ComputationTree, em: EnergyModel,
                 cap=100000):
    check_energy(net, tree, em)
    columns = [(emb, energy_load(net, tree, em, emb))
               for emb in sorted(enumerate_embeddings(net, tree, cap=cap))]
    budgets = [as_fraction(b) for b in em.budgets]
    values, opt, duals = solve_packing_exact(budgets, columns)
    return EmbeddingFlows(values), DualSolution(duals, opt)

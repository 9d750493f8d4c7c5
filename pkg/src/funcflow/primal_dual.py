"""Multiplicative-weights primal-dual solver for the embedding packing LP.

Repeatedly asks the min-cost embedding oracle for the cheapest embedding under
the current edge lengths, routes as much flow on it as its tightest edge
allows, and inflates the lengths of the edges it used; the tightest edge gains
the factor (1+eps) exactly.  The loop stops once the capacity-weighted total
length reaches 1.  Raw flows are then scaled down by log_{1+eps}((1+eps)/delta)
and an exact rational feasibility repair.

Lengths live in floating point (their magnitudes span the whole run and only
their order matters); flow increments are exact rationals, so the returned
solution is exactly capacity-feasible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .embedding import edge_usage, _backtrack, _forward_tables
from .errors import IterationCapExceeded, ZeroCapacity
from .lp import DualSolution, EmbeddingFlows
from .network import Network
from .tree import ComputationTree


@dataclass(frozen=True)
class ApproxParams:
    """Internal knobs: eps drives the multiplicative step, delta the initial
    length scale (None picks the standard ((1+eps)m)^(-1/eps) schedule), and
    iteration_cap guards nontermination (None derives it from the size)."""

    eps: float
    delta: float | None = None
    iteration_cap: int | None = None

    def __post_init__(self):
        if not (0 < float(self.eps) < 1):
            raise ValueError(f"eps must lie in (0,1), got {self.eps}")
        if self.delta is not None and not self.delta > 0:
            raise ValueError("delta must be positive")

    @staticmethod
    def from_accuracy(eps_user) -> "ApproxParams":
        """Map a user-facing accuracy target to internal knobs.

        eps_user/3 absorbs the analysis slack, so the returned flows carry at
        least a (1 - eps_user) fraction of the optimal rate.
        """
        if not (0 < float(eps_user) < 1):
            raise ValueError(f"accuracy must lie in (0,1), got {eps_user}")
        return ApproxParams(eps=float(eps_user) / 3.0)


@dataclass
class ApproxResult:
    flows: EmbeddingFlows
    rate: float
    rate_exact: Fraction
    dual: DualSolution
    iterations: int


def _coerce_params(params) -> ApproxParams:
    if isinstance(params, ApproxParams):
        return params
    return ApproxParams.from_accuracy(params)


def default_delta(eps: float, m: int) -> float:
    return (1 + eps) * ((1 + eps) * max(m, 1)) ** (-1.0 / eps)


def iteration_bound(net: Network, params) -> int:
    """Generous concrete cap over the O(eps^-1 m log_{1+eps} m) iteration count."""
    params = _coerce_params(params)
    eps = float(params.eps)
    m = net.m
    base = (1.0 / eps) * m * (math.log(max(m, 2)) / math.log1p(eps))
    return 10 * math.ceil(base)


def packing_primal_dual(limits, oracle, params: ApproxParams, cap_iterations,
                        trace=None):
    """Core loop over abstract packing rows.

    limits: positive rational row capacities.  oracle(lengths) must return
    (column key, usage: {row: amount}, weight: float) with weight the minimum
    1-unit cost under the given row lengths.  Returns raw (unscaled) flow per
    key, cached usages, iteration count, and the best dual snapshot
    (lengths, objective_over_alpha).
    """
    m = len(limits)
    eps = float(params.eps)
    delta = params.delta if params.delta is not None else default_delta(eps, m)
    limits_f = [float(c) for c in limits]
    lengths = [delta / limits_f[i] for i in range(m)]
    raw = {}
    usages = {}
    # per column: bottleneck row, its exact increment, and the per-row length
    # factors are all length-independent, so they are computed once
    prepared = {}
    iterations = 0
    best_ratio = math.inf
    best_lengths = None

    while True:
        d_val = 0.0
        for i in range(m):
            d_val += limits_f[i] * lengths[i]
        if d_val >= 1.0:
            break
        iterations += 1
        if iterations > cap_iterations:
            raise IterationCapExceeded(f"no convergence within {cap_iterations} "
                                       f"iterations")
        key, usage, weight = oracle(lengths)
        if not usage:
            raise IterationCapExceeded("a column consumes no capacity; the "
                                       "packing problem is unbounded")
        if weight > 0 and d_val / weight < best_ratio:
            best_ratio = d_val / weight
            best_lengths = [l / weight for l in lengths]
        prep = prepared.get(key)
        if prep is None:
            usages[key] = usage
            star = None
            q_star = None
            for i in sorted(usage):
                q = limits[i] / Fraction(usage[i])
                if q_star is None or q < q_star:
                    q_star = q
                    star = i
            qf_star = float(q_star)
            updates = tuple(
                (i, 1.0 + eps if i == star else
                 1.0 + eps * (qf_star / (limits_f[i] / float(r))))
                for i, r in usage.items())
            prep = (star, q_star, updates)
            prepared[key] = prep
        star, q_star, updates = prep
        raw[key] = raw.get(key, 0) + 1
        factor_star = None
        for i, factor in updates:
            lengths[i] *= factor
            if i == star:
                factor_star = factor
        if trace is not None:
            trace({"iteration": iterations, "D": d_val, "weight": weight,
                   "row_star": star, "increment": str(q_star),
                   "factor_star": factor_star})

    norm = math.log((1 + eps) / delta) / math.log1p(eps)
    scale = Fraction(1.0 / norm)
    # raw counts times the column's constant exact increment, scaled down
    scaled = {k: count * prepared[k][1] * scale for k, count in raw.items()}
    load = [Fraction(0)] * m
    for k, v in scaled.items():
        for i, r in usages[k].items():
            load[i] += r * v
    worst = Fraction(0)
    for i in range(m):
        if limits[i] > 0:
            ratio = load[i] / limits[i]
            if ratio > worst:
                worst = ratio
    if worst > 1:
        scaled = {k: v / worst for k, v in scaled.items()}
    return scaled, usages, iterations, (best_lengths, best_ratio)


def base_oracle(net: Network, tree: ComputationTree, tree_id=0):
    """Min-weight embedding oracle over float edge lengths."""
    arcs = net.arcs
    usage_cache = {}

    def oracle(lengths):
        arc_cost = [lengths[e] for (_v, _u, e) in arcs]
        omega, sigma = _forward_tables(
            net, tree, lambda i: arc_cost, lambda i: 0.0, lambda i, u: 0.0)
        emb = _backtrack(net, tree, omega, sigma, tree_id=tree_id)
        weight = omega[tree.num_edges][net.terminal]
        usage = usage_cache.get(emb)
        if usage is None:
            usage = edge_usage(net, emb)
            usage_cache[emb] = usage
        return emb, usage, weight

    return oracle


def approx_max_rate(net: Network, tree: ComputationTree, params,
                    trace=None) -> ApproxResult:
    """Capacity-feasible embedding flows within (1 - accuracy) of optimal.

    params: an accuracy in (0,1) or an explicit ApproxParams.  Also returns a
    scaled dual length function whose objective upper-bounds the optimum.
    """
    params = _coerce_params(params)
    for e in net.edges:
        if e.cap <= 0:
            raise ZeroCapacity(f"edge {e.u}-{e.v} has capacity {e.cap}")
    cap_iters = params.iteration_cap or iteration_bound(net, params)
    scaled, _usages, iterations, (best_lengths, best_ratio) = packing_primal_dual(
        net.capacities(), base_oracle(net, tree), params, cap_iters, trace=trace)
    flows = EmbeddingFlows(scaled)
    total = flows.total
    dual = DualSolution(lengths=best_lengths, objective=best_ratio)
    return ApproxResult(flows=flows, rate=float(total), rate_exact=total,
                        dual=dual, iterations=iterations)

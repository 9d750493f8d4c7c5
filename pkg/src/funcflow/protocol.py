"""Frame-based execution of embedding flows on symbol streams.

Flows are rounded down to small rationals, multiplied by the least common
multiple N of their denominators, and run in frames of N network uses: per
frame each source emits rN symbols, split into one block of n(B) symbols per
embedding, and every link carries one subframe per (embedding, type) pair in
lexicographic order.  A subframe derived from source frame k crosses link
(u,v) in frame k + d(uv,B,theta); the delay table is 0 at a source's first
hop, grows by one per hop, and a computed type leaves its computing node one
frame after its last predecessor arrives.  Computation is instantaneous, a
frame arrives at the end of the frame that carried it.

Nodes keep one FIFO input queue per (embedding, type); a node preparing a
subframe it never receives builds it from the predecessor-type queues,
consuming the oldest entries.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from .embedding import Embedding
from .errors import (CapacityExceeded, EpsilonTooSmall, InvalidEmbedding,
                     QueueUnderflow)
from .lp import EmbeddingFlows
from .network import Network
from .tree import ComputationTree, apply_operator, evaluate_function

_MAX_DENOMINATOR = 10**9


def best_rational_below(x: Fraction, max_den: int) -> Fraction:
    """Largest rational <= x with denominator <= max_den (continued fractions)."""
    if x < 0:
        raise ValueError("flows are nonnegative")
    if x.denominator <= max_den:
        return x
    p0, q0, p1, q1 = 0, 1, 1, 0
    n, d = x.numerator, x.denominator
    while True:
        a = n // d
        q2 = q0 + a * q1
        if q2 > max_den:
            break
        p0, q0, p1, q1 = p1, q1, p0 + a * p1, q2
        n, d = d, n - a * d
    k = (max_den - q0) // q1
    semi = Fraction(p0 + k * p1, q0 + k * q1)
    conv = Fraction(p1, q1)
    if semi <= x and conv <= x:
        return max(semi, conv)
    return semi if semi <= x else conv


@dataclass
class RoundedFlows:
    x: dict          # embedding -> rounded rational flow (> 0)
    N: int           # least common multiple of the denominators
    n: dict          # embedding -> integer symbols per frame
    r: Fraction      # total rounded rate


def round_flows(flows: EmbeddingFlows, eps=None) -> RoundedFlows:
    """Round flows down to rationals losing less than eps of the total rate.

    The denominator cap doubles until the loss drops below eps (default: a
    thousandth of the total rate); embeddings rounded to zero are dropped.
    """
    total = flows.total
    if eps is None:
        eps = total / 1000 if total else Fraction(1)
    eps = Fraction(eps)
    if eps <= 0:
        raise EpsilonTooSmall(f"rounding slack must be positive, got {eps}")
    den = 1
    while True:
        rounded = {}
        for emb, val in flows.flows.items():
            r = best_rational_below(val, den)
            if r > 0:
                rounded[emb] = r
        loss = total - sum(rounded.values(), Fraction(0))
        if loss < eps:
            break
        if den >= _MAX_DENOMINATOR:
            raise EpsilonTooSmall(f"cannot round within {eps} below denominator "
                                  f"cap {_MAX_DENOMINATOR}")
        den *= 2
    N = 1
    for r in rounded.values():
        N = N * r.denominator // gcd(N, r.denominator)
    counts = {emb: int(r * N) for emb, r in rounded.items()}
    return RoundedFlows(x=rounded, N=N, n=counts,
                        r=sum(rounded.values(), Fraction(0)))


def _delays_with_ready(net: Network, tree: ComputationTree, emb: Embedding):
    delays = {}
    ready = {}
    for i in range(1, tree.num_edges + 1):
        p = emb.path(i)
        if len(p) != len(set(p)):
            raise InvalidEmbedding(f"type {i} path revisits a node; cannot "
                                   f"schedule subframes")
        if i <= tree.kappa:
            start = 0
        else:
            start = 0
            for eta in tree._pre[i]:
                pe = emb.path(eta)
                if len(pe) >= 2:
                    start = max(start, delays[(pe[-2], pe[-1], eta)] + 1)
                else:
                    start = max(start, ready[eta])
        ready[i] = start
        for j in range(len(p) - 1):
            delays[(p[j], p[j + 1], i)] = start + j
    g = tree.num_edges
    last = emb.path(g)
    out_delay = delays[(last[-2], last[-1], g)] if len(last) >= 2 else ready[g]
    return delays, ready, out_delay


def compute_delays(net: Network, tree: ComputationTree, emb: Embedding) -> dict:
    """Delay table {(u, v, type): frames} for one embedding.

    Link uses absent from the table never carry that type (infinite delay).
    """
    delays, _ready, _out = _delays_with_ready(net, tree, emb)
    return delays


@dataclass
class ScheduleEntry:
    embedding: Embedding
    tree: ComputationTree
    count: int              # n(B): symbols per frame on this embedding
    offset: int             # position of this block inside a source frame
    delays: dict
    out_delay: int
    direct_output: bool     # final type reaches the terminal over a link


@dataclass
class Schedule:
    N: int
    entries: tuple
    r: Fraction

    @property
    def rN(self) -> int:
        return sum(e.count for e in self.entries)

    @property
    def max_out_delay(self) -> int:
        return max((e.out_delay for e in self.entries), default=0)


def build_schedule(net: Network, trees, rounded: RoundedFlows) -> Schedule:
    """Fix the embedding order (canonical serialization order), offsets and
    delay tables.  trees: one ComputationTree or a sequence indexed by the
    embeddings' tree_id."""
    if isinstance(trees, ComputationTree):
        trees = [trees]
    for tree in trees:
        if tree.kappa != net.kappa:
            raise InvalidEmbedding(f"tree has {tree.kappa} sources, network "
                                   f"has {net.kappa}")
    entries = []
    offset = 0
    for emb in sorted(rounded.n):
        tree = trees[emb.tree_id]
        delays, _ready, out_delay = _delays_with_ready(net, tree, emb)
        entries.append(ScheduleEntry(
            embedding=emb, tree=tree, count=rounded.n[emb], offset=offset,
            delays=delays, out_delay=out_delay,
            direct_output=len(emb.path(tree.num_edges)) >= 2))
        offset += rounded.n[emb]
    return Schedule(N=rounded.N, entries=tuple(entries), r=rounded.r)


def verify_schedule(net: Network, schedule: Schedule):
    """Static admission check: per frame a link carries at most N*c(e) symbols
    across both directions.  Returns violations as (edge-key, load, limit)."""
    load = {}
    for entry in schedule.entries:
        for (a, b, _theta) in entry.delays:
            e = net.edge_index(a, b)
            load[e] = load.get(e, 0) + entry.count
    violations = []
    for e, used in sorted(load.items()):
        limit = schedule.N * net.edges[e].cap
        if used > limit:
            violations.append((net.edges[e].key, used, limit))
    return violations


@dataclass
class SimulationResult:
    outputs: list            # all delivered function values, in stream order
    slots: dict              # (source frame k, entry index) -> symbol tuple
    loads: dict              # (frame, edge index) -> symbols carried
    trace: list              # send records, lexicographic within each frame
    frames_run: int


def simulate(net: Network, schedule: Schedule, frames: int, streams,
             collect_trace: bool = False) -> SimulationResult:
    """Run the protocol for the given number of source frames.

    streams: {source node: sequence of symbols}, at least frames*rN each.
    Returns every function value received at the terminal, ordered by source
    frame, then embedding, then position.  Raises CapacityExceeded if any
    frame overloads a link and QueueUnderflow on internal misalignment.
    """
    q = net.alphabet.q
    rN = schedule.rN
    K = int(frames)
    result = SimulationResult([], {}, {}, [], 0)
    if K == 0 or rN == 0:
        return result
    for l, s in enumerate(net.sources, start=1):
        if s not in streams or len(streams[s]) < K * rN:
            raise QueueUnderflow(f"source {s} must supply {K * rN} symbols")

    queues = {}

    def push(node, j, theta, k, seg):
        queues.setdefault((node, j, theta), deque()).append((k, seg))

    def pop(node, j, theta, k):
        dq = queues.get((node, j, theta))
        if not dq:
            raise QueueUnderflow(f"no subframe queued at node {node} for "
                                 f"entry {j} type {theta} frame {k}")
        got_k, seg = dq.popleft()
        if got_k != k:
            raise QueueUnderflow(f"queue at node {node} holds frame {got_k}, "
                                 f"needed {k}", entry=j, type=theta)
        return seg

    def materialize(node, j, theta, k):
        entry = schedule.entries[j]
        tree = entry.tree
        operands = []
        for eta in tree._pre[theta]:
            pe = entry.embedding.path(eta)
            if len(pe) >= 2 or eta <= tree.kappa:
                operands.append(pop(node, j, eta, k))
            else:
                operands.append(materialize(node, j, eta, k))
        node_label = tree.tail(theta)
        op = tree.ops.get(node_label)
        table = tree.tables.get(node_label)
        return tuple(apply_operator(op, vals, q, table=table)
                     for vals in zip(*operands))

    def obtain(node, j, theta, k):
        entry = schedule.entries[j]
        path = entry.embedding.path(theta)
        is_source_here = theta <= entry.tree.kappa and node == net.sources[theta - 1]
        if is_source_here or node != path[0]:
            return pop(node, j, theta, k)
        return materialize(node, j, theta, k)

    total_frames = K + schedule.max_out_delay
    for f in range(total_frames):
        if f < K:
            for l, s in enumerate(net.sources, start=1):
                block = streams[s][f * rN:(f + 1) * rN]
                for j, entry in enumerate(schedule.entries):
                    seg = tuple(block[entry.offset:entry.offset + entry.count])
                    push(s, j, l, f, seg)

        sends = []
        for j, entry in enumerate(schedule.entries):
            tree = entry.tree
            for theta in range(1, tree.num_edges + 1):
                p = entry.embedding.path(theta)
                for a, b in zip(p, p[1:]):
                    d = entry.delays[(a, b, theta)]
                    k = f - d
                    if 0 <= k < K:
                        seg = obtain(a, j, theta, k)
                        sends.append((a, b, j, theta, k, seg))
            if not entry.direct_output:
                k = f - entry.out_delay
                if 0 <= k < K:
                    g = tree.num_edges
                    result.slots[(k, j)] = materialize(net.terminal, j, g, k)

        frame_load = {}
        for (a, b, j, theta, k, seg) in sends:
            e = net.edge_index(a, b)
            frame_load[e] = frame_load.get(e, 0) + len(seg)
        for e, used in frame_load.items():
            result.loads[(f, e)] = used
            if used > schedule.N * net.edges[e].cap:
                raise CapacityExceeded(
                    f"frame {f} carries {used} symbols on edge "
                    f"{net.edges[e].key}, limit {schedule.N * net.edges[e].cap}",
                    frame=f, link=net.edges[e].key)
        if collect_trace:
            for (a, b, j, theta, k, seg) in sends:
                result.trace.append({
                    "frame": f, "link": list(net.edges[net.edge_index(a, b)].key),
                    "direction": [a, b], "embedding": j, "type": theta,
                    "count": len(seg)})

        for (a, b, j, theta, k, seg) in sends:
            entry = schedule.entries[j]
            g = entry.tree.num_edges
            if theta == g and b == entry.embedding.path(g)[-1] == net.terminal:
                result.slots[(k, j)] = seg
            else:
                push(b, j, theta, k, seg)

    leftovers = {key: len(dq) for key, dq in queues.items() if dq}
    if leftovers:
        raise QueueUnderflow(f"{sum(leftovers.values())} subframes were never "
                             f"consumed", queues=len(leftovers))
    for k in range(K):
        for j in range(len(schedule.entries)):
            if (k, j) not in result.slots:
                raise QueueUnderflow(f"output for frame {k} embedding {j} "
                                     f"never delivered")
            result.outputs.extend(result.slots[(k, j)])
    result.frames_run = total_frames
    return result


def expected_outputs(net: Network, schedule: Schedule, frames: int, streams):
    """Ground-truth terminal values: the tree function applied index-aligned."""
    q = net.alphabet.q
    rN = schedule.rN
    values = []
    for k in range(int(frames)):
        for entry in schedule.entries:
            base = k * rN + entry.offset
            for i in range(entry.count):
                args = [streams[s][base + i] for s in net.sources]
                values.append(evaluate_function(entry.tree, args, q))
    return values

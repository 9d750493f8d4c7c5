"""Computation trees: directed in-trees whose edges are the intermediate data types.

Nodes carry labels 1..|nodes| and edges labels 1..|edges|, both topological:
nodes 1..kappa are the data sources, the last node is the terminal, every
other node computes its out-edge's type from its in-edges.  Edge l (l <=
kappa) is the out-edge of source l; the last edge enters the terminal.

Operator tags are opaque to the solvers; only the schedule simulator
evaluates them.
"""

from __future__ import annotations

from functools import reduce

from .errors import BadDegree, NotATree, NotTopological, UnknownEdge

COMMUTATIVE_OPS = ("add-mod-q", "mul-mod-q", "xor", "min", "max")
KNOWN_OPS = COMMUTATIVE_OPS + ("lookup-table",)


class ComputationTree:
    """In-tree over labelled nodes/edges.

    edges: sequence of (tail, head) pairs in edge-label order, node labels 1-based.
    ops:   operator tag per computing node (any node with in-degree > 0 except
           sources; the terminal never computes).
    tables: lookup tables for nodes tagged "lookup-table"; nested lists indexed
           by the operand symbols in edge-label order.
    """

    def __init__(self, num_nodes, edges, ops=None, tables=None):
        self.num_nodes = int(num_nodes)
        self.edges = tuple((int(t), int(h)) for t, h in edges)
        self.ops = dict(ops or {})
        self.tables = dict(tables or {})
        n_edges = len(self.edges)
        self._pre = [[] for _ in range(n_edges + 1)]
        self._suc = [[] for _ in range(n_edges + 1)]
        by_head = {}
        by_tail = {}
        for i, (t, h) in enumerate(self.edges, start=1):
            by_head.setdefault(h, []).append(i)
            by_tail.setdefault(t, []).append(i)
        for i, (t, h) in enumerate(self.edges, start=1):
            self._pre[i] = sorted(by_head.get(t, []))
            self._suc[i] = sorted(by_tail.get(h, []))
        in_deg = [0] * (self.num_nodes + 1)
        out_deg = [0] * (self.num_nodes + 1)
        for t, h in self.edges:
            if 1 <= t <= self.num_nodes:
                out_deg[t] += 1
            if 1 <= h <= self.num_nodes:
                in_deg[h] += 1
        self._in_deg = in_deg
        self._out_deg = out_deg
        self.kappa = sum(1 for v in range(1, self.num_nodes + 1) if in_deg[v] == 0)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def tail(self, theta: int) -> int:
        self._check_edge(theta)
        return self.edges[theta - 1][0]

    def head(self, theta: int) -> int:
        self._check_edge(theta)
        return self.edges[theta - 1][1]

    def _check_edge(self, theta):
        if not (1 <= theta <= len(self.edges)):
            raise UnknownEdge(f"no edge labelled {theta}")

    def __repr__(self):
        return f"ComputationTree(nodes={self.num_nodes}, edges={self.edges}, ops={self.ops})"


def pre_edges(tree: ComputationTree, theta: int):
    """Edge labels whose head is tail(theta) -- the types theta is computed from."""
    tree._check_edge(theta)
    return set(tree._pre[theta])


def suc_edges(tree: ComputationTree, theta: int):
    """Edge labels whose tail is head(theta)."""
    tree._check_edge(theta)
    return set(tree._suc[theta])


def validate_tree(tree: ComputationTree) -> None:
    """Raise a named error unless degree and topological-labelling rules hold.

    Runs in O(|edges|): degree rules are per-node counters and the label rules
    reduce to per-edge comparisons (every edge increases node labels, every
    predecessor has a smaller edge label).
    """
    n, g = tree.num_nodes, tree.num_edges
    if n < 2 or g < 1:
        raise NotATree(f"need at least one source and a terminal, got {n} nodes")
    for t, h in tree.edges:
        if not (1 <= t <= n and 1 <= h <= n):
            raise NotATree(f"edge ({t},{h}) references a missing node")
        if t == h:
            raise NotATree(f"self-loop at tree node {t}")
    if g != n - 1:
        raise NotATree(f"{g} edges on {n} nodes cannot be a tree")

    kappa = tree.kappa
    if kappa < 1:
        raise NotATree("no source nodes (every node has an in-edge)")
    for v in range(1, n + 1):
        ind, outd = tree._in_deg[v], tree._out_deg[v]
        if v <= kappa:
            if ind != 0 or outd != 1:
                raise BadDegree(f"source node {v} must have in-degree 0 and "
                                f"out-degree 1, has {ind}/{outd}", node=v)
        elif v == n:
            if ind != 1 or outd != 0:
                raise BadDegree(f"terminal node {v} must have in-degree 1 and "
                                f"out-degree 0, has {ind}/{outd}", node=v)
        else:
            if ind <= 1 or outd != 1:
                raise BadDegree(f"computing node {v} must have in-degree > 1 and "
                                f"out-degree 1, has {ind}/{outd}", node=v)

    # node labels: every edge must go from a lower to a higher label
    for t, h in tree.edges:
        if t >= h:
            raise NotTopological(f"edge ({t},{h}) decreases node labels", i=t, j=h)
    # edge labels: predecessors must carry smaller labels
    for i in range(1, g + 1):
        for eta in tree._pre[i]:
            if eta >= i:
                raise NotTopological(f"edge {eta} precedes edge {i} but is not "
                                     f"labelled earlier", i=eta, j=i)
    # fixed anchors: edge l leaves source l, last edge enters the terminal
    for l in range(1, kappa + 1):
        if tree.tail(l) != l:
            raise NotTopological(f"edge {l} must be the out-edge of source {l}, "
                                 f"leaves node {tree.tail(l)}", i=l, j=tree.tail(l))
    if tree.head(g) != n:
        raise NotTopological(f"last edge must enter the terminal node {n}", i=g, j=n)


def source_label(tree: ComputationTree, theta: int):
    """Index l if theta is the out-edge of source l, else None."""
    return theta if theta <= tree.kappa else None


def apply_operator(op, operands, q, table=None):
    """Evaluate one operator over symbols in 0..q-1 (edge-label operand order)."""
    if op == "add-mod-q":
        return sum(operands) % q
    if op == "mul-mod-q":
        return reduce(lambda a, b: (a * b) % q, operands)
    if op == "xor":
        if q & (q - 1):
            raise ValueError(f"xor needs a power-of-two alphabet, got q={q}")
        return reduce(lambda a, b: a ^ b, operands)
    if op == "min":
        return min(operands)
    if op == "max":
        return max(operands)
    if op == "lookup-table":
        cell = table
        for s in operands:
            cell = cell[s]
        return cell % q
    raise ValueError(f"unknown operator tag {op!r}")


def evaluate(tree: ComputationTree, inputs, q):
    """Value of every edge type for one tuple of source symbols.

    inputs[l-1] is the symbol generated by source l.  Returns a list indexed by
    edge label (entry 0 unused); the terminal's value is the last entry.
    """
    values = [None] * (tree.num_edges + 1)
    for i in range(1, tree.num_edges + 1):
        if i <= tree.kappa:
            values[i] = inputs[i - 1] % q
        else:
            node = tree.tail(i)
            operands = [values[eta] for eta in tree._pre[i]]
            values[i] = apply_operator(tree.ops.get(node), operands, q,
                                       table=tree.tables.get(node))
    return values


def evaluate_function(tree: ComputationTree, inputs, q):
    return evaluate(tree, inputs, q)[tree.num_edges]


def edge_signature(tree: ComputationTree, theta: int, _cache=None):
    """Structural hash of the expression an edge computes.

    Two edges (possibly of different trees over the same source set) with equal
    signatures denote the same function, so min-cost tables can be shared.
    Commutative operator tags sort their operand signatures.
    """
    if _cache is None:
        _cache = {}
    if theta in _cache:
        return _cache[theta]
    if theta <= tree.kappa:
        sig = ("src", theta)
    else:
        node = tree.tail(theta)
        op = tree.ops.get(node)
        children = tuple(edge_signature(tree, eta, _cache) for eta in tree._pre[theta])
        if op in COMMUTATIVE_OPS:
            children = tuple(sorted(children))
        if op == "lookup-table":
            tbl = tree.tables.get(node)
            sig = (op, _freeze(tbl), children)
        else:
            sig = (op, children)
    _cache[theta] = sig
    return sig


def _freeze(table):
    if isinstance(table, (list, tuple)):
        return tuple(_freeze(x) for x in table)
    return table

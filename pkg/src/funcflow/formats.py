"""Instance and solution documents (strict JSON: unknown fields are rejected).

Instance documents describe the network and one or more computation trees:

    {"nodes": [0,1,2], "edges": [{"u":0,"v":1,"cap":"3/2","directed":true}],
     "sources": [0], "terminal": 2, "alphabet_q": 2,
     "tree": {"nodes":[{"id":10,"op":null}, ...],
              "edges":[{"id":1,"tail":10,"head":12}, ...],
              "source_map": {"10": 0}}}

Variants: "trees" (list of tree documents) for several trees of one function;
"terminals"/"weights"/"mode"/"trees" for multiple terminals; "precision"
mapping tree-edge ids to bit widths; "energy" with node budgets and per-type
compute/transmit/receive costs (edge capacities may then be omitted).

Solutions: a node-arc report {"lambda", "flows", "self_loops"} and an
embedding-flows report {"lambda", "embedding_flows"}; rationals are "p/q"
strings.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .embedding import Embedding
from .errors import InvalidDocument
from .extensions import EnergyModel, MultiTerminalInstance, TerminalProblem
from .lp import EmbeddingFlows, NodeArcSolution
from .network import Alphabet, Edge, Network, as_fraction
from .tree import ComputationTree, KNOWN_OPS


def frac_str(x) -> str:
    f = as_fraction(x)
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def parse_frac(value) -> Fraction:
    try:
        return as_fraction(value)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise InvalidDocument(f"bad rational {value!r}: {exc}")


def load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh, parse_float=Fraction)
    except OSError as exc:
        raise InvalidDocument(f"cannot read {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise InvalidDocument(f"{path} is not valid JSON: {exc}")


def _check_fields(obj, where, required, optional=()):
    if not isinstance(obj, dict):
        raise InvalidDocument(f"{where} must be an object")
    for key in obj:
        if key not in required and key not in optional:
            raise InvalidDocument(f"unknown field {key!r} in {where}")
    for key in required:
        if key not in obj:
            raise InvalidDocument(f"missing field {key!r} in {where}")


def _int(value, where):
    if isinstance(value, bool) or not isinstance(value, int):
        raise InvalidDocument(f"{where} must be an integer, got {value!r}")
    return value


@dataclass
class ParsedTree:
    tree: ComputationTree
    sources: tuple       # network source nodes in label order
    edge_labels: dict    # document edge id -> canonical type label
    node_labels: dict    # document node id -> canonical node label


def parse_tree_doc(doc, where="tree", source_order=None) -> ParsedTree:
    """Build a canonically labelled tree from a document.

    source_order: the network's source list; tree sources are labelled so that
    source l maps to source_order[l-1].  When None (multi-terminal documents),
    sources are ordered by their mapped network node id.
    """
    _check_fields(doc, where, ("nodes", "edges", "source_map"))
    node_ids = []
    ops = {}
    tables = {}
    for nd in doc["nodes"]:
        _check_fields(nd, f"{where}.nodes[]", ("id",), ("op", "table"))
        nid = _int(nd["id"], f"{where} node id")
        if nid in ops or nid in node_ids:
            raise InvalidDocument(f"duplicate tree node id {nid}")
        node_ids.append(nid)
        op = nd.get("op")
        if op is not None:
            if op not in KNOWN_OPS:
                raise InvalidDocument(f"unknown operator {op!r} on node {nid}")
            ops[nid] = op
            if op == "lookup-table":
                if "table" not in nd:
                    raise InvalidDocument(f"node {nid} needs a lookup table")
                tables[nid] = nd["table"]
            elif "table" in nd:
                raise InvalidDocument(f"node {nid} carries a table without "
                                      f"op lookup-table")
        elif "table" in nd:
            raise InvalidDocument(f"node {nid} carries a table without an op")

    edge_docs = []
    seen_edges = set()
    for ed in doc["edges"]:
        _check_fields(ed, f"{where}.edges[]", ("id", "tail", "head"))
        eid = _int(ed["id"], "tree edge id")
        if eid in seen_edges:
            raise InvalidDocument(f"duplicate tree edge id {eid}")
        seen_edges.add(eid)
        tail = _int(ed["tail"], "tree edge tail")
        head = _int(ed["head"], "tree edge head")
        for ref in (tail, head):
            if ref not in node_ids:
                raise InvalidDocument(f"tree edge {eid} references missing "
                                      f"node {ref}")
        edge_docs.append((eid, tail, head))

    smap = doc["source_map"]
    if not isinstance(smap, dict):
        raise InvalidDocument("source_map must be an object")
    source_map = {}
    for key, net_node in smap.items():
        try:
            nid = int(key)
        except ValueError:
            raise InvalidDocument(f"source_map key {key!r} is not a node id")
        if nid not in node_ids:
            raise InvalidDocument(f"source_map references missing node {nid}")
        source_map[nid] = _int(net_node, "source_map value")

    in_deg = {nid: 0 for nid in node_ids}
    out_deg = {nid: 0 for nid in node_ids}
    for _eid, tail, head in edge_docs:
        out_deg[tail] += 1
        in_deg[head] += 1
    source_nodes = [nid for nid in node_ids if in_deg[nid] == 0]
    sink_nodes = [nid for nid in node_ids if out_deg[nid] == 0]
    if set(source_map) != set(source_nodes):
        raise InvalidDocument("source_map keys must be exactly the in-degree-0 "
                              "tree nodes")
    if len(sink_nodes) != 1:
        raise InvalidDocument(f"tree must have exactly one sink, found "
                              f"{len(sink_nodes)}")
    if len(set(source_map.values())) != len(source_map):
        raise InvalidDocument("two tree sources map to the same network node")

    if source_order is not None:
        by_net = {v: k for k, v in source_map.items()}
        if set(by_net) != set(source_order):
            raise InvalidDocument("source_map must cover exactly the declared "
                                  "sources")
        ordered_sources = [by_net[s] for s in source_order]
        net_sources = tuple(source_order)
    else:
        ordered_sources = sorted(source_map, key=lambda nid: source_map[nid])
        net_sources = tuple(source_map[nid] for nid in ordered_sources)

    # canonical edge labels: source edges first (in source order), then a
    # topological sweep by document id, terminal edge last
    edge_label = {}
    out_edge = {}
    for eid, tail, _head in edge_docs:
        out_edge.setdefault(tail, eid)
    for snode in ordered_sources:
        if snode not in out_edge:
            raise InvalidDocument(f"source node {snode} has no out-edge")
    for l, snode in enumerate(ordered_sources, start=1):
        edge_label[out_edge[snode]] = l
    terminal_edges = [eid for eid, _t, h in edge_docs if h == sink_nodes[0]]
    if not terminal_edges:
        raise InvalidDocument("the sink node has no in-edge")
    terminal_edge = terminal_edges[0]
    remaining = [e for e in edge_docs if e[0] not in edge_label]
    next_label = len(ordered_sources) + 1
    while remaining:
        ready = [
            (eid, tail, head) for (eid, tail, head) in remaining
            if all(edge_label.get(other) is not None
                   for (other, _t2, h2) in edge_docs if h2 == tail)
        ]
        if not ready:
            raise InvalidDocument("tree edges contain a cycle")
        non_terminal = [e for e in ready if e[0] != terminal_edge]
        pick = min(non_terminal or ready, key=lambda e: e[0])
        edge_label[pick[0]] = next_label
        next_label += 1
        remaining = [e for e in remaining if e[0] != pick[0]]

    node_label = {}
    for l, snode in enumerate(ordered_sources, start=1):
        node_label[snode] = l
    node_label[sink_nodes[0]] = len(node_ids)
    internal = [nid for nid in node_ids
                if nid not in node_label and out_deg[nid] > 0]
    internal.sort(key=lambda nid: edge_label[out_edge[nid]])
    for offset, nid in enumerate(internal, start=len(ordered_sources) + 1):
        node_label[nid] = offset
    if len(node_label) != len(node_ids):
        raise InvalidDocument("tree contains nodes unrelated to the function")

    canon_edges = [None] * len(edge_docs)
    for eid, tail, head in edge_docs:
        canon_edges[edge_label[eid] - 1] = (node_label[tail], node_label[head])
    canon_ops = {node_label[nid]: op for nid, op in ops.items()}
    canon_tables = {node_label[nid]: t for nid, t in tables.items()}
    tree = ComputationTree(len(node_ids), canon_edges, canon_ops, canon_tables)
    return ParsedTree(tree=tree, sources=net_sources,
                      edge_labels={eid: lab for eid, lab in edge_label.items()},
                      node_labels=node_label)


@dataclass
class Instance:
    network: Network
    kind: str                      # base | multi-tree | multi-terminal | precision | energy
    trees: list = field(default_factory=list)
    precision: dict | None = None  # canonical type label -> width
    energy: EnergyModel | None = None
    multi_terminal: MultiTerminalInstance | None = None
    parsed_trees: list = field(default_factory=list)


_TOP_FIELDS = ("nodes", "edges", "sources", "terminal", "alphabet_q", "tree",
               "trees", "terminals", "weights", "mode", "precision", "energy")


def parse_instance(doc) -> Instance:
    _check_fields(doc, "instance", ("nodes", "edges", "alphabet_q"),
                  tuple(f for f in _TOP_FIELDS if f not in
                        ("nodes", "edges", "alphabet_q")))
    node_list = doc["nodes"]
    if not isinstance(node_list, list) or sorted(
            _int(v, "node id") for v in node_list) != list(range(len(node_list))):
        raise InvalidDocument("nodes must list exactly the ids 0..n-1")
    n = len(node_list)
    q = _int(doc["alphabet_q"], "alphabet_q")
    if q < 2:
        raise InvalidDocument(f"alphabet_q must be >= 2, got {q}")

    has_energy = "energy" in doc
    edges = []
    for ed in doc["edges"]:
        _check_fields(ed, "edges[]", ("u", "v"), ("cap", "directed"))
        if "cap" not in ed and not has_energy:
            raise InvalidDocument("edge is missing its capacity")
        cap = parse_frac(ed.get("cap", 0))
        directed = ed.get("directed", False)
        if not isinstance(directed, bool):
            raise InvalidDocument("edge field 'directed' must be a boolean")
        edges.append(Edge(_int(ed["u"], "edge endpoint"),
                          _int(ed["v"], "edge endpoint"), cap, directed))

    multi_terminal = "terminals" in doc
    if multi_terminal:
        for banned in ("sources", "terminal", "precision", "energy", "tree"):
            if banned in doc:
                raise InvalidDocument(f"field {banned!r} conflicts with "
                                      f"'terminals'")
        for needed in ("weights", "mode", "trees"):
            if needed not in doc:
                raise InvalidDocument(f"'terminals' requires field {needed!r}")
        terminals = [_int(t, "terminal") for t in doc["terminals"]]
        weights = [parse_frac(w) for w in doc["weights"]]
        tree_docs = doc["trees"]
        if not (len(terminals) == len(weights) == len(tree_docs)):
            raise InvalidDocument("terminals, weights and trees must align")
        mode = doc["mode"]
        if mode not in ("weighted-sum", "concurrent"):
            raise InvalidDocument(f"unknown mode {mode!r}")
        problems = []
        parsed = []
        for idx, td in enumerate(tree_docs):
            pt = parse_tree_doc(td, where=f"trees[{idx}]")
            parsed.append(pt)
            problems.append(TerminalProblem(tree=pt.tree, sources=pt.sources,
                                            terminal=terminals[idx],
                                            alpha=weights[idx]))
        all_sources = [s for p in problems for s in p.sources]
        net = Network(n, edges, tuple(dict.fromkeys(all_sources)),
                      terminals[0], Alphabet(q))
        inst = MultiTerminalInstance(problems=tuple(problems), mode=mode)
        return Instance(network=net, kind="multi-terminal",
                        trees=[p.tree for p in problems],
                        multi_terminal=inst, parsed_trees=parsed)

    for needed in ("sources", "terminal"):
        if needed not in doc:
            raise InvalidDocument(f"missing field {needed!r} in instance")
    sources = [_int(s, "source") for s in doc["sources"]]
    terminal = _int(doc["terminal"], "terminal")
    net = Network(n, edges, sources, terminal, Alphabet(q))

    if "tree" in doc and "trees" in doc:
        raise InvalidDocument("give either 'tree' or 'trees', not both")
    if "tree" not in doc and "trees" not in doc:
        raise InvalidDocument("instance needs a 'tree' or 'trees'")

    if "trees" in doc:
        if "precision" in doc or "energy" in doc:
            raise InvalidDocument("'trees' cannot be combined with precision "
                                  "or energy")
        parsed = [parse_tree_doc(td, where=f"trees[{i}]", source_order=sources)
                  for i, td in enumerate(doc["trees"])]
        return Instance(network=net, kind="multi-tree",
                        trees=[p.tree for p in parsed], parsed_trees=parsed)

    pt = parse_tree_doc(doc["tree"], source_order=sources)
    kind = "base"
    precision = None
    energy = None
    if "precision" in doc and "energy" in doc:
        raise InvalidDocument("precision and energy modes are exclusive")
    if "precision" in doc:
        kind = "precision"
        precision = {}
        pdoc = doc["precision"]
        if not isinstance(pdoc, dict):
            raise InvalidDocument("precision must map tree edge ids to widths")
        for key, val in pdoc.items():
            try:
                eid = int(key)
            except ValueError:
                raise InvalidDocument(f"precision key {key!r} is not an edge id")
            if eid not in pt.edge_labels:
                raise InvalidDocument(f"precision names missing tree edge {eid}")
            precision[pt.edge_labels[eid]] = parse_frac(val)
    if "energy" in doc:
        kind = "energy"
        edoc = doc["energy"]
        _check_fields(edoc, "energy", ("budgets",), ("costs",))
        budgets_doc = edoc["budgets"]
        if not isinstance(budgets_doc, dict):
            raise InvalidDocument("energy budgets must map node ids to values")
        budgets = [None] * n
        for key, val in budgets_doc.items():
            try:
                u = int(key)
            except ValueError:
                raise InvalidDocument(f"budget key {key!r} is not a node id")
            if not (0 <= u < n):
                raise InvalidDocument(f"budget names missing node {u}")
            budgets[u] = parse_frac(val)
        if any(b is None for b in budgets):
            raise InvalidDocument("every node needs an energy budget")
        compute, transmit, receive = {}, {}, {}
        for key, triple in (edoc.get("costs") or {}).items():
            try:
                eid = int(key)
            except ValueError:
                raise InvalidDocument(f"cost key {key!r} is not an edge id")
            if eid not in pt.edge_labels:
                raise InvalidDocument(f"costs name missing tree edge {eid}")
            _check_fields(triple, f"energy.costs[{key}]", (), ("c", "t", "r"))
            label = pt.edge_labels[eid]
            compute[label] = parse_frac(triple.get("c", 0))
            transmit[label] = parse_frac(triple.get("t", 0))
            receive[label] = parse_frac(triple.get("r", 0))
        energy = EnergyModel(budgets=tuple(budgets), compute=compute,
                             transmit=transmit, receive=receive)
    return Instance(network=net, kind=kind, trees=[pt.tree],
                    precision=precision, energy=energy, parsed_trees=[pt])


# ------------------------------------------------------------- solution docs

def node_arc_report(sol: NodeArcSolution) -> dict:
    flows = [{"type": t, "u": u, "v": v, "value": frac_str(x)}
             for (t, u, v), x in sorted(sol.edge_flows.items())]
    self_loops = [{"type": t, "u": u, "value": frac_str(x)}
                  for (t, u), x in sorted(sol.self_flows.items())]
    return {"lambda": frac_str(sol.rate), "flows": flows,
            "self_loops": self_loops}


_REPORT_META = ("method", "kind", "lambda_float", "dual", "iterations",
                "per_terminal", "weighted_rate")


def parse_node_arc_report(doc) -> NodeArcSolution:
    _check_fields(doc, "node-arc solution", ("lambda", "flows", "self_loops"),
                  _REPORT_META)
    sol = NodeArcSolution(rate=parse_frac(doc["lambda"]))
    for item in doc["flows"]:
        _check_fields(item, "flows[]", ("type", "u", "v", "value"))
        key = (_int(item["type"], "type"), _int(item["u"], "u"),
               _int(item["v"], "v"))
        sol.edge_flows[key] = parse_frac(item["value"])
    for item in doc["self_loops"]:
        _check_fields(item, "self_loops[]", ("type", "u", "value"))
        key = (_int(item["type"], "type"), _int(item["u"], "u"))
        sol.self_flows[key] = parse_frac(item["value"])
    return sol


def flows_report(flows: EmbeddingFlows) -> dict:
    entries = []
    for emb, x in flows.items_sorted():
        entries.append({"tree": emb.tree_id,
                        "paths": [list(p) for p in emb.paths],
                        "value": frac_str(x)})
    return {"lambda": frac_str(flows.total), "embedding_flows": entries}


def parse_flows_report(doc) -> EmbeddingFlows:
    _check_fields(doc, "embedding flows", ("embedding_flows",),
                  ("lambda",) + _REPORT_META)
    flows = {}
    for item in doc["embedding_flows"]:
        _check_fields(item, "embedding_flows[]", ("paths", "value"), ("tree",))
        paths = tuple(tuple(_int(v, "path node") for v in p)
                      for p in item["paths"])
        emb = Embedding(paths, tree_id=item.get("tree", 0))
        flows[emb] = parse_frac(item["value"])
    result = EmbeddingFlows(flows)
    if "lambda" in doc and parse_frac(doc["lambda"]) != result.total:
        raise InvalidDocument("lambda does not match the sum of the flows")
    return result

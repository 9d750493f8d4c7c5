"""Command-line front end: solve instances, decompose node-arc solutions,
simulate schedules on random symbol streams.

Exit codes: 0 success, 2 validation failure, 3 solver failure, 4 verification
failure.  Failures print a single machine-readable line `error:<Name>: ...` to
stderr.  Reports are deterministic JSON (byte-identical for identical inputs
and seed).
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction

from .decompose import decompose
from .errors import (CapacityExceeded, FuncflowError, QueueUnderflow,
                     SolverError, ValidationError)
from .extensions import (energy_approx, energy_exact, multi_terminal_concurrent,
                         multi_terminal_concurrent_exact,
                         multi_terminal_weighted_sum,
                         multi_terminal_weighted_sum_exact, multi_tree_approx,
                         multi_tree_exact, precision_approx, precision_exact,
                         validate_multi_terminal)
from .formats import (Instance, flows_report, frac_str, load_json,
                      node_arc_report, parse_flows_report, parse_instance,
                      parse_node_arc_report)
from .lp import EmbeddingFlows, solve_embedding_edge_exact, solve_node_arc
from .network import validate_network
from .embedding import validate_embedding
from .primal_dual import approx_max_rate
from .protocol import (build_schedule, expected_outputs, round_flows, simulate,
                       verify_schedule)
from .tree import validate_tree

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_SOLVER = 3
EXIT_VERIFY = 4


class UnsupportedMethod(SolverError):
    code = "UnsupportedMethod"


def _emit(report) -> None:
    print(json.dumps(report, indent=2, sort_keys=True))


def _fail(exc: FuncflowError, code: int) -> int:
    sys.stderr.write(f"error:{exc.code}: {exc}\n")
    return code


def _load_instance(path) -> Instance:
    inst = parse_instance(load_json(path))
    validate_network(inst.network)
    for tree in inst.trees:
        validate_tree(tree)
    if inst.multi_terminal is not None:
        validate_multi_terminal(inst.network, inst.multi_terminal)
    return inst


def _flows_payload(flows: EmbeddingFlows):
    return flows_report(flows)["embedding_flows"]


def _cmd_solve(args) -> int:
    inst = _load_instance(args.instance)
    net = inst.network
    method = args.method
    report = {"method": method, "kind": inst.kind}

    if method == "exact":
        if inst.kind == "base":
            flows, dual = solve_embedding_edge_exact(net, inst.trees[0],
                                                     cap=args.enumerate_cap)
        elif inst.kind == "multi-tree":
            flows, dual = multi_tree_exact(net, inst.trees, cap=args.enumerate_cap)
        elif inst.kind == "precision":
            flows, dual = precision_exact(net, inst.trees[0], inst.precision,
                                          cap=args.enumerate_cap)
        elif inst.kind == "energy":
            flows, dual = energy_exact(net, inst.trees[0], inst.energy,
                                       cap=args.enumerate_cap)
        elif inst.kind == "multi-terminal":
            return _solve_multi_terminal_exact(inst, args, report)
        report["lambda"] = frac_str(flows.total)
        report["lambda_float"] = float(flows.total)
        report["embedding_flows"] = _flows_payload(flows)
        report["dual"] = {"objective": frac_str(dual.objective),
                          "lengths": [frac_str(l) for l in dual.lengths]}
        _emit(report)
        return EXIT_OK

    if method == "node-arc":
        if inst.kind == "base":
            sol = solve_node_arc(net, inst.trees[0])
        elif inst.kind == "precision":
            sol = solve_node_arc(net, inst.trees[0], precision=inst.precision)
        else:
            raise UnsupportedMethod(f"node-arc method does not support "
                                    f"{inst.kind} instances")
        report.update(node_arc_report(sol))
        report["lambda_float"] = float(sol.rate)
        _emit(report)
        return EXIT_OK

    # approx
    eps = args.epsilon
    if inst.kind == "base":
        res = approx_max_rate(net, inst.trees[0], eps)
    elif inst.kind == "multi-tree":
        res = multi_tree_approx(net, inst.trees, eps)
    elif inst.kind == "precision":
        res = precision_approx(net, inst.trees[0], inst.precision, eps)
    elif inst.kind == "energy":
        res = energy_approx(net, inst.trees[0], inst.energy, eps)
    elif inst.kind == "multi-terminal":
        return _solve_multi_terminal_approx(inst, args, report)
    report["lambda"] = frac_str(res.rate_exact)
    report["lambda_float"] = res.rate
    report["embedding_flows"] = _flows_payload(res.flows)
    report["iterations"] = res.iterations
    report["dual"] = {"objective": res.dual.objective,
                      "lengths": list(res.dual.lengths or [])}
    _emit(report)
    return EXIT_OK


def _merge_problem_flows(per_problem):
    merged = {}
    for flows in per_problem:
        merged.update(flows.flows)
    return EmbeddingFlows(merged)


def _solve_multi_terminal_exact(inst, args, report) -> int:
    mt = inst.multi_terminal
    if mt.mode == "weighted-sum":
        per_problem, opt = multi_terminal_weighted_sum_exact(
            inst.network, mt, cap=args.enumerate_cap)
        report["weighted_rate"] = frac_str(opt)
        report["lambda"] = frac_str(opt)
        report["lambda_float"] = float(opt)
    else:
        opt, values = multi_terminal_concurrent_exact(inst.network, mt,
                                                      cap=args.enumerate_cap)
        per_problem = [EmbeddingFlows({}) for _ in mt.problems]
        for key, x in values.items():
            for j, emb in enumerate(key):
                contribution = x * mt.problems[j].alpha
                if contribution:
                    flows = per_problem[j].flows
                    flows[emb] = flows.get(emb, Fraction(0)) + contribution
        report["lambda"] = frac_str(opt)
        report["lambda_float"] = float(opt)
    report["per_terminal"] = [
        {"terminal": p.terminal, "rate": frac_str(flows.total),
         "embedding_flows": _flows_payload(flows)}
        for p, flows in zip(mt.problems, per_problem)]
    report["embedding_flows"] = _flows_payload(_merge_problem_flows(per_problem))
    _emit(report)
    return EXIT_OK


def _solve_multi_terminal_approx(inst, args, report) -> int:
    mt = inst.multi_terminal
    if mt.mode == "weighted-sum":
        per_problem, weighted, dual, iters = multi_terminal_weighted_sum(
            inst.network, mt, args.epsilon)
        report["weighted_rate"] = frac_str(weighted)
        report["lambda"] = frac_str(weighted)
        report["lambda_float"] = float(weighted)
    else:
        lam, per_problem, dual, iters = multi_terminal_concurrent(
            inst.network, mt, args.epsilon)
        report["lambda"] = frac_str(lam)
        report["lambda_float"] = float(lam)
    report["iterations"] = iters
    report["dual"] = {"objective": dual.objective,
                      "lengths": list(dual.lengths or [])}
    report["per_terminal"] = [
        {"terminal": p.terminal, "rate": frac_str(flows.total),
         "embedding_flows": _flows_payload(flows)}
        for p, flows in zip(mt.problems, per_problem)]
    report["embedding_flows"] = _flows_payload(_merge_problem_flows(per_problem))
    _emit(report)
    return EXIT_OK


def _cmd_decompose(args) -> int:
    inst = _load_instance(args.instance)
    if inst.kind not in ("base", "precision"):
        raise UnsupportedMethod(f"decompose supports base and precision "
                                f"instances, not {inst.kind}")
    sol = parse_node_arc_report(load_json(args.solution))
    flows = decompose(inst.network, inst.trees[0], sol,
                      precision=inst.precision)
    doc = flows_report(flows)
    text = json.dumps(doc, indent=2, sort_keys=True)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
        print(f"wrote {args.output} (lambda: {doc['lambda']})")
    else:
        print(text)
    return EXIT_OK


def _cmd_simulate(args) -> int:
    inst = _load_instance(args.instance)
    if inst.kind not in ("base", "multi-tree"):
        raise UnsupportedMethod(f"simulate supports base and multi-tree "
                                f"instances, not {inst.kind}")
    net = inst.network
    flows = parse_flows_report(load_json(args.flows))
    for emb in flows.flows:
        if not (0 <= emb.tree_id < len(inst.trees)):
            raise UnsupportedMethod(f"flow references tree {emb.tree_id}")
        validate_embedding(net, inst.trees[emb.tree_id], emb)

    rounded = round_flows(flows, args.rounding_eps)
    schedule = build_schedule(net, inst.trees, rounded)
    violations = verify_schedule(net, schedule)
    if violations:
        edge, load, limit = violations[0]
        raise CapacityExceeded(f"steady-state load {load} exceeds {limit} on "
                               f"edge {edge}", link=edge)

    rng = random.Random(args.seed)
    K = args.frames
    rN = schedule.rN
    q = net.alphabet.q
    streams = {s: [rng.randrange(q) for _ in range(K * rN)]
               for s in net.sources}
    result = simulate(net, schedule, K, streams,
                      collect_trace=args.trace is not None)
    expected = expected_outputs(net, schedule, K, streams)
    ok = result.outputs == expected

    if args.outputs:
        with open(args.outputs, "w") as fh:
            for sym in result.outputs:
                fh.write(f"{sym}\n")
    if args.trace:
        with open(args.trace, "w") as fh:
            for rec in result.trace:
                fh.write(json.dumps(rec, sort_keys=True) + "\n")

    report = {
        "verdict": "PASS" if ok else "FAIL",
        "frames": K,
        "N": schedule.N,
        "rate": frac_str(schedule.r),
        "delivered": len(result.outputs),
        "expected": len(expected),
        "per_frame_values": rN,
        "seed": args.seed,
    }
    _emit(report)
    if not ok:
        sys.stderr.write("error:OutputMismatch: terminal values differ from "
                         "ground truth\n")
        return EXIT_VERIFY
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="funcflow",
        description="Max-rate in-network function computation")
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="compute the maximum rate")
    p_solve.add_argument("instance")
    p_solve.add_argument("--method", choices=("exact", "node-arc", "approx"),
                         default="exact")
    p_solve.add_argument("--epsilon", type=float, default=0.1,
                         help="accuracy target for --method=approx")
    p_solve.add_argument("--enumerate-cap", type=int, default=100000,
                         help="abort exact solves beyond this many embeddings")
    p_solve.set_defaults(func=_cmd_solve)

    p_dec = sub.add_parser("decompose",
                           help="turn a node-arc solution into embedding flows")
    p_dec.add_argument("instance")
    p_dec.add_argument("solution", help="node-arc solution JSON")
    p_dec.add_argument("output", nargs="?", default=None,
                       help="embedding-flows JSON (default: stdout)")
    p_dec.set_defaults(func=_cmd_decompose)

    p_sim = sub.add_parser("simulate",
                           help="run embedding flows on random symbol streams")
    p_sim.add_argument("instance")
    p_sim.add_argument("flows", help="embedding-flows JSON")
    p_sim.add_argument("--frames", type=int, default=10)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--rounding-eps", type=Fraction, default=None,
                       help="largest acceptable rate loss when rounding flows")
    p_sim.add_argument("--trace", default=None,
                       help="write per-link subframe records (JSONL) here")
    p_sim.add_argument("--outputs", default=None,
                       help="write delivered symbols (one per line) here")
    p_sim.set_defaults(func=_cmd_simulate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    verify_stage = args.command == "simulate"
    try:
        return args.func(args)
    except ValidationError as exc:
        return _fail(exc, EXIT_VALIDATION)
    except (CapacityExceeded, QueueUnderflow) as exc:
        return _fail(exc, EXIT_VERIFY if verify_stage else EXIT_SOLVER)
    except SolverError as exc:
        return _fail(exc, EXIT_SOLVER)


if __name__ == "__main__":
    sys.exit(main())

"""Command line front end: ``treecut <command> <file> [options]``.

Exit codes: 0 success, 1 usage or parse error, 2 impossible evidence or
inconsistent network, 3 oracle or cross-strategy disagreement.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field

import numpy as np

from .cluster import CostMeter, Strategy
from .config import CUTSET_BUDGET, PROB_ATOL, VALUE_TOL
from .csp import solve
from .decomposition import Decomposition, DecompositionError, cycle_cutset, decompose, tradeoff_report
from .graph import GraphError, UndirectedGraph
from .inference import InferenceError, belief, mpe
from .io import ParseError, ProblemFile, load, parse_criterion
from .models import ModelError, joint_probability
from .optimize import meu, optimization_graph, optimize
from .oracle import OracleBudgetExceeded, oracle_belief, oracle_csp, oracle_meu, oracle_mpe, oracle_opt

EXIT_OK, EXIT_USAGE, EXIT_IMPOSSIBLE, EXIT_DISAGREE = 0, 1, 2, 3
STRATEGIES = ("elim", "brute", "cutset")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class Out:
    """Collects output lines; ``records`` selects the key=value form."""

    records: bool
    lines: list[str] = field(default_factory=list)

    def emit(self, text: str, record: str | None = None) -> None:
        self.lines.append(record if (self.records and record is not None) else text)

    def __str__(self) -> str:
        return "".join(line + "\n" for line in self.lines)


def _num(x: float) -> str:
    return repr(float(x))


def _names(pf: ProblemFile, vs) -> str:
    return ",".join(pf.names[v] for v in sorted(vs))


def _assignment(pf: ProblemFile, x: dict[int, int]) -> str:
    return " ".join(f"{pf.names[v]}={x[v]}" for v in sorted(x))


def _meter(m: CostMeter) -> str:
    d = m.as_dict()
    return "meter " + " ".join(f"{k}={v}" for k, v in d.items()) + f" total_entries={m.total_entries}"


def _variable(pf: ProblemFile, name: str) -> int:
    if name not in pf.names:
        raise UsageError(f"unknown variable {name!r}")
    return pf.names.index(name)


def parse_evidence(pf: ProblemFile, text: str | None) -> dict[int, int]:
    ev: dict[int, int] = {}
    if not text:
        return ev
    for item in text.split(","):
        name, sep, val = item.strip().partition("=")
        if not sep:
            raise UsageError(f"evidence item {item!r} is not of the form VAR=value")
        v = _variable(pf, name.strip())
        try:
            x = int(val)
        except ValueError:
            raise UsageError(f"evidence value {val!r} for {name} is not an integer") from None
        if not 0 <= x < pf.card[v]:
            raise UsageError(f"evidence value {x} for {name} is outside 0..{pf.card[v] - 1}")
        if v in ev:
            raise UsageError(f"variable {name} appears twice in the evidence")
        ev[v] = x
    return ev


def _require(pf: ProblemFile, *kinds: str) -> None:
    if pf.kind not in kinds:
        raise UsageError(f"this command needs a {' or '.join(kinds)} file, got a {pf.kind} file")


def _criterion(pf: ProblemFile, args):
    if getattr(args, "criterion", None):
        try:
            with open(args.criterion) as fh:
                text = fh.read()
        except OSError as exc:
            raise ParseError(f"cannot read file: {exc.strerror}", source=args.criterion) from exc
        return parse_criterion(text, pf.names, pf.card, args.criterion)
    return pf.criterion


def problem_graph(pf: ProblemFile, args=None) -> UndirectedGraph:
    """The graph that gets decomposed: moral graph, primal graph, or either
    augmented by the criterion / utility scheme."""
    if pf.kind == "belief":
        return pf.belief_network().moral_graph()
    if pf.kind == "influence":
        return pf.influence_diagram().augmented_graph()
    crit = _criterion(pf, args) if args is not None else pf.criterion
    return optimization_graph(pf.constraint_network(), crit)


def _decompose(pf: ProblemFile, g: UndirectedGraph, args) -> Decomposition:
    given = None
    if args.ordering == "given":
        if not args.order:
            raise UsageError("--ordering given needs --order A,B,...")
        given = [_variable(pf, nm.strip()) for nm in args.order.split(",")]
    return decompose(g, args.ordering, given)


def _tree(pf: ProblemFile, args):
    g = problem_graph(pf, args)
    dec = _decompose(pf, g, args)
    return dec, dec.level(args.sep_bound)


# ------------------------------------------------------------------ commands

def cmd_analyze(pf: ProblemFile, args, out: Out) -> int:
    g = problem_graph(pf, args)
    dec = _decompose(pf, g, args)
    fill = len(dec.chordal.fill_edges)
    out.emit(f"{pf.kind} problem: {pf.n} variables, {len(g.edges)} edges; {args.ordering} ordering adds "
             f"{fill} fill edges, induced width {dec.chordal.width}",
             f"problem kind={pf.kind} vars={pf.n} edges={len(g.edges)} ordering={args.ordering} "
             f"fill_edges={fill} width={dec.chordal.width}")
    order = ",".join(pf.names[v] for v in dec.chordal.order)
    out.emit(f"elimination order: {order}", f"order {order}")
    for i, c in enumerate(dec.cliques):
        out.emit(f"clique {i}: {{{_names(pf, c)}}}", f"clique index={i} vars={_names(pf, c)}")
    cs = cycle_cutset(g, "exact", args.budget)
    out.emit(f"cycle cutset: {{{_names(pf, cs.vertices)}}} (size {cs.size}{'' if cs.exact else ', greedy'})",
             f"cutset size={cs.size} exact={int(cs.exact)} vars={_names(pf, cs.vertices)}")
    for i, (s, t) in enumerate(dec.levels):
        clusters = " ".join("{" + _names(pf, c) + "}" for c in t.clusters)
        out.emit(f"T{i} (s={s}): {clusters}",
                 f"tree level={i} s={s} clusters={'|'.join(_names(pf, c) for c in t.clusters)}")
    report = tradeoff_report(g, dec, args.budget)
    text = report.records() if out.records else report.table()
    out.lines.extend(text.rstrip("\n").split("\n"))
    return EXIT_OK


def _oracle_line(out: Out, ok: bool, detail: str) -> int:
    verdict = "PASS" if ok else "FAIL"
    out.emit(f"oracle agreement: {verdict} ({detail})", f"oracle_check {verdict} {detail}")
    return EXIT_OK if ok else EXIT_DISAGREE


def cmd_belief(pf: ProblemFile, args, out: Out) -> int:
    _require(pf, "belief")
    bn = pf.belief_network()
    q = _variable(pf, args.query)
    ev = parse_evidence(pf, args.evidence)
    if q in ev:
        raise UsageError("query variable is part of the evidence")
    _, tree = _tree(pf, args)
    post = belief(bn, tree, args.strategy, q, ev, args.budget)
    code = EXIT_OK
    if post.impossible:
        out.emit("impossible evidence: P(e) = 0", "result impossible_evidence")
        code = EXIT_IMPOSSIBLE
    else:
        for x, p in enumerate(post.distribution):
            out.emit(f"P({args.query}={x} | e) = {p:.12g}", f"posterior var={args.query} value={x} p={_num(p)}")
        out.emit(f"P(e) = {post.evidence_probability:.12g}", f"evidence_probability p={_num(post.evidence_probability)}")
    out.emit(_meter(post.meter))
    if args.oracle:
        truth = oracle_belief(bn, q, ev)
        if truth is None:
            out.emit("oracle: impossible evidence", "oracle impossible_evidence")
            status = _oracle_line(out, post.impossible, "impossible")
        else:
            for x, p in enumerate(truth):
                out.emit(f"oracle P({args.query}={x} | e) = {p:.12g}",
                         f"oracle var={args.query} value={x} p={_num(p)}")
            diff = np.inf if post.impossible else float(np.max(np.abs(post.distribution - truth)))
            status = _oracle_line(out, diff <= PROB_ATOL, f"max_abs_diff={diff:.3g}")
        code = status or code
    return code


def cmd_mpe(pf: ProblemFile, args, out: Out) -> int:
    _require(pf, "belief")
    bn = pf.belief_network()
    ev = parse_evidence(pf, args.evidence)
    _, tree = _tree(pf, args)
    res = mpe(bn, tree, args.strategy, ev, args.budget)
    code = EXIT_OK
    if res.impossible:
        out.emit("impossible evidence: P(e) = 0", "result impossible_evidence")
        code = EXIT_IMPOSSIBLE
    else:
        out.emit(f"MPE probability {res.probability:.12g}", f"mpe p={_num(res.probability)}")
        out.emit(f"assignment: {_assignment(pf, res.assignment)}", f"assignment {_assignment(pf, res.assignment)}")
    out.emit(_meter(res.meter))
    if args.oracle:
        x, p = oracle_mpe(bn, ev)
        if x is None:
            out.emit("oracle: impossible evidence", "oracle impossible_evidence")
            status = _oracle_line(out, res.impossible, "impossible")
        else:
            out.emit(f"oracle MPE probability {p:.12g}", f"oracle p={_num(p)}")
            ok = not res.impossible and abs(res.probability - p) <= 1e-12 \
                and abs(joint_probability(bn, res.assignment) - res.probability) <= 1e-12
            diff = np.inf if res.impossible else abs(res.probability - p)
            status = _oracle_line(out, ok, f"abs_diff={diff:.3g}")
        code = status or code
    return code


def _csp_strategy(name: str) -> str:
    return "cutset" if Strategy.parse(name) is Strategy.CUTSET else "backtracking"


def cmd_solve(pf: ProblemFile, args, out: Out) -> int:
    _require(pf, "constraint")
    cn = pf.constraint_network()
    _, tree = _tree(pf, args)
    res = solve(cn, tree, _csp_strategy(args.strategy), count=args.count, mode=args.mode, budget=args.budget)
    code = EXIT_OK
    if not res.consistent:
        out.emit("inconsistent: no solution", "result inconsistent")
        code = EXIT_IMPOSSIBLE
    else:
        out.emit(f"solution: {_assignment(pf, res.solution)}", f"solution {_assignment(pf, res.solution)}")
    if args.count:
        out.emit(f"solutions: {res.count}", f"count n={res.count}")
    out.emit(_meter(res.meter))
    if args.oracle:
        truth = oracle_csp(cn)
        out.emit(f"oracle: consistent={str(truth.consistent).lower()} count={truth.count}",
                 f"oracle consistent={int(truth.consistent)} count={truth.count}")
        ok = truth.consistent == res.consistent and (not args.count or truth.count == res.count)
        code = _oracle_line(out, ok, f"consistent={int(res.consistent)}") or code
    return code


def _close(a: float, b: float) -> bool:
    return abs(a - b) <= VALUE_TOL * max(1.0, abs(b))


def cmd_optimize(pf: ProblemFile, args, out: Out) -> int:
    _require(pf, "constraint")
    cn = pf.constraint_network()
    crit = _criterion(pf, args)
    if not crit.components:
        raise UsageError("no criterion: give --criterion FILE or crit blocks in the problem file")
    _, tree = _tree(pf, args)
    res = optimize(cn, crit, tree, args.strategy, args.budget)
    code = EXIT_OK
    if not res.consistent:
        out.emit("inconsistent: no solution", "result inconsistent")
        code = EXIT_IMPOSSIBLE
    else:
        out.emit(f"optimum {res.value:.12g}", f"optimum value={_num(res.value)}")
        out.emit(f"assignment: {_assignment(pf, res.assignment)}", f"assignment {_assignment(pf, res.assignment)}")
    out.emit(_meter(res.meter))
    if args.oracle:
        truth = oracle_opt(cn, crit)
        if not truth.consistent:
            out.emit("oracle: inconsistent", "oracle inconsistent")
            status = _oracle_line(out, not res.consistent, "inconsistent")
        else:
            out.emit(f"oracle optimum {truth.value:.12g}", f"oracle value={_num(truth.value)}")
            ok = res.consistent and _close(res.value, truth.value)
            status = _oracle_line(out, ok, f"abs_diff={abs(res.value - truth.value):.3g}")
        code = status or code
    return code


def cmd_meu(pf: ProblemFile, args, out: Out) -> int:
    _require(pf, "influence")
    idg = pf.influence_diagram()
    _, tree = _tree(pf, args)
    res = meu(idg, tree, args.strategy, args.budget)
    out.emit(f"MEU {res.expected_utility:.12g}", f"meu value={_num(res.expected_utility)}")
    out.emit(f"decisions: {_assignment(pf, res.decisions)}", f"decisions {_assignment(pf, res.decisions)}")
    out.emit(_meter(res.meter))
    if args.oracle:
        truth = oracle_meu(idg)
        out.emit(f"oracle MEU {truth.expected_utility:.12g}", f"oracle value={_num(truth.expected_utility)}")
        ok = _close(res.expected_utility, truth.expected_utility)
        return _oracle_line(out, ok, f"abs_diff={abs(res.expected_utility - truth.expected_utility):.3g}")
    return EXIT_OK


def _bench_value(pf: ProblemFile, args, tree, strategy: str):
    """(comparable value, meter) for one level and strategy."""
    if pf.kind == "belief":
        bn = pf.belief_network()
        ev = parse_evidence(pf, args.evidence)
        if args.task == "mpe":
            r = mpe(bn, tree, strategy, ev, args.budget)
            return (None if r.impossible else r.probability), r.meter
        q = _variable(pf, args.query) if args.query else min(set(range(pf.n)) - set(ev), default=None)
        if q is None:
            raise UsageError("every variable is evidence; nothing to query")
        r = belief(bn, tree, strategy, q, ev, args.budget)
        return r.distribution, r.meter
    if pf.kind == "influence":
        r = meu(pf.influence_diagram(), tree, strategy, args.budget)
        return r.expected_utility, r.meter
    crit = _criterion(pf, args)
    if crit.components:
        r = optimize(pf.constraint_network(), crit, tree, strategy, args.budget)
        return (r.value if r.consistent else None), r.meter
    r = solve(pf.constraint_network(), tree, _csp_strategy(strategy), count=True, budget=args.budget)
    return float(r.count), r.meter


def _agree(a, b) -> bool:
    if a is None or b is None:
        return a is None and b is None
    return bool(np.all(np.abs(np.asarray(a) - np.asarray(b)) <= VALUE_TOL * np.maximum(1.0, np.abs(b))))


def _fmt_value(v) -> str:
    if v is None:
        return "none"
    if isinstance(v, np.ndarray):
        return ",".join(_num(x) for x in v)
    return _num(v)


def cmd_bench(pf: ProblemFile, args, out: Out) -> int:
    g = problem_graph(pf, args)
    dec = _decompose(pf, g, args)
    report = tradeoff_report(g, dec, args.budget)
    k = max(pf.card)
    strategies = [args.strategy.value] if args.strategy else list(STRATEGIES)
    head = (f"{'level':>5} {'s':>3} {'r':>3} {'c':>3} {'strategy':>8} {'pred (t, s)':>12} "
            f"{'persist':>8} {'scratch':>8} {'arity':>5} {'cells':>10} {'bound':>8} {'law':>4}")
    if not out.records:
        out.emit(head)
        out.emit("-" * len(head))
    reference, agree, law_ok = None, True, True
    for lvl, (s, tree) in zip(report.levels, dec.levels):
        bound = (len(tree.edges) + 1) * k ** s
        for strat in strategies:
            value, m = _bench_value(pf, args, tree, strat)
            if reference is None:
                reference = (value,)
            agree = agree and _agree(value, reference[0])
            if strat == "brute":
                pred, ok = (lvl.brute_time, lvl.brute_space), m.total_entries <= bound
            elif strat == "cutset":
                pred, ok = (lvl.cutset_time, lvl.cutset_space), m.scratch_arity <= 2
            else:
                pred, ok = None, None
            law_ok = law_ok and ok is not False
            law = "-" if ok is None else ("ok" if ok else "FAIL")
            ptxt = "-" if pred is None else f"({pred[0]}, {pred[1]})"
            out.emit(f"{'T' + str(lvl.index):>5} {s:>3} {lvl.r:>3} {lvl.c:>3} {strat:>8} {ptxt:>12} "
                     f"{m.max_persistent:>8} {m.scratch:>8} {m.scratch_arity:>5} {m.cells:>10} {bound:>8} "
                     f"{law:>4}",
                     f"bench level={lvl.index} s={s} r={lvl.r} c={lvl.c} strategy={strat} "
                     f"predicted_time={pred[0] if pred else '-'} predicted_space={pred[1] if pred else '-'} "
                     f"max_persistent={m.max_persistent} scratch={m.scratch} scratch_arity={m.scratch_arity} "
                     f"cells={m.cells} total_entries={m.total_entries} space_bound={bound} "
                     f"law={law} value={_fmt_value(value)}")
    verdict = "PASS" if agree else "FAIL"
    out.emit(f"cross-strategy agreement: {verdict}", f"agreement {verdict}")
    out.emit(f"space laws: {'PASS' if law_ok else 'FAIL'}", f"space_laws {'PASS' if law_ok else 'FAIL'}")
    code = EXIT_OK if agree and law_ok else EXIT_DISAGREE
    if args.oracle:
        truth = _bench_oracle(pf, args)
        ok = _agree(reference[0], truth)
        code = _oracle_line(out, ok, f"value={_fmt_value(truth)}") or code
    return code


def _bench_oracle(pf: ProblemFile, args):
    if pf.kind == "belief":
        bn = pf.belief_network()
        ev = parse_evidence(pf, args.evidence)
        if args.task == "mpe":
            x, p = oracle_mpe(bn, ev)
            return None if x is None else p
        q = _variable(pf, args.query) if args.query else min(set(range(pf.n)) - set(ev))
        return oracle_belief(bn, q, ev)
    if pf.kind == "influence":
        return oracle_meu(pf.influence_diagram()).expected_utility
    crit = _criterion(pf, args)
    cn = pf.constraint_network()
    if crit.components:
        t = oracle_opt(cn, crit)
        return t.value if t.consistent else None
    return float(oracle_csp(cn).count)


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("file", help="problem file")
    common.add_argument("--ordering", choices=("min-fill", "min-degree", "given"), default="min-fill",
                        help="elimination ordering heuristic used for triangulation")
    common.add_argument("--order", help="comma separated variable order for --ordering given")
    common.add_argument("--format", choices=("text", "records"), default="text")
    common.add_argument("--budget", type=int, default=CUTSET_BUDGET,
                        help="largest 2-core searched exactly for a minimum cycle cutset")

    query = _Parser(add_help=False)
    query.add_argument("--sep-bound", type=int, default=None,
                       help="separator bound of the join-tree level (default: primary tree)")
    query.add_argument("--strategy", type=Strategy.parse, default=Strategy.ELIMINATION,
                       metavar="{elim,brute,cutset}", help="per-cluster processing strategy")
    query.add_argument("--oracle", action="store_true", help="cross-check against full enumeration")

    p = _Parser(prog="treecut", description="Join-tree / cycle-cutset hybrid inference and tradeoff analysis.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("analyze", parents=[common], help="decompose and print the tradeoff report")
    a.add_argument("--criterion", help="criterion file whose scheme augments the graph")
    a.set_defaults(run=cmd_analyze)

    inf = sub.add_parser("infer", help="belief updating or MPE on a belief network")
    isub = inf.add_subparsers(dest="task", required=True, parser_class=_Parser)
    b = isub.add_parser("belief", parents=[common, query])
    b.add_argument("--query", required=True)
    b.add_argument("--evidence", help="A=0,B=1")
    b.set_defaults(run=cmd_belief)
    m = isub.add_parser("mpe", parents=[common, query])
    m.add_argument("--evidence", help="A=0,B=1")
    m.set_defaults(run=cmd_mpe)

    s = sub.add_parser("solve", parents=[common, query], help="constraint satisfaction")
    s.add_argument("--count", action="store_true", help="also count solutions")
    s.add_argument("--mode", choices=("separator", "full"), default="separator",
                   help="record separator relations only, or full cluster solution sets")
    s.set_defaults(run=cmd_solve)

    o = sub.add_parser("optimize", parents=[common, query], help="maximise a criterion over solutions")
    o.add_argument("--criterion", help="criterion file (defaults to crit blocks of the problem file)")
    o.set_defaults(run=cmd_optimize)

    u = sub.add_parser("meu", parents=[common, query], help="maximum expected utility")
    u.set_defaults(run=cmd_meu)

    bn = sub.add_parser("bench", parents=[common], help="meter every level and strategy")
    bn.add_argument("--strategy", type=Strategy.parse, default=None, metavar="{elim,brute,cutset}",
                    help="restrict to one strategy (default: all)")
    bn.add_argument("--task", choices=("belief", "mpe"), default="belief", help="query type for belief networks")
    bn.add_argument("--query")
    bn.add_argument("--evidence", help="A=0,B=1")
    bn.add_argument("--criterion", help="criterion file for optimisation benchmarks")
    bn.add_argument("--oracle", action="store_true")
    bn.set_defaults(run=cmd_bench)
    return p


def run(argv: list[str] | None = None) -> tuple[int, str, str]:
    """Run a command; returns (exit code, stdout text, stderr text)."""
    args = build_parser().parse_args(argv)
    out = Out(args.format == "records")
    try:
        pf = load(args.file)
        code = args.run(pf, args, out)
    except (ParseError, ModelError, DecompositionError, InferenceError, GraphError, UsageError,
            OracleBudgetExceeded) as exc:
        return EXIT_USAGE, str(out), f"error: {exc}\n"
    return code, str(out), ""


def main(argv: list[str] | None = None) -> int:
    code, stdout, stderr = run(argv)
    sys.stdout.write(stdout)
    sys.stderr.write(stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())

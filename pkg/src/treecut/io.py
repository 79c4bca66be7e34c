"""Line-oriented problem files.

Grammar (``#`` starts a comment, tokens are whitespace separated)::

    var <name> <k>
    decision <name> <k>
    cpt <child> [| <p1> <p2> ...]     one row of k_child probabilities per
                                      parent assignment, first parent slowest
    rel <v1> <v2> ...                 allowed tuples, one per line, then ``end``
    crit <v1> ...                     one real per tuple in lexicographic
                                      order, then ``end``

A file with ``decision`` lines is an influence diagram (``crit`` blocks form
the utility), a file with ``cpt`` blocks is a belief network, and anything
else is a constraint network whose ``crit`` blocks form a criterion.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from itertools import product
from pathlib import Path

import numpy as np

from .config import PROB_ATOL
from .graph import DirectedGraph
from .models import (BeliefNetwork, Constraint, ConstraintNetwork, CriterionFunction,
                     InfluenceDiagram, ModelError)
from .tables import Table

_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_.'\-]*$")
_KEYWORDS = {"var", "decision", "cpt", "rel", "crit", "end"}


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None, col: int | None = None, source: str = "<input>"):
        self.message, self.line, self.col, self.source = message, line, col, source
        where = source if line is None else f"{source}:{line}:{col or 1}"
        super().__init__(f"{where}: {message}")


@dataclass(frozen=True)
class Token:
    text: str
    line: int
    col: int


def _lines(text: str) -> list[list[Token]]:
    """Non-empty lines as token lists, comments stripped."""
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        toks = [Token(m.group(), lineno, m.start() + 1) for m in re.finditer(r"\S+", body)]
        if toks:
            out.append(toks)
    return out


@dataclass(frozen=True)
class ProblemFile:
    names: tuple[str, ...]
    card: tuple[int, ...]
    decisions: tuple[int, ...] = ()
    parents: dict[int, tuple[int, ...]] = field(default_factory=dict)
    cpts: dict[int, Table] = field(default_factory=dict)
    constraints: tuple[Constraint, ...] = ()
    criterion: CriterionFunction = field(default_factory=CriterionFunction)

    @property
    def kind(self) -> str:
        if self.decisions:
            return "influence"
        if self.cpts:
            return "belief"
        return "constraint"

    @property
    def n(self) -> int:
        return len(self.names)

    def dag(self) -> DirectedGraph:
        return DirectedGraph(self.n, [(p, c) for c, ps in sorted(self.parents.items()) for p in ps])

    def belief_network(self) -> BeliefNetwork:
        if self.kind != "belief":
            raise ModelError(f"expected a belief network file, got a {self.kind} file")
        return BeliefNetwork(self.names, self.card, self.dag(), tuple(self.cpts[v] for v in range(self.n)))

    def constraint_network(self) -> ConstraintNetwork:
        if self.kind != "constraint":
            raise ModelError(f"expected a constraint network file, got a {self.kind} file")
        return ConstraintNetwork(self.names, self.card, self.constraints)

    def influence_diagram(self) -> InfluenceDiagram:
        if self.kind != "influence":
            raise ModelError(f"expected an influence diagram file, got a {self.kind} file")
        return InfluenceDiagram(self.names, self.card, self.dag(), dict(self.cpts), self.decisions, self.criterion)

    def model(self):
        return {"belief": self.belief_network, "constraint": self.constraint_network,
                "influence": self.influence_diagram}[self.kind]()

    @classmethod
    def from_model(cls, model, criterion: CriterionFunction | None = None) -> ProblemFile:
        if isinstance(model, BeliefNetwork):
            return cls(model.names, model.card, (), {v: model.dag.parents(v) for v in range(model.n)},
                       dict(enumerate(model.cpts)), (), criterion or CriterionFunction())
        if isinstance(model, InfluenceDiagram):
            return cls(model.names, model.card, model.decisions,
                       {v: model.dag.parents(v) for v in model.chance}, dict(model.cpts), (), model.utility)
        if isinstance(model, ConstraintNetwork):
            return cls(model.names, model.card, (), {}, {}, model.constraints, criterion or CriterionFunction())
        raise TypeError(f"cannot serialise {type(model).__name__}")


class _Parser:
    def __init__(self, text: str, source: str, names=(), card=()):
        self.lines = _lines(text)
        self.source = source
        self.pos = 0
        self.names: list[str] = list(names)
        self.card: list[int] = list(card)
        self.index = {nm: i for i, nm in enumerate(self.names)}
        self.decisions: list[int] = []
        self.parents: dict[int, tuple[int, ...]] = {}
        self.cpts: dict[int, Table] = {}
        self.cpt_at: dict[int, Token] = {}
        self.constraints: list[Constraint] = []
        self.rel_at: Token | None = None
        self.crit: list[Table] = []

    def error(self, msg: str, tok: Token | None) -> ParseError:
        return ParseError(msg, tok.line if tok else None, tok.col if tok else None, self.source)

    def next_line(self, opener: Token) -> list[Token]:
        if self.pos >= len(self.lines):
            raise self.error(f"unexpected end of file in block opened by '{opener.text}'", opener)
        line = self.lines[self.pos]
        self.pos += 1
        return line

    def lookup(self, tok: Token) -> int:
        if tok.text not in self.index:
            raise self.error(f"undeclared variable {tok.text!r}", tok)
        return self.index[tok.text]

    def scope(self, toks: list[Token], head: Token) -> tuple[int, ...]:
        if not toks:
            raise self.error(f"'{head.text}' needs at least one variable", head)
        scope = tuple(self.lookup(t) for t in toks)
        if len(set(scope)) != len(scope):
            raise self.error("repeated variable in scope", head)
        return scope

    def integer(self, tok: Token, lo: int, hi: int | None = None) -> int:
        try:
            v = int(tok.text)
        except ValueError:
            raise self.error(f"expected an integer, got {tok.text!r}", tok) from None
        if v < lo or (hi is not None and v >= hi):
            rng = f"[{lo}, {hi - 1}]" if hi is not None else f">= {lo}"
            raise self.error(f"value {v} out of range {rng}", tok)
        return v

    def real(self, tok: Token) -> float:
        try:
            v = float(tok.text)
        except ValueError:
            raise self.error(f"expected a number, got {tok.text!r}", tok) from None
        if not math.isfinite(v):
            raise self.error(f"non-finite value {tok.text!r}", tok)
        return v

    def run(self) -> None:
        while self.pos < len(self.lines):
            line = self.lines[self.pos]
            self.pos += 1
            head, args = line[0], line[1:]
            handler = getattr(self, f"_kw_{head.text}", None)
            if handler is None or head.text == "end":
                raise self.error(f"unknown statement {head.text!r}", head)
            handler(head, args)

    def _declare(self, head: Token, args: list[Token]) -> int:
        if len(args) != 2:
            raise self.error(f"usage: {head.text} <name> <k>", head)
        name, k = args
        if not _NAME.match(name.text) or name.text in _KEYWORDS:
            raise self.error(f"invalid variable name {name.text!r}", name)
        if name.text in self.index:
            raise self.error(f"variable {name.text!r} declared twice", name)
        self.index[name.text] = len(self.names)
        self.names.append(name.text)
        self.card.append(self.integer(k, 1))
        return self.index[name.text]

    def _kw_var(self, head, args):
        self._declare(head, args)

    def _kw_decision(self, head, args):
        self.decisions.append(self._declare(head, args))

    def _kw_cpt(self, head, args):
        if not args:
            raise self.error("usage: cpt <child> [| <parents>]", head)
        child = self.lookup(args[0])
        if child in self.cpts:
            raise self.error(f"second cpt for {args[0].text!r}", args[0])
        if child in self.decisions:
            raise self.error(f"decision {args[0].text!r} cannot have a cpt", args[0])
        rest = args[1:]
        if rest and rest[0].text != "|":
            raise self.error("expected '|' before parent list", rest[0])
        if rest and len(rest) == 1:
            raise self.error("'|' must be followed by parents", rest[0])
        parents = self.scope(rest[1:], head) if rest else ()
        if child in parents:
            raise self.error("variable cannot be its own parent", head)
        k = self.card[child]
        pcard = [self.card[p] for p in parents]
        rows = []
        for pa in product(*(range(c) for c in pcard)):
            row = self.next_line(head)
            if len(row) != k:
                raise self.error(f"cpt {self.names[child]}: row needs {k} probabilities, got {len(row)}", row[0])
            vals = [self.real(t) for t in row]
            if any(v < 0 for v in vals):
                raise self.error(f"cpt {self.names[child]}: negative probability", row[0])
            total = math.fsum(vals)
            if abs(total - 1.0) > PROB_ATOL:
                where = ", ".join(f"{self.names[p]}={x}" for p, x in zip(parents, pa)) or "no parents"
                raise self.error(f"cpt {self.names[child]}: row for ({where}) sums to {total:.12g}, expected 1",
                                 row[0])
            rows.append(vals)
        table = Table.from_flat((*parents, child), (*pcard, k), np.asarray(rows, dtype=float).ravel())
        order = (*sorted(parents), child)
        self.parents[child] = tuple(sorted(parents))
        self.cpts[child] = table.transpose(order)
        self.cpt_at[child] = head

    def _kw_rel(self, head, args):
        scope = self.scope(args, head)
        tuples = set()
        while True:
            row = self.next_line(head)
            if row[0].text == "end":
                if len(row) > 1:
                    raise self.error("unexpected tokens after 'end'", row[1])
                break
            if len(row) != len(scope):
                raise self.error(f"tuple needs {len(scope)} values, got {len(row)}", row[0])
            tuples.add(tuple(self.integer(t, 0, self.card[v]) for t, v in zip(row, scope)))
        self.constraints.append(Constraint(scope, frozenset(tuples)))
        self.rel_at = self.rel_at or head

    def _kw_crit(self, head, args):
        scope = self.scope(args, head)
        shape = tuple(self.card[v] for v in scope)
        need = int(np.prod(shape, dtype=np.int64))
        vals = []
        while True:
            row = self.next_line(head)
            if row[0].text == "end":
                if len(row) > 1:
                    raise self.error("unexpected tokens after 'end'", row[1])
                break
            if "end" in (t.text for t in row):
                raise self.error("'end' must be on its own line", row[0])
            vals.extend(self.real(t) for t in row)
            if len(vals) > need:
                raise self.error(f"crit block needs {need} values, got more", row[0])
        if len(vals) != need:
            raise self.error(f"crit block needs {need} values, got {len(vals)}", head)
        self.crit.append(Table.from_flat(scope, shape, np.asarray(vals, dtype=float)))

    def finish(self) -> ProblemFile:
        if self.cpts and self.constraints:
            raise self.error("a file cannot mix cpt and rel blocks", self.rel_at)
        if self.decisions and self.constraints:
            raise self.error("rel blocks are not allowed in an influence diagram", self.rel_at)
        if self.cpts or self.decisions:
            missing = [self.names[v] for v in range(len(self.names))
                       if v not in self.decisions and v not in self.cpts]
            if missing:
                raise ParseError(f"variables without a cpt: {', '.join(missing)}", source=self.source)
        pf = ProblemFile(tuple(self.names), tuple(self.card), tuple(self.decisions), dict(sorted(self.parents.items())),
                         dict(sorted(self.cpts.items())), tuple(self.constraints), CriterionFunction(tuple(self.crit)))
        try:
            pf.model()
        except (ModelError, ValueError) as exc:
            raise ParseError(str(exc), source=self.source) from exc
        return pf


def parse(text: str, source: str = "<input>") -> ProblemFile:
    p = _Parser(text, source)
    p.run()
    return p.finish()


def load(path: str | Path) -> ProblemFile:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read file: {exc.strerror}", source=str(path)) from exc
    return parse(text, str(path))


def parse_criterion(text: str, names, card, source: str = "<criterion>") -> CriterionFunction:
    """``crit`` blocks over already known variables. ``var`` lines are
    allowed when they repeat an existing declaration exactly."""
    p = _Parser(text, source, names, card)
    known = len(p.names)
    for line in p.lines:
        if line[0].text == "var" and len(line) == 3 and line[1].text in p.index:
            i = p.index[line[1].text]
            if line[2].text != str(card[i]):
                raise p.error(f"domain of {line[1].text!r} disagrees with the problem file", line[2])
    p.lines = [ln for ln in p.lines if not (ln[0].text == "var" and len(ln) == 3 and ln[1].text in p.index)]
    p.run()
    if len(p.names) != known or p.cpts or p.constraints or p.decisions:
        raise ParseError("criterion file may only contain crit blocks", source=source)
    return CriterionFunction(tuple(p.crit))


def _num(x: float) -> str:
    return repr(float(x))


def serialize(pf: ProblemFile) -> str:
    """Canonical text: declarations in variable order, then cpts by child,
    relations with sorted tuples, then criterion blocks."""
    out = []
    for v, (name, k) in enumerate(zip(pf.names, pf.card)):
        out.append(f"{'decision' if v in pf.decisions else 'var'} {name} {k}")
    for child, t in sorted(pf.cpts.items()):
        parents = t.scope[:-1]
        head = f"cpt {pf.names[child]}"
        if parents:
            head += " | " + " ".join(pf.names[p] for p in parents)
        out.append(head)
        for row in t.values.reshape(-1, pf.card[child]):
            out.append(" ".join(_num(x) for x in row))
    for c in pf.constraints:
        out.append("rel " + " ".join(pf.names[v] for v in c.scope))
        out.extend(" ".join(map(str, tup)) for tup in sorted(c.allowed))
        out.append("end")
    for t in pf.criterion.components:
        out.append("crit " + " ".join(pf.names[v] for v in t.scope))
        out.extend(_num(x) for x in t.values.ravel())
        out.append("end")
    return "\n".join(out) + "\n"


def dump(pf: ProblemFile, path: str | Path) -> None:
    Path(path).write_text(serialize(pf))


__all__ = ["ParseError", "ProblemFile", "dump", "load", "parse", "parse_criterion", "serialize"]

"""Per-cluster processing strategies.

Each strategy computes, for a bag of factors, the table over a set of
output variables obtained by combining every factor and eliminating all
other variables. Output variables are treated as constants: the work is
repeated once per output assignment, so scratch space never includes them.

* elimination: variable elimination with recorded intermediate tables
* brute: enumerate every assignment, one running cell of scratch
* cutset: condition on a cycle cutset, eliminate the residual forest
"""
from __future__ import annotations

import enum
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from itertools import product

import numpy as np

from .decomposition import DEFAULT_CUTSET_BUDGET, cycle_cutset
from .graph import CycleError, UndirectedGraph, find_cycle
from .tables import Semiring, Table, restrict, union_scope


class Strategy(str, enum.Enum):
    ELIMINATION = "elim"
    BRUTE = "brute"
    CUTSET = "cutset"

    @classmethod
    def parse(cls, value: str | Strategy) -> Strategy:
        if isinstance(value, Strategy):
            return value
        aliases = {"elimination": "elim", "brute-force": "brute", "bruteforce": "brute",
                   "backtracking": "brute", "conditioning": "cutset"}
        return cls(aliases.get(value, value))


@dataclass
class CostMeter:
    """Table-size and work counters for one query.

    ``persistent`` tracks separator messages held at once, ``scratch`` the
    largest intra-cluster temporary (in entries) and ``scratch_arity`` its
    arity. ``record_arity`` is the largest table kept after a summation or
    maximisation step inside a cluster. ``cells`` counts every table cell
    touched or assignment visited.
    """

    persistent: int = 0
    max_persistent: int = 0
    scratch: int = 0
    scratch_arity: int = 0
    record_arity: int = 0
    cells: int = 0
    output: int = 0

    def hold(self, entries: int) -> None:
        self.persistent += entries
        self.max_persistent = max(self.max_persistent, self.persistent)

    def release(self, entries: int) -> None:
        self.persistent -= entries

    def temp(self, entries: int, arity: int) -> None:
        self.scratch = max(self.scratch, entries)
        self.scratch_arity = max(self.scratch_arity, arity)

    def reset(self) -> None:
        self.__init__()

    @property
    def total_entries(self) -> int:
        return self.max_persistent + self.scratch

    def as_dict(self) -> dict[str, int]:
        return {"max_persistent": self.max_persistent, "scratch": self.scratch,
                "scratch_arity": self.scratch_arity, "record_arity": self.record_arity, "cells": self.cells, "output": self.output}


def _null_meter(meter: CostMeter | None) -> CostMeter:
    return meter if meter is not None else CostMeter()


def function_graph(factors: Sequence[Table], exclude=()) -> UndirectedGraph:
    """Interaction graph of the factors' scopes minus ``exclude``."""
    exclude = set(exclude)
    verts = set()
    edges = set()
    for f in factors:
        vs = sorted(v for v in f.scope if v not in exclude)
        verts.update(vs)
        for i, a in enumerate(vs):
            for b in vs[i + 1:]:
                edges.add((a, b))
    return UndirectedGraph(verts, edges)


def _min_fill_order(factors: Sequence[Table]) -> list[int]:
    from .decomposition import find_ordering
    return list(find_ordering(function_graph(factors), "min-fill"))


def _combine_bucket(bucket: Sequence[Table], semiring: Semiring) -> Table:
    scope, card = union_scope(bucket)
    out = np.full(tuple(card[v] for v in scope), semiring.one)
    for t in bucket:
        order = sorted(range(t.arity), key=lambda i: scope.index(t.scope[i]))
        vals = np.transpose(t.values, order)
        present = {t.scope[i] for i in order}
        it = iter(vals.shape)
        out = semiring.combine(out, vals.reshape([next(it) if v in present else 1 for v in scope]))
    return Table(scope, out)


def _scalar_combine(factors: Sequence[Table], semiring: Semiring) -> float:
    val = semiring.one
    for f in factors:
        val = semiring.combine(val, f.scalar())
    return float(val)


def _eliminate(factors: list[Table], order: Sequence[int], semiring: Semiring, meter: CostMeter,
               trace: list | None = None) -> float:
    """Eliminate every variable of ``factors`` along ``order``; returns the
    final scalar. ``trace`` collects ``(var, bucket_table)`` for decoding."""
    pool = list(factors)
    for v in order:
        bucket = [f for f in pool if v in f.scope]
        if not bucket:
            continue
        pool = [f for f in pool if v not in f.scope]
        joint = _combine_bucket(bucket, semiring)
        meter.temp(joint.size, joint.arity)
        meter.cells += joint.size
        axis = joint.scope.index(v)
        reduced = Table(joint.scope[:axis] + joint.scope[axis + 1:], semiring.reduce(joint.values, axis=axis))
        meter.record_arity = max(meter.record_arity, reduced.arity)
        if trace is not None:
            trace.append((v, joint))
        pool.append(reduced)
    return _scalar_combine(pool, semiring)


def _decode_trace(trace: list, assignment: dict[int, int]) -> None:
    for v, joint in reversed(trace):
        idx = tuple(slice(None) if u == v else assignment[u] for u in joint.scope)
        assignment[v] = int(np.argmax(joint.values[idx]))


def _out_cells(out_scope: Sequence[int], card: Mapping[int, int]):
    return product(*(range(card[v]) for v in out_scope))


def _card_of(factors: Sequence[Table], extra: Mapping[int, int] | None = None) -> dict[int, int]:
    card = dict(extra or {})
    for f in factors:
        card.update(f.card())
    return card


# ---------------------------------------------------------------- elimination

def elimination_message(factors: Sequence[Table], out_vars, semiring: Semiring,
                        meter: CostMeter | None = None, order: Sequence[int] | None = None,
                        card: Mapping[int, int] | None = None) -> Table:
    meter = _null_meter(meter)
    card = _card_of(factors, card)
    out_scope = tuple(sorted(out_vars))
    result = np.empty(tuple(card[v] for v in out_scope))
    for cell in _out_cells(out_scope, card):
        fixed = dict(zip(out_scope, cell))
        fs = [restrict(f, fixed) for f in factors]
        elim = [v for v in (order if order is not None else _min_fill_order(fs))
                if v not in fixed]
        result[cell] = _eliminate(fs, elim, semiring, meter)
    return Table(out_scope, result)


def elimination_argmax(factors: Sequence[Table], semiring: Semiring,
                       meter: CostMeter | None = None) -> tuple[dict[int, int], float]:
    meter = _null_meter(meter)
    trace: list = []
    value = _eliminate(list(factors), _min_fill_order(factors), semiring, meter, trace)
    assignment: dict[int, int] = {}
    _decode_trace(trace, assignment)
    return assignment, value


# ---------------------------------------------------------------- brute force

def _bruteforce_scan(factors: Sequence[Table], variables: Sequence[int], card: Mapping[int, int],
                     semiring: Semiring, meter: CostMeter, want_argmax: bool):
    """Visit every assignment of ``variables`` in lexicographic order,
    accumulating into a single running cell."""
    pos = {v: i for i, v in enumerate(variables)}
    lookups = [(f.values, [pos[v] for v in f.scope]) for f in factors]
    combine = semiring.combine
    one = semiring.one
    maximizing = semiring.maximizing
    meter.temp(1, 0)
    acc = semiring.zero
    best = None
    visits = 0
    for x in product(*(range(card[v]) for v in variables)):
        visits += 1
        val = one
        for vals, idx in lookups:
            val = combine(val, vals[tuple(x[i] for i in idx)])
        if maximizing:
            if best is None or val > acc:
                acc, best = val, x
        else:
            acc += val
    meter.cells += visits
    if want_argmax:
        return float(acc), dict(zip(variables, best or ()))
    return float(acc)


def bruteforce_message(factors: Sequence[Table], out_vars, semiring: Semiring,
                       meter: CostMeter | None = None, card: Mapping[int, int] | None = None) -> Table:
    meter = _null_meter(meter)
    card = _card_of(factors, card)
    out_scope = tuple(sorted(out_vars))
    _, fcard = union_scope(factors) if factors else ((), {})
    elim = sorted(v for v in fcard if v not in out_vars)
    result = np.empty(tuple(card[v] for v in out_scope))
    for cell in _out_cells(out_scope, card):
        fixed = dict(zip(out_scope, cell))
        fs = [restrict(f, fixed) for f in factors]
        result[cell] = _bruteforce_scan(fs, elim, card, semiring, meter, False)
    return Table(out_scope, result)


def bruteforce_argmax(factors: Sequence[Table], semiring: Semiring,
                      meter: CostMeter | None = None) -> tuple[dict[int, int], float]:
    meter = _null_meter(meter)
    _, card = union_scope(factors) if factors else ((), {})
    value, assignment = _bruteforce_scan(factors, sorted(card), card, semiring, meter, True)
    return assignment, value


# ---------------------------------------------------------------- conditioning

def forest_eliminate(factors: Sequence[Table], semiring: Semiring, meter: CostMeter,
                     trace: list | None = None) -> float:
    """Eliminate a forest-structured bag of factors leaf by leaf.

    Raises :class:`CycleError` if the factors' interaction graph has a cycle.
    Each step combines factors over at most two variables.
    """
    g = function_graph(factors)
    cycle = find_cycle(g)
    if cycle is not None:
        raise CycleError(f"residual problem is not a forest (cycle {cycle})", cycle)
    adj = {v: set(g.neighbors(v)) for v in g.vertices}
    order = []
    leaves = sorted(v for v in adj if len(adj[v]) <= 1)
    while leaves:
        v = leaves.pop(0)
        order.append(v)
        for u in adj.pop(v):
            adj[u].discard(v)
            if len(adj[u]) <= 1 and u not in leaves:
                leaves.append(u)
                leaves.sort()
    return _eliminate(list(factors), order, semiring, meter, trace)


def choose_cutset(factors: Sequence[Table], out_vars=(), budget: int = DEFAULT_CUTSET_BUDGET) -> tuple[int, ...]:
    """Minimum cycle cutset of the factors' interaction graph once the output
    variables are fixed (greedy beyond ``budget``)."""
    return tuple(sorted(cycle_cutset(function_graph(factors, exclude=out_vars), "exact", budget).vertices))


def _validate_cutset(factors: Sequence[Table], conditioned) -> None:
    g = function_graph(factors, exclude=conditioned)
    cycle = find_cycle(g)
    if cycle is not None:
        raise CycleError(f"conditioning on {sorted(conditioned)} leaves cycle {cycle}", cycle)


def cutset_message(factors: Sequence[Table], out_vars, semiring: Semiring, meter: CostMeter | None = None,
                   cutset: Sequence[int] | None = None, card: Mapping[int, int] | None = None,
                   budget: int = DEFAULT_CUTSET_BUDGET) -> Table:
    meter = _null_meter(meter)
    card = _card_of(factors, card)
    out_scope = tuple(sorted(out_vars))
    if cutset is None:
        cutset = choose_cutset(factors, out_scope, budget)
    cutset = tuple(sorted(v for v in cutset if v not in out_vars))
    _validate_cutset(factors, set(out_scope) | set(cutset))
    result = np.empty(tuple(card[v] for v in out_scope))
    for cell in _out_cells(out_scope, card):
        fixed = dict(zip(out_scope, cell))
        base = [restrict(f, fixed) for f in factors]
        acc = semiring.zero
        for cvals in product(*(range(card[v]) for v in cutset)):
            fs = [restrict(f, dict(zip(cutset, cvals))) for f in base]
            val = forest_eliminate(fs, semiring, meter)
            acc = semiring.reduce([acc, val])
        result[cell] = acc
    return Table(out_scope, result)


def cutset_argmax(factors: Sequence[Table], semiring: Semiring, meter: CostMeter | None = None,
                  cutset: Sequence[int] | None = None,
                  budget: int = DEFAULT_CUTSET_BUDGET) -> tuple[dict[int, int], float]:
    meter = _null_meter(meter)
    card = _card_of(factors)
    if cutset is None:
        cutset = choose_cutset(factors, (), budget)
    cutset = tuple(sorted(cutset))
    _validate_cutset(factors, cutset)
    best_val, best_c = None, None
    for cvals in product(*(range(card[v]) for v in cutset)):
        fs = [restrict(f, dict(zip(cutset, cvals))) for f in factors]
        val = forest_eliminate(fs, semiring, meter)
        if best_val is None or val > best_val:
            best_val, best_c = val, cvals
    fixed = dict(zip(cutset, best_c))
    trace: list = []
    forest_eliminate([restrict(f, fixed) for f in factors], semiring, meter, trace)
    assignment = dict(fixed)
    _decode_trace(trace, assignment)
    return assignment, float(best_val)


# ---------------------------------------------------------------- dispatch

def cluster_message(strategy: Strategy | str, factors: Sequence[Table], out_vars, semiring: Semiring,
                    meter: CostMeter | None = None, card: Mapping[int, int] | None = None,
                    budget: int = DEFAULT_CUTSET_BUDGET) -> Table:
    strategy = Strategy.parse(strategy)
    if strategy is Strategy.ELIMINATION:
        return elimination_message(factors, out_vars, semiring, meter, card=card)
    if strategy is Strategy.BRUTE:
        return bruteforce_message(factors, out_vars, semiring, meter, card=card)
    return cutset_message(factors, out_vars, semiring, meter, card=card, budget=budget)


def cluster_argmax(strategy: Strategy | str, factors: Sequence[Table], semiring: Semiring,
                   meter: CostMeter | None = None,
                   budget: int = DEFAULT_CUTSET_BUDGET) -> tuple[dict[int, int], float]:
    strategy = Strategy.parse(strategy)
    if strategy is Strategy.ELIMINATION:
        return elimination_argmax(factors, semiring, meter)
    if strategy is Strategy.BRUTE:
        return bruteforce_argmax(factors, semiring, meter)
    return cutset_argmax(factors, semiring, meter, budget=budget)

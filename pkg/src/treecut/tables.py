"""Dense tables over discrete variables and the semirings that combine them.

A :class:`Table` maps assignments of an ordered scope to numbers. Values are
stored as a numpy array whose axes follow the scope, so the flat layout is
mixed-radix with the last scope variable varying fastest.
"""
from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from typing import Callable

import numpy as np


class TableError(ValueError):
    pass


class Table:
    __slots__ = ("scope", "values")

    def __init__(self, scope: Iterable[int], values):
        scope = tuple(int(v) for v in scope)
        if len(set(scope)) != len(scope):
            raise TableError(f"repeated variable in scope {scope}")
        values = np.asarray(values, dtype=float)
        if values.ndim != len(scope):
            raise TableError(f"values have {values.ndim} axes but scope has {len(scope)} variables")
        self.scope = scope
        self.values = values

    @classmethod
    def from_flat(cls, scope: Iterable[int], card: Iterable[int], flat) -> Table:
        card = tuple(card)
        flat = np.asarray(flat, dtype=float)
        if flat.size != int(np.prod(card, dtype=np.int64)):
            raise TableError(f"expected {int(np.prod(card))} values, got {flat.size}")
        return cls(scope, flat.reshape(card))

    @classmethod
    def constant(cls, value: float = 1.0) -> Table:
        return cls((), np.asarray(value, dtype=float))

    @classmethod
    def ones(cls, scope: Iterable[int], card: Mapping[int, int]) -> Table:
        scope = tuple(scope)
        return cls(scope, np.ones(tuple(card[v] for v in scope)))

    @property
    def shape(self) -> tuple[int, ...]:
        return self.values.shape

    @property
    def size(self) -> int:
        return int(self.values.size)

    @property
    def arity(self) -> int:
        return len(self.scope)

    def card(self) -> dict[int, int]:
        return dict(zip(self.scope, self.values.shape))

    def scalar(self) -> float:
        if self.scope:
            raise TableError("table is not a scalar")
        return float(self.values)

    def __call__(self, assignment: Mapping[int, int]) -> float:
        return float(self.values[tuple(assignment[v] for v in self.scope)])

    def transpose(self, scope: Iterable[int]) -> Table:
        scope = tuple(scope)
        if set(scope) != set(self.scope) or len(scope) != len(self.scope):
            raise TableError(f"{scope} is not a permutation of {self.scope}")
        axes = [self.scope.index(v) for v in scope]
        return Table(scope, np.transpose(self.values, axes))

    def allclose(self, other: Table, atol: float = 1e-12) -> bool:
        if set(self.scope) != set(other.scope):
            return False
        other = other.transpose(self.scope)
        return self.shape == other.shape and bool(np.allclose(self.values, other.values, rtol=0, atol=atol))

    def __repr__(self):
        return f"Table(scope={self.scope}, values={self.values.tolist()})"


def _aligned(t: Table, scope: tuple[int, ...]) -> np.ndarray:
    """View ``t.values`` broadcastable against ``scope`` (a superset)."""
    order = sorted(range(t.arity), key=lambda i: scope.index(t.scope[i]))
    vals = np.transpose(t.values, order) if order != list(range(t.arity)) else t.values
    present = {t.scope[i] for i in order}
    shape = []
    it = iter(vals.shape)
    for v in scope:
        shape.append(next(it) if v in present else 1)
    return vals.reshape(shape)


def union_scope(tables: Iterable[Table]) -> tuple[tuple[int, ...], dict[int, int]]:
    scope: list[int] = []
    card: dict[int, int] = {}
    for t in tables:
        for v, k in zip(t.scope, t.values.shape):
            if v in card:
                if card[v] != k:
                    raise TableError(f"domain size mismatch on variable {v}: {card[v]} vs {k}")
            else:
                card[v] = k
                scope.append(v)
    return tuple(scope), card


def combine(tables: Iterable[Table], op: Callable = np.multiply, identity: float = 1.0) -> Table:
    tables = list(tables)
    scope, card = union_scope(tables)
    out = np.full(tuple(card[v] for v in scope), identity)
    for t in tables:
        out = op(out, _aligned(t, scope))
    return Table(scope, out)


def multiply(t1: Table, t2: Table) -> Table:
    return combine((t1, t2), np.multiply, 1.0)


def _reduce(t: Table, variables: Iterable[int], reducer: Callable) -> Table:
    variables = set(variables)
    unknown = variables - set(t.scope)
    if unknown:
        raise TableError(f"variables {sorted(unknown)} not in scope {t.scope}")
    axes = tuple(i for i, v in enumerate(t.scope) if v in variables)
    keep = tuple(v for v in t.scope if v not in variables)
    if not axes:
        return Table(keep, t.values.copy())
    return Table(keep, reducer(t.values, axis=axes))


def sum_out(t: Table, variables: Iterable[int]) -> Table:
    return _reduce(t, variables, np.sum)


def max_out(t: Table, variables: Iterable[int]) -> tuple[Table, dict[tuple[int, ...], dict[int, int]]]:
    """Maximise over ``variables``.

    Returns the reduced table and a witness mapping each surviving cell (as an
    index tuple over the reduced scope) to the maximising assignment of the
    eliminated variables. Ties go to the lexicographically smallest witness
    in scope order.
    """
    variables = [v for v in t.scope if v in set(variables)]
    unknown = set(variables) - set(t.scope)
    if unknown:
        raise TableError(f"variables {sorted(unknown)} not in scope {t.scope}")
    keep = [v for v in t.scope if v not in variables]
    moved = t.transpose(keep + variables)
    nk = int(np.prod(moved.shape[: len(keep)], dtype=np.int64))
    flat = moved.values.reshape(nk, -1)
    best = np.argmax(flat, axis=1)  # first maximum = lexicographic tie-break
    out = Table(keep, flat[np.arange(nk), best].reshape(moved.shape[: len(keep)]))
    elim_shape = moved.shape[len(keep):]
    witness = {}
    for cell, b in zip(np.ndindex(*moved.shape[: len(keep)]), best):
        values = np.unravel_index(int(b), elim_shape) if elim_shape else ()
        witness[cell] = {v: int(x) for v, x in zip(variables, values)}
    return out, witness


def restrict(t: Table, evidence: Mapping[int, int]) -> Table:
    """Fix evidence variables and drop them from the scope."""
    index = []
    keep = []
    for v, k in zip(t.scope, t.values.shape):
        if v in evidence:
            x = evidence[v]
            if not 0 <= x < k:
                raise TableError(f"value {x} out of domain for variable {v} (size {k})")
            index.append(x)
        else:
            index.append(slice(None))
            keep.append(v)
    return Table(keep, t.values[tuple(index)])


@dataclass(frozen=True)
class Semiring:
    """Combination/elimination pair for message passing.

    ``combine`` joins factors (product or sum), ``reduce`` eliminates a
    variable (sum or max). ``zero`` is the value that loses every reduction.
    """

    name: str
    combine: Callable
    one: float
    reduce: Callable
    zero: float

    @property
    def maximizing(self) -> bool:
        return self.reduce is np.max


SUM_PRODUCT = Semiring("sum-product", np.multiply, 1.0, np.sum, 0.0)
MAX_PRODUCT = Semiring("max-product", np.multiply, 1.0, np.max, 0.0)
MAX_SUM = Semiring("max-sum", np.add, 0.0, np.max, -np.inf)

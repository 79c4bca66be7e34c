"""Problem representations: belief networks, constraint networks, additive
criterion functions and influence diagrams with root decisions."""
from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .config import PROB_ATOL
from .graph import DirectedGraph, UndirectedGraph, augment, moralize, primal_graph
from .tables import Table


class ModelError(ValueError):
    pass


def _check_names(names: Sequence[str], card: Sequence[int]) -> None:
    if len(names) != len(card):
        raise ModelError("names and domain sizes differ in length")
    if len(set(names)) != len(names):
        raise ModelError("variable names must be unique")
    for name, k in zip(names, card):
        if not name:
            raise ModelError("variable names must be nonempty")
        if k < 1:
            raise ModelError(f"variable {name} has empty domain")


def check_assignment(card: Sequence[int], x: Mapping[int, int] | Sequence[int], full: bool = True) -> dict[int, int]:
    """Validate an assignment against domain sizes, returning it as a dict."""
    if not isinstance(x, Mapping):
        x = dict(enumerate(x))
    out = {}
    for v, val in x.items():
        if not 0 <= v < len(card):
            raise ModelError(f"unknown variable id {v}")
        if not 0 <= int(val) < card[v]:
            raise ModelError(f"value {val} out of domain for variable {v} (size {card[v]})")
        out[int(v)] = int(val)
    if full and len(out) != len(card):
        raise ModelError("assignment does not cover every variable")
    return out


class _Named:
    names: tuple[str, ...]
    card: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.card)

    def var(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise ModelError(f"unknown variable {name!r}") from None

    def name_of(self, assignment: Mapping[int, int]) -> dict[str, int]:
        return {self.names[v]: x for v, x in sorted(assignment.items())}


def _check_cpt(child: int, names, card, dag: DirectedGraph, cpt: Table, atol: float) -> None:
    expected = (*dag.parents(child), child)
    if cpt.scope != expected:
        raise ModelError(f"CPT for {names[child]} has scope {cpt.scope}, expected family {expected}")
    if cpt.shape != tuple(card[v] for v in expected):
        raise ModelError(f"CPT for {names[child]} has shape {cpt.shape}")
    vals = cpt.values
    if not np.all(np.isfinite(vals)) or np.any(vals < 0):
        raise ModelError(f"CPT for {names[child]} has negative or non-finite entries")
    sums = vals.sum(axis=-1)
    for idx in np.ndindex(*sums.shape):
        if abs(sums[idx] - 1.0) > atol:
            parents = dag.parents(child)
            where = ", ".join(f"{names[p]}={i}" for p, i in zip(parents, idx)) or "no parents"
            raise ModelError(f"CPT for {names[child]} does not sum to 1 at ({where}): sum={sums[idx]:.12g}")


@dataclass(frozen=True)
class BeliefNetwork(_Named):
    """A DAG plus one CPT per variable.

    Each CPT has scope ``(*parents, child)`` so a row is the child's
    distribution for one parent assignment, parents in lexicographic order.
    """

    names: tuple[str, ...]
    card: tuple[int, ...]
    dag: DirectedGraph
    cpts: tuple[Table, ...]
    atol: float = PROB_ATOL

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "card", tuple(int(k) for k in self.card))
        object.__setattr__(self, "cpts", tuple(self.cpts))
        _check_names(self.names, self.card)
        if self.dag.n != len(self.card):
            raise ModelError("dag size does not match variable count")
        cycle = self.dag.find_cycle()
        if cycle is not None:
            raise ModelError(f"belief network graph has a directed cycle: {[self.names[v] for v in cycle]}")
        if len(self.cpts) != self.n:
            raise ModelError("need exactly one CPT per variable")
        for v, cpt in enumerate(self.cpts):
            _check_cpt(v, self.names, self.card, self.dag, cpt, self.atol)

    @classmethod
    def from_parents(cls, names, card, parents: Mapping[int, Iterable[int]], rows: Mapping[int, Sequence]) -> BeliefNetwork:
        """Build from parent lists and CPT rows (one row per parent assignment)."""
        n = len(card)
        edges = [(p, c) for c in range(n) for p in parents.get(c, ())]
        dag = DirectedGraph(n, edges)
        cpts = []
        for c in range(n):
            scope = (*dag.parents(c), c)
            cpts.append(Table.from_flat(scope, [card[v] for v in scope], np.ravel(rows[c])))
        return cls(tuple(names), tuple(card), dag, tuple(cpts))

    def factors(self) -> list[Table]:
        return list(self.cpts)

    def moral_graph(self) -> UndirectedGraph:
        return moralize(self.dag)


def joint_probability(bn: BeliefNetwork, x: Mapping[int, int] | Sequence[int]) -> float:
    x = check_assignment(bn.card, x)
    p = 1.0
    for cpt in bn.cpts:
        p *= cpt(x)
    return p


@dataclass(frozen=True)
class Constraint:
    scope: tuple[int, ...]
    allowed: frozenset[tuple[int, ...]]

    def __post_init__(self):
        object.__setattr__(self, "scope", tuple(self.scope))
        object.__setattr__(self, "allowed", frozenset(tuple(int(x) for x in t) for t in self.allowed))
        if len(set(self.scope)) != len(self.scope) or not self.scope:
            raise ModelError(f"bad constraint scope {self.scope}")
        for t in self.allowed:
            if len(t) != len(self.scope):
                raise ModelError(f"tuple {t} does not match scope arity {len(self.scope)}")

    def allows(self, x: Mapping[int, int]) -> bool:
        return tuple(x[v] for v in self.scope) in self.allowed

    def to_table(self, card: Sequence[int], true: float = 1.0, false: float = 0.0) -> Table:
        vals = np.full(tuple(card[v] for v in self.scope), false)
        for t in self.allowed:
            vals[t] = true
        return Table(self.scope, vals)


@dataclass(frozen=True)
class ConstraintNetwork(_Named):
    names: tuple[str, ...]
    card: tuple[int, ...]
    constraints: tuple[Constraint, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "card", tuple(int(k) for k in self.card))
        object.__setattr__(self, "constraints", tuple(self.constraints))
        _check_names(self.names, self.card)
        for c in self.constraints:
            for v in c.scope:
                if not 0 <= v < self.n:
                    raise ModelError(f"constraint mentions unknown variable {v}")
            for t in c.allowed:
                for v, x in zip(c.scope, t):
                    if not 0 <= x < self.card[v]:
                        raise ModelError(f"tuple {t} has value {x} outside domain of {self.names[v]}")

    @property
    def scheme(self) -> list[tuple[int, ...]]:
        return [c.scope for c in self.constraints]

    def primal_graph(self) -> UndirectedGraph:
        return augment(UndirectedGraph(self.n), self.scheme)


def constraint_check(cn: ConstraintNetwork, x: Mapping[int, int] | Sequence[int]) -> bool:
    x = check_assignment(cn.card, x)
    return all(c.allows(x) for c in cn.constraints)


@dataclass(frozen=True)
class CriterionFunction:
    """Additive criterion: the sum of table lookups over component scopes."""

    components: tuple[Table, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        for t in self.components:
            if not np.all(np.isfinite(t.values)):
                raise ModelError(f"criterion component over {t.scope} has non-finite values")

    @property
    def scheme(self) -> list[tuple[int, ...]]:
        return [t.scope for t in self.components]

    @classmethod
    def from_callable(cls, scopes: Iterable[Sequence[int]], card: Sequence[int], fns) -> CriterionFunction:
        comps = []
        for scope, fn in zip(scopes, fns):
            scope = tuple(scope)
            vals = np.zeros(tuple(card[v] for v in scope))
            for idx in product(*(range(card[v]) for v in scope)):
                vals[idx] = fn(*idx)
            comps.append(Table(scope, vals))
        return cls(tuple(comps))


def criterion_value(f: CriterionFunction, x: Mapping[int, int] | Sequence[int]) -> float:
    if not isinstance(x, Mapping):
        x = dict(enumerate(x))
    return float(sum(t(x) for t in f.components))


@dataclass(frozen=True)
class InfluenceDiagram(_Named):
    """Belief network with root decision variables and an additive utility.

    ``cpts`` maps each chance variable to its CPT; decision variables carry
    no CPT.
    """

    names: tuple[str, ...]
    card: tuple[int, ...]
    dag: DirectedGraph
    cpts: Mapping[int, Table]
    decisions: tuple[int, ...]
    utility: CriterionFunction = field(default_factory=CriterionFunction)
    atol: float = PROB_ATOL

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "card", tuple(int(k) for k in self.card))
        object.__setattr__(self, "decisions", tuple(sorted(self.decisions)))
        object.__setattr__(self, "cpts", dict(sorted(self.cpts.items())))
        _check_names(self.names, self.card)
        if self.dag.find_cycle() is not None:
            raise ModelError("influence diagram graph has a directed cycle")
        for d in self.decisions:
            if self.dag.parents(d):
                raise ModelError(f"decision {self.names[d]} is not a root variable")
            if d in self.cpts:
                raise ModelError(f"decision {self.names[d]} must not carry a CPT")
        chance = [v for v in range(self.n) if v not in self.decisions]
        if sorted(self.cpts) != chance:
            raise ModelError("every chance variable needs exactly one CPT")
        for v, cpt in self.cpts.items():
            _check_cpt(v, self.names, self.card, self.dag, cpt, self.atol)
        for t in self.utility.components:
            if any(not 0 <= v < self.n for v in t.scope):
                raise ModelError(f"utility component over unknown variables {t.scope}")

    @property
    def chance(self) -> tuple[int, ...]:
        return tuple(v for v in range(self.n) if v not in self.decisions)

    def factors(self) -> list[Table]:
        return list(self.cpts.values())

    def moral_graph(self) -> UndirectedGraph:
        return moralize(self.dag)

    def augmented_graph(self) -> UndirectedGraph:
        return augment(self.moral_graph(), self.utility.scheme)


__all__ = [
    "BeliefNetwork", "Constraint", "ConstraintNetwork", "CriterionFunction",
    "InfluenceDiagram", "ModelError", "PROB_ATOL", "check_assignment",
    "constraint_check", "criterion_value", "joint_probability", "primal_graph",
]

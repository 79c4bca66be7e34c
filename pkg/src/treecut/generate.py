"""Worked-example structures and random instance generators."""
from __future__ import annotations

from itertools import product

import numpy as np

from .graph import DirectedGraph
from .models import (BeliefNetwork, Constraint, ConstraintNetwork, CriterionFunction,
                     InfluenceDiagram)
from .tables import Table

SAMPLE8_NAMES = ("A", "B", "C", "D", "E", "F", "G", "H")
A, B, C, D, E, F, G, H = range(8)
SAMPLE8_ARCS = ((A, B), (B, C), (C, D), (B, G), (D, G), (G, F), (D, E), (F, E), (G, H), (F, H), (E, H))

# constraint scopes of the eight-variable example constraint network
SAMPLE8_SCOPES = ((A, B), (B, C), (B, D), (C, D), (D, G), (G, E), (B, G), (D, E, F), (G, D, F),
                   (G, H), (E, H), (F, H))


def sample8_dag() -> DirectedGraph:
    return DirectedGraph(8, SAMPLE8_ARCS)


def _random_cpt(rng: np.random.Generator, scope, card, deterministic: bool = False) -> Table:
    shape = tuple(card[v] for v in scope)
    rows = int(np.prod(shape[:-1], dtype=np.int64))
    k = shape[-1]
    if deterministic:
        vals = np.zeros((rows, k))
        vals[np.arange(rows), rng.integers(0, k, rows)] = 1.0
    else:
        vals = rng.dirichlet(np.ones(k), size=rows)
    return Table(scope, vals.reshape(shape))


def network_on_dag(rng: np.random.Generator, dag: DirectedGraph, card, names=None,
                   deterministic: bool = False) -> BeliefNetwork:
    names = tuple(names or (f"X{i}" for i in range(dag.n)))
    cpts = tuple(_random_cpt(rng, (*dag.parents(v), v), card, deterministic) for v in range(dag.n))
    return BeliefNetwork(names, tuple(card), dag, cpts)


def sample8_network(rng: np.random.Generator, k: int = 2) -> BeliefNetwork:
    return network_on_dag(rng, sample8_dag(), (k,) * 8, SAMPLE8_NAMES)


def sample8_criterion(card=(2,) * 8) -> CriterionFunction:
    """f = a*g + c^2 + 5*d*e*f over the eight example variables."""
    return CriterionFunction.from_callable(
        [(A, G), (C,), (D, E, F)], card,
        [lambda a, g: a * g, lambda c: c * c, lambda d, e, f: 5 * d * e * f])


def random_dag(rng: np.random.Generator, n: int, max_parents: int = 3) -> DirectedGraph:
    edges = []
    for child in range(1, n):
        m = int(rng.integers(0, min(max_parents, child) + 1))
        for p in sorted(rng.choice(child, size=m, replace=False).tolist()):
            edges.append((p, child))
    return DirectedGraph(n, edges)


def random_belief_network(rng: np.random.Generator, n: int, ks=(2, 3), max_parents: int = 3,
                          deterministic: bool = False) -> BeliefNetwork:
    card = tuple(int(rng.choice(ks)) for _ in range(n))
    return network_on_dag(rng, random_dag(rng, n, max_parents), card, deterministic=deterministic)


def random_evidence(rng: np.random.Generator, card, max_vars: int = 2, exclude=()) -> dict[int, int]:
    pool = [v for v in range(len(card)) if v not in set(exclude)]
    m = int(rng.integers(0, min(max_vars, len(pool)) + 1))
    chosen = sorted(rng.choice(pool, size=m, replace=False).tolist()) if m else []
    return {v: int(rng.integers(0, card[v])) for v in chosen}


def random_relation(rng: np.random.Generator, scope, card, tightness: float) -> frozenset:
    tuples = product(*(range(card[v]) for v in scope))
    return frozenset(t for t in tuples if rng.random() >= tightness)


def random_constraint_network(rng: np.random.Generator, n: int, ks=(2, 3), n_constraints: int | None = None,
                              tightness: float = 0.3, ternary_ratio: float = 0.25) -> ConstraintNetwork:
    card = tuple(int(rng.choice(ks)) for _ in range(n))
    if n_constraints is None:
        n_constraints = int(rng.integers(n // 2, 2 * n + 1))
    cons = []
    for _ in range(n_constraints):
        arity = 3 if (n >= 3 and rng.random() < ternary_ratio) else 2
        arity = min(arity, n)
        scope = tuple(sorted(rng.choice(n, size=arity, replace=False).tolist()))
        cons.append(Constraint(scope, random_relation(rng, scope, card, tightness)))
    return ConstraintNetwork(tuple(f"X{i}" for i in range(n)), card, tuple(cons))


def random_criterion(rng: np.random.Generator, card, n_components: int | None = None,
                     max_arity: int = 3, scale: float = 5.0) -> CriterionFunction:
    n = len(card)
    if n_components is None:
        n_components = int(rng.integers(1, 4))
    comps = []
    for _ in range(n_components):
        arity = int(rng.integers(1, min(max_arity, n) + 1))
        scope = tuple(sorted(rng.choice(n, size=arity, replace=False).tolist()))
        comps.append(Table(scope, rng.uniform(-scale, scale, size=tuple(card[v] for v in scope))))
    return CriterionFunction(tuple(comps))


def random_influence_diagram(rng: np.random.Generator, n_chance: int, n_decisions: int, ks=(2, 3),
                             max_parents: int = 2, n_utility: int | None = None) -> InfluenceDiagram:
    """Decisions are variables ``0..n_decisions-1`` (roots); chance variables
    follow and may depend on decisions and earlier chance variables."""
    n = n_chance + n_decisions
    card = tuple(int(rng.choice(ks)) for _ in range(n))
    edges = []
    for child in range(n_decisions, n):
        m = int(rng.integers(0, min(max_parents, child) + 1))
        for p in sorted(rng.choice(child, size=m, replace=False).tolist()):
            edges.append((p, child))
    dag = DirectedGraph(n, edges)
    cpts = {v: _random_cpt(rng, (*dag.parents(v), v), card) for v in range(n_decisions, n)}
    if n_utility is None:
        n_utility = int(rng.integers(1, 4))
    utility = random_criterion(rng, card, n_utility, max_arity=2, scale=10.0)
    names = tuple(f"D{i}" for i in range(n_decisions)) + tuple(f"X{i}" for i in range(n_chance))
    return InfluenceDiagram(names, card, dag, cpts, tuple(range(n_decisions)), utility)

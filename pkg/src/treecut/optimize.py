"""Constraint optimisation and maximum expected utility over join trees of
criterion-augmented graphs."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .cluster import CostMeter, Strategy
from .config import CUTSET_BUDGET, improves
from .decomposition import JoinTree, TradeoffReport, decompose, tradeoff_report
from .graph import UndirectedGraph, augment
from .inference import decode, propagate
from .models import ConstraintNetwork, CriterionFunction, InfluenceDiagram, constraint_check, criterion_value
from .tables import MAX_SUM, SUM_PRODUCT


@dataclass(frozen=True)
class OptOutcome:
    assignment: dict[int, int] | None
    value: float
    meter: CostMeter = field(default_factory=CostMeter, compare=False)

    @property
    def consistent(self) -> bool:
        return self.assignment is not None


@dataclass(frozen=True)
class MeuOutcome:
    decisions: dict[int, int]
    expected_utility: float
    meter: CostMeter = field(default_factory=CostMeter, compare=False)


def optimization_graph(cn: ConstraintNetwork, f: CriterionFunction) -> UndirectedGraph:
    """Primal graph plus a clique over every criterion component."""
    return augment(cn.primal_graph(), f.scheme)


def _check_cover(tree: JoinTree, n: int) -> None:
    missing = set(range(n)) - tree.variables
    if missing:
        raise ValueError(f"join tree does not cover variables {sorted(missing)}")


def optimize(cn: ConstraintNetwork, f: CriterionFunction, tree: JoinTree, strategy: Strategy | str = "elim",
             budget: int = CUTSET_BUDGET) -> OptOutcome:
    """Maximise ``f`` over consistent assignments with max-sum messages.

    Constraints enter as additive masks (0 allowed, -inf forbidden). An
    inconsistent network yields ``assignment=None`` and value -inf.
    """
    _check_cover(tree, cn.n)
    meter = CostMeter()
    factors = [c.to_table(cn.card, 0.0, -np.inf) for c in cn.constraints] + list(f.components)
    prop = propagate(tree, factors, cn.card, {}, MAX_SUM, strategy, meter, None, budget)
    total = sum(prop.root_tables[r].scalar() for r in prop.roots)
    if total == -np.inf:
        prop.release(meter)
        return OptOutcome(None, -np.inf, meter)
    x = decode(tree, prop, {}, MAX_SUM, strategy, meter, budget)
    prop.release(meter)
    x = dict(sorted(x.items()))
    if not constraint_check(cn, x):
        raise AssertionError("decoded assignment violates a constraint")
    return OptOutcome(x, criterion_value(f, x), meter)


def expected_utility(id_: InfluenceDiagram, tree: JoinTree, decisions: dict[int, int],
                     strategy: Strategy | str = "elim", meter: CostMeter | None = None,
                     budget: int = CUTSET_BUDGET) -> float:
    """Sum over utility components of the sum-product of the CPTs with that
    component, decisions fixed as evidence."""
    meter = meter if meter is not None else CostMeter()
    cpts = id_.factors()
    total = 0.0
    for u in id_.utility.components:
        prop = propagate(tree, cpts + [u], id_.card, decisions, SUM_PRODUCT, strategy, meter, None, budget)
        prop.release(meter)
        part = 1.0
        for r in prop.roots:
            part *= prop.root_tables[r].scalar()
        total += part
    return total


def meu(id_: InfluenceDiagram, tree: JoinTree, strategy: Strategy | str = "elim",
        budget: int = CUTSET_BUDGET) -> MeuOutcome:
    """Best root-decision assignment; decisions are enumerated outermost in
    lexicographic order and near-ties keep the earlier assignment."""
    _check_cover(tree, id_.n)
    meter = CostMeter()
    best_val, best_d = None, None
    for vals in product(*(range(id_.card[d]) for d in id_.decisions)):
        d = dict(zip(id_.decisions, vals))
        eu = expected_utility(id_, tree, d, strategy, meter, budget)
        if improves(eu, best_val):
            best_val, best_d = eu, d
    return MeuOutcome(best_d, float(best_val), meter)


def opt_tradeoff_report(problem: tuple[ConstraintNetwork, CriterionFunction] | InfluenceDiagram,
                        heuristic: str = "min-fill") -> TradeoffReport:
    """Tradeoff report on the criterion-augmented graph."""
    if isinstance(problem, InfluenceDiagram):
        g = problem.augmented_graph()
    else:
        g = optimization_graph(*problem)
    return tradeoff_report(g, decompose(g, heuristic))


__all__ = ["MeuOutcome", "OptOutcome", "expected_utility", "meu", "opt_tradeoff_report",
           "optimization_graph", "optimize"]

"""Ground truth by full enumeration of joint assignments.

Every routine evaluates the model's defining formula on all joint
assignments at once, as a dense array over the full domain product (last
variable fastest), without any graph structure or table algebra from the
engine. Ties keep the lexicographically first assignment.
"""
from __future__ import annotations

from collections.abc import Iterator, Mapping, Sequence
from dataclasses import dataclass
from itertools import product
from math import prod

import numpy as np

from .config import ORACLE_BUDGET, improves
from .models import BeliefNetwork, ConstraintNetwork, CriterionFunction, InfluenceDiagram
from .optimize import MeuOutcome, OptOutcome


class OracleBudgetExceeded(RuntimeError):
    def __init__(self, size: int, budget: int):
        super().__init__(f"joint space has {size} assignments, over the oracle budget of {budget}")
        self.size = size
        self.budget = budget


def joint_assignments(card: Sequence[int], fixed: Mapping[int, int] | None = None,
                      budget: int = ORACLE_BUDGET) -> Iterator[tuple[int, ...]]:
    """Every full assignment agreeing with ``fixed``, lexicographically."""
    fixed = dict(fixed or {})
    size = prod(1 if v in fixed else k for v, k in enumerate(card))
    if size > budget:
        raise OracleBudgetExceeded(size, budget)
    ranges = [(fixed[v],) if v in fixed else range(k) for v, k in enumerate(card)]
    return product(*ranges)


def _dense(card: Sequence[int], fixed: Mapping[int, int], budget: int) -> tuple[int, ...]:
    """Shape of the joint grid; fixed variables get a single slot."""
    shape = tuple(1 if v in fixed else k for v, k in enumerate(card))
    size = prod(shape)
    if size > budget:
        raise OracleBudgetExceeded(size, budget)
    return shape


def _spread(values: np.ndarray, scope: Sequence[int], card: Sequence[int], fixed: Mapping[int, int]) -> np.ndarray:
    """A table's values broadcast onto the joint grid."""
    idx = tuple(fixed[v] if v in fixed else slice(None) for v in scope)
    vals = np.asarray(values)[idx]
    rest = [v for v in scope if v not in fixed]
    vals = np.transpose(vals, np.argsort(rest)) if rest else vals
    keep = set(rest)
    return np.reshape(vals, [card[v] if v in keep else 1 for v in range(len(card))])


def _joint_grid(cpts, card: Sequence[int], fixed: Mapping[int, int], budget: int) -> np.ndarray:
    grid = np.ones(_dense(card, fixed, budget))
    for cpt in cpts:
        grid = grid * _spread(cpt.values, cpt.scope, card, fixed)
    return grid


def _full(card: Sequence[int], fixed: Mapping[int, int], flat_index: int, shape) -> dict[int, int]:
    x = np.unravel_index(flat_index, shape)
    return {v: int(fixed[v]) if v in fixed else int(x[v]) for v in range(len(card))}


def oracle_belief(bn: BeliefNetwork, query: int, evidence: Mapping[int, int] | None = None,
                  budget: int = ORACLE_BUDGET) -> np.ndarray | None:
    """Posterior over ``query``; None when the evidence has probability 0."""
    evidence = dict(evidence or {})
    grid = _joint_grid(bn.cpts, bn.card, evidence, budget)
    axes = tuple(v for v in range(bn.n) if v != query)
    dist = grid.sum(axis=axes).reshape(-1)
    z = dist.sum()
    return None if z <= 0 else dist / z


def oracle_evidence_probability(bn: BeliefNetwork, evidence: Mapping[int, int] | None = None,
                                budget: int = ORACLE_BUDGET) -> float:
    return float(_joint_grid(bn.cpts, bn.card, dict(evidence or {}), budget).sum())


def oracle_mpe(bn: BeliefNetwork, evidence: Mapping[int, int] | None = None,
               budget: int = ORACLE_BUDGET) -> tuple[dict[int, int] | None, float]:
    evidence = dict(evidence or {})
    grid = _joint_grid(bn.cpts, bn.card, evidence, budget)
    i = int(np.argmax(grid))  # first maximum in lexicographic order
    best = float(grid.flat[i])
    if best <= 0:
        return None, 0.0
    return _full(bn.card, evidence, i, grid.shape), best


@dataclass(frozen=True)
class CspTruth:
    consistent: bool
    count: int
    first_solution: dict[int, int] | None


def _solutions(cn: ConstraintNetwork, budget: int) -> np.ndarray:
    ok = np.ones(_dense(cn.card, {}, budget), dtype=bool)
    for c in cn.constraints:
        mask = np.zeros(tuple(cn.card[v] for v in c.scope), dtype=bool)
        for t in c.allowed:
            mask[t] = True
        ok = ok & _spread(mask, c.scope, cn.card, {})
    return ok


def oracle_csp(cn: ConstraintNetwork, budget: int = ORACLE_BUDGET) -> CspTruth:
    ok = _solutions(cn, budget)
    count = int(ok.sum())
    if count == 0:
        return CspTruth(False, 0, None)
    return CspTruth(True, count, _full(cn.card, {}, int(np.argmax(ok)), ok.shape))


def _criterion_grid(f: CriterionFunction, card: Sequence[int], fixed: Mapping[int, int], budget: int) -> np.ndarray:
    grid = np.zeros(_dense(card, fixed, budget))
    for t in f.components:
        grid = grid + _spread(t.values, t.scope, card, fixed)
    return grid


def oracle_opt(cn: ConstraintNetwork, f: CriterionFunction, budget: int = ORACLE_BUDGET):
    """Best consistent assignment as an ``OptOutcome`` (value -inf if none)."""
    ok = _solutions(cn, budget)
    if not ok.any():
        return OptOutcome(None, -np.inf)
    vals = np.where(ok, _criterion_grid(f, cn.card, {}, budget), -np.inf)
    i = int(np.argmax(vals))
    return OptOutcome(_full(cn.card, {}, i, vals.shape), float(vals.flat[i]))


def oracle_expected_utility(id_: InfluenceDiagram, decisions: Mapping[int, int],
                            budget: int = ORACLE_BUDGET) -> float:
    decisions = dict(decisions)
    p = _joint_grid(list(id_.cpts.values()), id_.card, decisions, budget)
    u = _criterion_grid(id_.utility, id_.card, decisions, budget)
    return float((p * u).sum())


def oracle_meu(id_: InfluenceDiagram, budget: int = ORACLE_BUDGET):
    """Best decision assignment as a ``MeuOutcome``."""
    best, best_d = None, None
    for vals in product(*(range(id_.card[d]) for d in id_.decisions)):
        d = dict(zip(id_.decisions, vals))
        eu = oracle_expected_utility(id_, d, budget)
        if improves(eu, best):
            best, best_d = eu, d
    return MeuOutcome(best_d, float(best))


__all__ = [
    "CspTruth", "OracleBudgetExceeded", "joint_assignments", "oracle_belief", "oracle_csp",
    "oracle_evidence_probability", "oracle_expected_utility", "oracle_meu", "oracle_mpe", "oracle_opt",
]

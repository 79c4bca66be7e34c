"""Belief updating and MPE over a join tree with a per-cluster strategy.

Messages flow from the leaves to a root cluster; the root is the first
cluster (in sorted cluster order) that contains the query variable. Every
message is a table over the full separator minus evidence, and all of them
are held until the query finishes so the meter records the persistent
space honestly.
"""
from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

from .cluster import (CostMeter, Strategy, bruteforce_message, cluster_argmax, cluster_message,
                      cutset_message, elimination_message, forest_eliminate)
from .decomposition import DEFAULT_CUTSET_BUDGET, JoinTree
from .graph import CycleError, find_cycle, remove_vertices
from .models import BeliefNetwork, check_assignment, joint_probability
from .tables import MAX_PRODUCT, SUM_PRODUCT, Semiring, Table, restrict


class InferenceError(ValueError):
    pass


@dataclass(frozen=True)
class ClusterProblem:
    index: int
    variables: frozenset[int]
    functions: tuple[Table, ...]
    separator: frozenset[int]  # towards the parent; empty at a root
    neighbors: tuple[int, ...] = ()


def assign_scopes(tree: JoinTree, scopes: Sequence[Sequence[int]]) -> list[list[int]]:
    """Place each scope in the first cluster that covers it; returns factor
    indices per cluster."""
    placed: list[list[int]] = [[] for _ in tree.clusters]
    for k, scope in enumerate(scopes):
        i = tree.first_cluster_containing(scope)
        if i is None:
            raise InferenceError(f"no cluster covers scope {tuple(scope)}; the join tree does not match the model")
        placed[i].append(k)
    return placed


def assign_functions(bn: BeliefNetwork, tree: JoinTree, evidence: Mapping[int, int] | None = None,
                     root: int | None = None) -> list[ClusterProblem]:
    """Evidence-restricted CPTs grouped by cluster, with each cluster's
    separator towards ``root`` (default: first cluster of each component)."""
    evidence = check_assignment(bn.card, evidence or {}, full=False)
    placed = assign_scopes(tree, [cpt.scope for cpt in bn.cpts])
    parent: dict[int, int | None] = {}
    for comp in tree.components():
        r = root if root in comp else comp[0]
        parent.update(tree.rooted(r)[1])
    out = []
    for i, cluster in enumerate(tree.clusters):
        p = parent[i]
        sep = frozenset() if p is None else tree.separator(i, p)
        fns = tuple(restrict(bn.cpts[k], evidence) for k in placed[i])
        out.append(ClusterProblem(i, cluster, fns, sep, tree.neighbors(i)))
    return out


@dataclass
class Propagation:
    """Leaf-to-root pass result for every component of a join tree."""

    roots: list[int]
    parent: dict[int, int | None]
    order: list[int]  # every cluster, parents before children
    local: list[list[Table]]  # restricted factors assigned to each cluster
    messages: dict[int, Table]  # message from cluster i to parent[i]
    root_tables: dict[int, Table]

    @property
    def held(self) -> int:
        return sum(m.size for m in self.messages.values())

    def release(self, meter: CostMeter) -> None:
        """Drop the stored messages from the meter's persistent count."""
        meter.release(self.held)


def _children(parent: Mapping[int, int | None]) -> dict[int, list[int]]:
    kids: dict[int, list[int]] = {i: [] for i in parent}
    for i, p in parent.items():
        if p is not None:
            kids[p].append(i)
    return {i: sorted(c) for i, c in kids.items()}


def propagate(tree: JoinTree, factors: Sequence[Table], card: Sequence[int], evidence: Mapping[int, int],
              semiring: Semiring, strategy: Strategy | str, meter: CostMeter,
              query: int | None = None, budget: int = DEFAULT_CUTSET_BUDGET) -> Propagation:
    """Send messages towards one root per component.

    The component holding ``query`` is rooted at the first cluster containing
    it and its root table is over ``{query}``; other roots yield scalars.
    """
    strategy = Strategy.parse(strategy)
    cardmap = dict(enumerate(card))
    placed = assign_scopes(tree, [f.scope for f in factors])
    local = [[restrict(factors[k], evidence) for k in placed[i]] for i in range(len(tree.clusters))]
    roots, parent, order = [], {}, []
    for comp in tree.components():
        r = comp[0]
        if query is not None:
            hit = [i for i in comp if query in tree.clusters[i]]
            if hit:
                r = hit[0]
        bfs, par = tree.rooted(r)
        roots.append(r)
        parent.update(par)
        order.extend(bfs)
    kids = _children(parent)
    messages: dict[int, Table] = {}
    root_tables: dict[int, Table] = {}
    for i in reversed(order):
        bag = local[i] + [messages[c] for c in kids[i]]
        p = parent[i]
        if p is None:
            out = frozenset({query}) & tree.clusters[i] - set(evidence) if query is not None else frozenset()
        else:
            out = tree.separator(i, p) - set(evidence)
        table = cluster_message(strategy, bag, out, semiring, meter, card=cardmap, budget=budget)
        if p is None:
            root_tables[i] = table
            meter.output += table.size
        else:
            messages[i] = table
            meter.hold(table.size)
    return Propagation(roots, parent, order, local, messages, root_tables)


def decode(tree: JoinTree, prop: Propagation, evidence: Mapping[int, int], semiring: Semiring,
           strategy: Strategy | str, meter: CostMeter, budget: int = DEFAULT_CUTSET_BUDGET) -> dict[int, int]:
    """Root-to-leaves witness selection after a maximising propagation."""
    kids = _children(prop.parent)
    assignment = dict(evidence)
    for i in prop.order:
        bag = prop.local[i] + [prop.messages[c] for c in kids[i]]
        fixed = {v: assignment[v] for v in tree.clusters[i] if v in assignment}
        bag = [restrict(f, fixed) for f in bag]
        local, _ = cluster_argmax(strategy, bag, semiring, meter, budget=budget)
        assignment.update(local)
        for v in tree.clusters[i]:
            # variables no remaining factor mentions are unconstrained here
            assignment.setdefault(v, 0)
    return assignment


@dataclass(frozen=True)
class Posterior:
    query: int
    distribution: np.ndarray | None
    meter: CostMeter = field(compare=False)
    evidence_probability: float = 0.0

    @property
    def impossible(self) -> bool:
        return self.distribution is None


@dataclass(frozen=True)
class MpeResult:
    assignment: dict[int, int] | None
    probability: float
    meter: CostMeter = field(compare=False)
    propagated_value: float = 0.0

    @property
    def impossible(self) -> bool:
        return self.assignment is None


def _check_tree(tree: JoinTree, n: int) -> None:
    missing = set(range(n)) - tree.variables
    if missing:
        raise InferenceError(f"join tree does not cover variables {sorted(missing)}")


def belief(bn: BeliefNetwork, tree: JoinTree, strategy: Strategy | str, query: int,
           evidence: Mapping[int, int] | None = None, budget: int = DEFAULT_CUTSET_BUDGET) -> Posterior:
    """Posterior P(query | evidence); impossible evidence yields a result with
    ``distribution=None``."""
    evidence = check_assignment(bn.card, evidence or {}, full=False)
    if query in evidence:
        raise InferenceError("query variable is part of the evidence")
    _check_tree(tree, bn.n)
    meter = CostMeter()
    prop = propagate(tree, bn.factors(), bn.card, evidence, SUM_PRODUCT, strategy, meter, query, budget)
    dist = np.ones(bn.card[query])
    for r in prop.roots:
        t = prop.root_tables[r]
        dist = dist * (t.values if t.scope == (query,) else t.scalar())
    prop.release(meter)
    z = float(dist.sum())
    if z <= 0.0:
        return Posterior(query, None, meter, 0.0)
    return Posterior(query, dist / z, meter, z)


def mpe(bn: BeliefNetwork, tree: JoinTree, strategy: Strategy | str,
        evidence: Mapping[int, int] | None = None, budget: int = DEFAULT_CUTSET_BUDGET) -> MpeResult:
    """Most probable full assignment consistent with the evidence."""
    evidence = check_assignment(bn.card, evidence or {}, full=False)
    _check_tree(tree, bn.n)
    meter = CostMeter()
    prop = propagate(tree, bn.factors(), bn.card, evidence, MAX_PRODUCT, strategy, meter, None, budget)
    value = 1.0
    for r in prop.roots:
        value *= prop.root_tables[r].scalar()
    if value <= 0.0:
        prop.release(meter)
        return MpeResult(None, 0.0, meter, 0.0)
    assignment = decode(tree, prop, evidence, MAX_PRODUCT, strategy, meter, budget)
    prop.release(meter)
    return MpeResult(dict(sorted(assignment.items())), joint_probability(bn, assignment), meter, value)


def conditioned_network_belief(bn: BeliefNetwork, cutset_assignment: Mapping[int, int],
                               evidence: Mapping[int, int] | None = None,
                               meter: CostMeter | None = None) -> float:
    """Joint weight P(c, e) for one cutset assignment by tree propagation.

    The moral graph minus the cutset must be a forest.
    """
    c = check_assignment(bn.card, cutset_assignment, full=False)
    e = check_assignment(bn.card, evidence or {}, full=False)
    for v in set(c) & set(e):
        if c[v] != e[v]:
            return 0.0
    residual = remove_vertices(bn.moral_graph(), c)
    cycle = find_cycle(residual)
    if cycle is not None:
        raise CycleError(f"moral graph minus cutset still has cycle {[bn.names[v] for v in cycle]}", cycle)
    fixed = {**e, **c}
    meter = meter if meter is not None else CostMeter()
    return forest_eliminate([restrict(f, fixed) for f in bn.cpts], SUM_PRODUCT, meter)


def cluster_message_elimination(cp: ClusterProblem, messages: Sequence[Table] = (),
                                meter: CostMeter | None = None, order=None,
                                semiring: Semiring = SUM_PRODUCT) -> Table:
    return elimination_message(list(cp.functions) + list(messages), cp.separator, semiring, meter, order=order)


def cluster_message_bruteforce(cp: ClusterProblem, messages: Sequence[Table] = (),
                               meter: CostMeter | None = None, semiring: Semiring = SUM_PRODUCT) -> Table:
    return bruteforce_message(list(cp.functions) + list(messages), cp.separator, semiring, meter)


def cluster_message_cutset(cp: ClusterProblem, cutset: Sequence[int] | None = None,
                           messages: Sequence[Table] = (), meter: CostMeter | None = None,
                           semiring: Semiring = SUM_PRODUCT) -> Table:
    return cutset_message(list(cp.functions) + list(messages), cp.separator, semiring, meter, cutset=cutset)

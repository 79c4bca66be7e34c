"""Constraint networks over join trees: cluster solving, directional
pairwise consistency, backtrack-free extraction and counting."""
from __future__ import annotations

from collections.abc import Iterator, Mapping, Sequence
from dataclasses import dataclass, field

from .cluster import CostMeter, Strategy
from .config import CUTSET_BUDGET
from .decomposition import JoinTree, cycle_cutset
from .graph import UndirectedGraph, biconnected_components
from .inference import assign_scopes, propagate
from .models import Constraint, ConstraintNetwork, constraint_check
from .tables import SUM_PRODUCT

CLUSTER_STRATEGIES = ("backtracking", "cutset")


class BacktrackFreeViolation(RuntimeError):
    """Extraction hit a dead end after a successful consistency pass."""


Relation = tuple[tuple[int, ...], frozenset]  # (scope, allowed tuples)


def _rel(c: Constraint | Relation) -> Relation:
    return (c.scope, c.allowed) if isinstance(c, Constraint) else c


def restrict_relation(rel: Relation, fixed: Mapping[int, int]) -> Relation:
    scope, allowed = rel
    keep = [i for i, v in enumerate(scope) if v not in fixed]
    pinned = [(i, fixed[v]) for i, v in enumerate(scope) if v in fixed]
    out = frozenset(tuple(t[i] for i in keep) for t in allowed if all(t[i] == x for i, x in pinned))
    return tuple(scope[i] for i in keep), out


@dataclass(frozen=True)
class ClusterSolutions:
    variables: tuple[int, ...]
    tuples: tuple[tuple[int, ...], ...]

    def project(self, onto: Sequence[int]) -> set[tuple[int, ...]]:
        idx = [self.variables.index(v) for v in onto]
        return {tuple(t[i] for i in idx) for t in self.tuples}


@dataclass(frozen=True)
class SolveOutcome:
    consistent: bool
    solution: dict[int, int] | None = None
    count: int | None = None
    meter: CostMeter = field(default_factory=CostMeter, compare=False)


# ---------------------------------------------------------------- backtracking

def _backtrack(rels: Sequence[Relation], variables: Sequence[int], card: Mapping[int, int],
               meter: CostMeter, order: Sequence[int] | None = None) -> Iterator[dict[int, int]]:
    """Yield every consistent assignment of ``variables``.

    Variables are tried smallest-domain-first (ties by id) unless ``order``
    is given; a relation is checked as soon as its scope is complete.
    """
    if order is None:
        order = sorted(variables, key=lambda v: (card[v], v))
    depth_of = {v: i for i, v in enumerate(order)}
    checks: list[list[Relation]] = [[] for _ in order]
    for scope, allowed in rels:
        if not scope:
            if () not in allowed:
                return
            continue
        checks[max(depth_of[v] for v in scope)].append((scope, allowed))
    x: dict[int, int] = {}
    n = len(order)
    if n == 0:
        yield {}
        return
    stack = [iter(range(card[order[0]]))]
    while stack:
        d = len(stack) - 1
        v = order[d]
        for val in stack[-1]:
            meter.cells += 1
            x[v] = val
            if all(tuple(x[u] for u in scope) in allowed for scope, allowed in checks[d]):
                break
        else:
            x.pop(v, None)
            stack.pop()
            continue
        if d + 1 == n:
            yield dict(x)
        else:
            stack.append(iter(range(card[order[d + 1]])))


# ---------------------------------------------------------------- cutset

def _forest_solutions(rels: Sequence[Relation], variables: Sequence[int], card: Mapping[int, int],
                      meter: CostMeter, decide_only: bool = False) -> Iterator[dict[int, int]]:
    """Solve a problem whose relations have arity <= 2 and form a forest.

    Directional arc consistency runs leaves to root; afterwards every
    solution is enumerated root to leaves without dead ends. With
    ``decide_only`` a single empty dict is yielded iff a solution exists.
    """
    domain = {v: set(range(card[v])) for v in variables}
    pairs: dict[tuple[int, int], set] = {}
    for scope, allowed in rels:
        if len(scope) == 0:
            if () not in allowed:
                return
        elif len(scope) == 1:
            domain[scope[0]] &= {t[0] for t in allowed}
        else:
            a, b = scope
            key, ok = ((a, b), set(allowed)) if a < b else ((b, a), {(y, x) for x, y in allowed})
            pairs[key] = pairs[key] & ok if key in pairs else ok
    if any(not d for d in domain.values()):
        return
    adj: dict[int, list[int]] = {v: [] for v in variables}
    for a, b in pairs:
        adj[a].append(b)
        adj[b].append(a)

    def allowed(p, pv, c, cv):
        return ((pv, cv) in pairs[(p, c)]) if p < c else ((cv, pv) in pairs[(c, p)])

    parent: dict[int, int | None] = {}
    order: list[int] = []
    for root in sorted(variables):
        if root in parent:
            continue
        parent[root] = None
        queue = [root]
        for v in queue:
            order.append(v)
            for w in sorted(adj[v]):
                if w not in parent:
                    parent[w] = v
                    queue.append(w)
    for v in reversed(order):
        p = parent[v]
        if p is None:
            continue
        meter.cells += len(domain[p]) * len(domain[v])
        domain[p] = {a for a in domain[p] if any(allowed(p, a, v, b) for b in domain[v])}
        if not domain[p]:
            return
    if decide_only:
        yield {}
        return
    x: dict[int, int] = {}

    def extend(i):
        if i == len(order):
            yield dict(x)
            return
        v = order[i]
        p = parent[v]
        for val in sorted(domain[v]):
            meter.cells += 1
            if p is None or allowed(p, x[p], v, val):
                x[v] = val
                yield from extend(i + 1)
        x.pop(v, None)

    yield from extend(0)


def _cutset_solutions(rels: Sequence[Relation], variables: Sequence[int], card: Mapping[int, int],
                      meter: CostMeter, condition_on: Sequence[int] = (), decide_only: bool = False,
                      budget: int = CUTSET_BUDGET) -> Iterator[dict[int, int]]:
    """Enumerate ``condition_on`` plus a cycle cutset by backtracking, then
    solve each residual forest by arc consistency.

    With ``decide_only`` only the conditioned assignments that extend to a
    solution are yielded (restricted to the conditioned variables).
    """
    variables = sorted(variables)
    graph = _relation_graph(rels, variables, exclude=condition_on)
    cut = sorted(cycle_cutset(graph, "exact", budget).vertices)
    conditioned = sorted(set(condition_on) | set(cut))
    outer = [r for r in rels if set(r[0]) <= set(conditioned)]
    rest = [v for v in variables if v not in set(conditioned)]
    for c in _backtrack(outer, conditioned, card, meter, order=conditioned):
        residual = [restrict_relation(r, c) for r in rels if not set(r[0]) <= set(conditioned)]
        for sol in _forest_solutions(residual, rest, card, meter, decide_only):
            if decide_only:
                yield dict(c)
                break
            sol.update(c)
            yield sol


def _relation_graph(rels: Sequence[Relation], variables: Sequence[int], exclude=()) -> UndirectedGraph:
    exclude = set(exclude)
    edges = set()
    for scope, _ in rels:
        vs = sorted(v for v in scope if v not in exclude)
        edges.update((a, b) for k, a in enumerate(vs) for b in vs[k + 1:])
    return UndirectedGraph(set(variables) - exclude, edges)


def iter_cluster_solutions(rels: Sequence[Constraint | Relation], variables: Sequence[int],
                           card: Mapping[int, int], strategy: str = "backtracking",
                           meter: CostMeter | None = None, budget: int = CUTSET_BUDGET) -> Iterator[tuple[int, ...]]:
    """Stream the solutions of a subproblem as tuples over sorted variables."""
    meter = meter if meter is not None else CostMeter()
    rels = [_rel(r) for r in rels]
    variables = tuple(sorted(variables))
    if strategy == "backtracking":
        it = _backtrack(rels, variables, card, meter)
    elif strategy == "cutset":
        it = _cutset_solutions(rels, variables, card, meter, budget=budget)
    else:
        raise ValueError(f"unknown cluster strategy {strategy!r}")
    for sol in it:
        yield tuple(sol[v] for v in variables)


def solve_cluster(rels: Sequence[Constraint | Relation], variables: Sequence[int], card: Mapping[int, int],
                  strategy: str = "backtracking", meter: CostMeter | None = None,
                  budget: int = CUTSET_BUDGET) -> ClusterSolutions:
    """Exact solution set of the subproblem over ``variables``."""
    variables = tuple(sorted(variables))
    tuples = sorted(set(iter_cluster_solutions(rels, variables, card, strategy, meter, budget)))
    return ClusterSolutions(variables, tuple(tuples))


def cluster_projection(rels: Sequence[Constraint | Relation], variables: Sequence[int], onto: Sequence[int],
                       card: Mapping[int, int], strategy: str = "backtracking",
                       meter: CostMeter | None = None, budget: int = CUTSET_BUDGET) -> Relation:
    """Tuples over ``onto`` that extend to a solution of the subproblem."""
    meter = meter if meter is not None else CostMeter()
    rels = [_rel(r) for r in rels]
    onto = tuple(sorted(onto))
    if strategy == "cutset":
        found = {tuple(c[v] for v in onto)
                 for c in _cutset_solutions(rels, variables, card, meter, onto, True, budget)}
    else:
        found = {tuple(s[v] for v in onto) for s in _backtrack(rels, sorted(variables), card, meter)}
    return onto, frozenset(found)


# ---------------------------------------------------------------- join-tree passes

def _rooting(tree: JoinTree) -> tuple[list[int], dict[int, int | None]]:
    order: list[int] = []
    parent: dict[int, int | None] = {}
    for comp in tree.components():
        bfs, par = tree.rooted(comp[0])
        order.extend(bfs)
        parent.update(par)
    return order, parent


def pairwise_consistency(clusters: Sequence[ClusterSolutions], tree: JoinTree) -> list[ClusterSolutions] | None:
    """Directional consistency from the leaves to each root.

    Every parent keeps only tuples whose separator projection some child
    tuple shares. Returns the filtered clusters, or None when a solution set
    empties.
    """
    order, parent = _rooting(tree)
    sols = list(clusters)
    for i in reversed(order):
        if not sols[i].tuples:
            return None
        p = parent[i]
        if p is None:
            continue
        sep = tuple(sorted(tree.separator(i, p)))
        support = sols[i].project(sep)
        idx = [sols[p].variables.index(v) for v in sep]
        kept = tuple(t for t in sols[p].tuples if tuple(t[k] for k in idx) in support)
        sols[p] = ClusterSolutions(sols[p].variables, kept)
    return sols


def extract_solution(clusters: Sequence[ClusterSolutions], tree: JoinTree) -> dict[int, int]:
    """Root-to-leaves assembly choosing the smallest compatible tuple."""
    order, _ = _rooting(tree)
    x: dict[int, int] = {}
    for i in order:
        cs = clusters[i]
        for t in cs.tuples:  # sorted, so the first match is the smallest
            if all(x.get(v, val) == val for v, val in zip(cs.variables, t)):
                x.update(zip(cs.variables, t))
                break
        else:
            raise BacktrackFreeViolation(f"dead end at cluster {i} after consistency pass")
    return dict(sorted(x.items()))


def _assign(cn: ConstraintNetwork, tree: JoinTree) -> list[list[Relation]]:
    missing = set(range(cn.n)) - tree.variables
    if missing:
        raise ValueError(f"join tree does not cover variables {sorted(missing)}")
    placed = assign_scopes(tree, cn.scheme)
    return [[_rel(cn.constraints[k]) for k in placed[i]] for i in range(len(tree.clusters))]


def count_solutions(cn: ConstraintNetwork, tree: JoinTree, strategy: str = "backtracking",
                    meter: CostMeter | None = None) -> int:
    """Sum-product over 0/1 constraint tables along the tree."""
    meter = meter if meter is not None else CostMeter()
    factors = [c.to_table(cn.card) for c in cn.constraints]
    engine = Strategy.BRUTE if strategy == "backtracking" else Strategy.CUTSET
    prop = propagate(tree, factors, cn.card, {}, SUM_PRODUCT, engine, meter)
    prop.release(meter)
    total = 1.0
    for r in prop.roots:
        total *= prop.root_tables[r].scalar()
    # clusters hold every variable, but variables in no constraint are not in
    # any factor scope: each contributes its full domain
    for v in range(cn.n):
        if not any(v in c.scope for c in cn.constraints):
            total *= cn.card[v]
    return int(round(total))


def solve(cn: ConstraintNetwork, tree: JoinTree, strategy: str = "backtracking", count: bool = False,
          mode: str = "separator", budget: int = CUTSET_BUDGET) -> SolveOutcome:
    """Decide consistency and extract one solution over a join tree.

    ``mode="separator"`` records only separator relations between clusters
    (space bounded by the separator width); ``mode="full"`` materialises
    every cluster's solution set and runs :func:`pairwise_consistency`.
    """
    if strategy not in CLUSTER_STRATEGIES:
        raise ValueError(f"unknown cluster strategy {strategy!r}")
    meter = CostMeter()
    card = dict(enumerate(cn.card))
    local = _assign(cn, tree)
    if mode == "full":
        sols = [solve_cluster(local[i], tree.clusters[i], card, strategy, meter, budget)
                for i in range(len(tree.clusters))]
        filtered = pairwise_consistency(sols, tree)
        if filtered is None:
            return SolveOutcome(False, None, 0 if count else None, meter)
        solution = extract_solution(filtered, tree)
    elif mode == "separator":
        order, parent = _rooting(tree)
        kids: dict[int, list[int]] = {i: [] for i in order}
        for i, p in parent.items():
            if p is not None:
                kids[p].append(i)
        recorded: dict[int, Relation] = {}
        for i in reversed(order):
            p = parent[i]
            onto = tree.separator(i, p) if p is not None else ()
            rels = local[i] + [recorded[c] for c in sorted(kids[i])]
            rel = cluster_projection(rels, tree.clusters[i], onto, card, strategy, meter, budget)
            if not rel[1]:
                return SolveOutcome(False, None, 0 if count else None, meter)
            if p is not None:
                recorded[i] = rel
                meter.hold(len(rel[1]))
        solution = {}
        for i in order:
            fixed = {v: solution[v] for v in tree.clusters[i] if v in solution}
            rels = [restrict_relation(r, fixed) for r in local[i] + [recorded[c] for c in sorted(kids[i])]]
            free = sorted(tree.clusters[i] - set(fixed))
            best = min(iter_cluster_solutions(rels, free, card, strategy, meter, budget), default=None)
            if best is None:
                raise BacktrackFreeViolation(f"dead end at cluster {i} after consistency pass")
            solution.update(zip(free, best))
        solution = dict(sorted(solution.items()))
    else:
        raise ValueError(f"unknown mode {mode!r}")
    if not constraint_check(cn, solution):
        raise BacktrackFreeViolation("extracted assignment violates a constraint")
    meter.release(meter.persistent)
    n_sol = count_solutions(cn, tree, strategy, meter) if count else None
    return SolveOutcome(True, solution, n_sol, meter)


def block_tree(cn: ConstraintNetwork) -> JoinTree:
    """Join tree whose clusters are the nonseparable components of the
    primal graph, joined at articulation variables."""
    g = cn.primal_graph()
    blocks, _ = biconnected_components(g)
    covered = set().union(*blocks) if blocks else set()
    clusters = sorted(list(blocks) + [frozenset({v}) for v in range(cn.n) if v not in covered],
                      key=lambda s: tuple(sorted(s)))
    edges = []
    for v in range(cn.n):
        holding = [i for i, c in enumerate(clusters) if v in c]
        edges.extend((holding[0], j) for j in holding[1:])
    return JoinTree(tuple(clusters), tuple(edges), 1 if edges else 0)


def nonseparable_solve(cn: ConstraintNetwork, count: bool = False, budget: int = CUTSET_BUDGET) -> SolveOutcome:
    """Solve per nonseparable component with conditioning, stitched at
    articulation variables."""
    return solve(cn, block_tree(cn), "cutset", count=count, budget=budget)


__all__ = [
    "BacktrackFreeViolation", "ClusterSolutions", "SolveOutcome", "block_tree", "cluster_projection",
    "count_solutions", "extract_solution", "iter_cluster_solutions", "nonseparable_solve",
    "pairwise_consistency", "restrict_relation", "solve", "solve_cluster",
]

"""Triangulation, clique trees, separator-bounded join-tree families and
cycle cutsets."""
from __future__ import annotations

import random
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from itertools import combinations

from .config import CUTSET_BUDGET as DEFAULT_CUTSET_BUDGET
from .graph import GraphError, UndirectedGraph, is_forest, subgraph

HEURISTICS = ("min-fill", "min-degree", "given")


class DecompositionError(ValueError):
    pass


# ---------------------------------------------------------------- orderings

def _fill_count(adj: dict[int, set[int]], v: int) -> int:
    nb = sorted(adj[v])
    return sum(1 for a, b in combinations(nb, 2) if b not in adj[a])


def find_ordering(g: UndirectedGraph, heuristic: str = "min-fill", given: Sequence[int] | None = None) -> tuple[int, ...]:
    """Greedy elimination ordering; ``order[0]`` is eliminated first.

    min-fill ties go to the smaller degree then the smaller id; min-degree
    ties go to the smaller id.
    """
    if heuristic == "given":
        if given is None:
            raise DecompositionError("heuristic 'given' needs an explicit ordering")
        given = tuple(int(v) for v in given)
        if sorted(given) != g.sorted_vertices():
            raise DecompositionError(f"ordering {list(given)} is not a permutation of the graph's vertices")
        return given
    if heuristic not in HEURISTICS:
        raise DecompositionError(f"unknown ordering heuristic {heuristic!r}")
    adj = {v: set(g.neighbors(v)) for v in g.vertices}
    order = []
    while adj:
        if heuristic == "min-fill":
            v = min(adj, key=lambda u: (_fill_count(adj, u), len(adj[u]), u))
        else:
            v = min(adj, key=lambda u: (len(adj[u]), u))
        nb = adj.pop(v)
        for a in nb:
            adj[a].discard(v)
            adj[a].update(nb - {a})
        order.append(v)
    return tuple(order)


@dataclass(frozen=True)
class ChordalResult:
    graph: UndirectedGraph
    fill_edges: frozenset[tuple[int, int]]
    width: int
    order: tuple[int, ...]


def triangulate(g: UndirectedGraph, order: Sequence[int]) -> ChordalResult:
    """Eliminate vertices in ``order``, connecting each vertex's
    not-yet-eliminated neighbours. The width is the largest such
    neighbourhood."""
    order = tuple(order)
    if sorted(order) != g.sorted_vertices():
        raise DecompositionError("ordering is not a permutation of the graph's vertices")
    adj = {v: set(g.neighbors(v)) for v in g.vertices}
    fill = set()
    width = 0
    for v in order:
        nb = adj.pop(v)
        width = max(width, len(nb))
        for a, b in combinations(sorted(nb), 2):
            if b not in adj[a]:
                adj[a].add(b)
                adj[b].add(a)
                fill.add((a, b))
        for a in nb:
            adj[a].discard(v)
    return ChordalResult(g.with_edges(fill), frozenset(fill), width if g.n else 0, order)


def induced_width(g: UndirectedGraph, order: Sequence[int]) -> int:
    return triangulate(g, order).width


def perfect_elimination_ordering(g: UndirectedGraph, rng: random.Random | None = None) -> tuple[int, ...] | None:
    """Maximum cardinality search; returns a perfect elimination ordering
    (first eliminated first) or None if ``g`` is not chordal. ``rng``
    randomises tie-breaking."""
    weight = {v: 0 for v in g.vertices}
    visit = []
    remaining = set(g.vertices)
    while remaining:
        best = max(weight[v] for v in remaining)
        cands = sorted(v for v in remaining if weight[v] == best)
        v = rng.choice(cands) if rng else cands[0]
        remaining.discard(v)
        visit.append(v)
        for w in g.neighbors(v):
            if w in remaining:
                weight[w] += 1
    peo = tuple(reversed(visit))
    if triangulate(g, peo).fill_edges:
        return None
    return peo


def is_chordal(g: UndirectedGraph) -> bool:
    return perfect_elimination_ordering(g) is not None


def max_cliques(c: ChordalResult | UndirectedGraph) -> list[frozenset[int]]:
    """Maximal cliques of a chordal graph, sorted by their sorted tuples."""
    if isinstance(c, ChordalResult):
        g, order = c.graph, c.order
        if triangulate(g, order).fill_edges:
            raise DecompositionError("ordering is not perfect for the filled graph")
    else:
        g = c
        order = perfect_elimination_ordering(g)
        if order is None:
            raise DecompositionError("graph is not chordal")
    pos = {v: i for i, v in enumerate(order)}
    cands = [frozenset({v} | {w for w in g.neighbors(v) if pos[w] > pos[v]}) for v in order]
    cliques = {c for c in cands if not any(c < d for d in cands)}
    return sorted(cliques, key=lambda s: tuple(sorted(s)))


# ---------------------------------------------------------------- join trees

@dataclass(frozen=True)
class JoinTree:
    """Clusters joined by tree edges; a forest when the graph is disconnected.

    ``edges`` are index pairs ``(i, j)`` with ``i < j``; ``bound`` is the
    separator bound of the level that produced the tree (None for a tree
    built directly from cliques).
    """

    clusters: tuple[frozenset[int], ...]
    edges: tuple[tuple[int, int], ...]
    bound: int | None = None
    _adj: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "clusters", tuple(frozenset(c) for c in self.clusters))
        object.__setattr__(self, "edges", tuple(sorted((min(e), max(e)) for e in self.edges)))
        adj = [[] for _ in self.clusters]
        for i, j in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        object.__setattr__(self, "_adj", tuple(tuple(sorted(a)) for a in adj))

    def neighbors(self, i: int) -> tuple[int, ...]:
        return self._adj[i]

    def separator(self, i: int, j: int) -> frozenset[int]:
        return self.clusters[i] & self.clusters[j]

    def separators(self) -> list[frozenset[int]]:
        return [self.separator(i, j) for i, j in self.edges]

    @property
    def separator_width(self) -> int:
        return max((len(s) for s in self.separators()), default=0)

    @property
    def width(self) -> int:
        return max((len(c) for c in self.clusters), default=0) - 1

    @property
    def variables(self) -> frozenset[int]:
        return frozenset().union(*self.clusters) if self.clusters else frozenset()

    def components(self) -> list[list[int]]:
        """Cluster indices per tree component, ordered by smallest index."""
        seen = set()
        comps = []
        for r in range(len(self.clusters)):
            if r in seen:
                continue
            comp = [r]
            seen.add(r)
            for i in comp:
                for j in self._adj[i]:
                    if j not in seen:
                        seen.add(j)
                        comp.append(j)
            comps.append(sorted(comp))
        return comps

    def rooted(self, root: int) -> tuple[list[int], dict[int, int | None]]:
        """BFS order from ``root`` over its component and the parent map."""
        parent: dict[int, int | None] = {root: None}
        order = [root]
        for i in order:
            for j in self._adj[i]:
                if j not in parent:
                    parent[j] = i
                    order.append(j)
        return order, parent

    def first_cluster_containing(self, variables: Iterable[int]) -> int | None:
        vs = frozenset(variables)
        for i, c in enumerate(self.clusters):
            if vs <= c:
                return i
        return None

    def violations(self, g: UndirectedGraph | None = None) -> list[str]:
        """Check the join-tree invariants; returns human-readable problems."""
        problems = []
        if len(self.edges) != len(set(self.edges)):
            problems.append("duplicate tree edge")
        n_comp = len(self.components())
        if len(self.edges) != len(self.clusters) - n_comp:
            problems.append("tree edges contain a cycle")
        for v in sorted(self.variables):
            holding = [i for i, c in enumerate(self.clusters) if v in c]
            reach = {holding[0]}
            stack = [holding[0]]
            while stack:
                i = stack.pop()
                for j in self._adj[i]:
                    if j not in reach and v in self.clusters[j]:
                        reach.add(j)
                        stack.append(j)
            if reach != set(holding):
                problems.append(f"running intersection fails for variable {v}")
        if g is not None:
            for u, v in sorted(g.edges):
                if not any(u in c and v in c for c in self.clusters):
                    problems.append(f"edge ({u}, {v}) not covered by any cluster")
            missing = g.vertices - self.variables
            if missing:
                problems.append(f"vertices {sorted(missing)} not covered")
        return problems

    def is_valid(self, g: UndirectedGraph | None = None) -> bool:
        return not self.violations(g)


def _sort_clusters(clusters: Iterable[frozenset[int]]) -> list[frozenset[int]]:
    return sorted(clusters, key=lambda s: tuple(sorted(s)))


def build_primary_join_tree(cliques: Iterable[Iterable[int]]) -> JoinTree:
    """Maximum-weight spanning forest over pairwise intersection sizes.

    Ties go to the lexicographically smallest cluster pair. Clusters that
    share nothing stay in separate components.
    """
    clusters = _sort_clusters(frozenset(c) for c in cliques)
    cand = []
    for i, j in combinations(range(len(clusters)), 2):
        w = len(clusters[i] & clusters[j])
        if w:
            cand.append((-w, i, j))
    cand.sort()
    uf = list(range(len(clusters)))

    def find(x):
        while uf[x] != x:
            uf[x] = uf[uf[x]]
            x = uf[x]
        return x

    edges = []
    for _, i, j in cand:
        a, b = find(i), find(j)
        if a != b:
            uf[a] = b
            edges.append((i, j))
    return JoinTree(tuple(clusters), tuple(edges))


def merge_join_tree(t: JoinTree, bound: int) -> JoinTree:
    """Collapse every tree edge whose separator is larger than ``bound``,
    then absorb clusters contained in a neighbour."""
    groups = list(range(len(t.clusters)))

    def find(x):
        while groups[x] != x:
            groups[x] = groups[groups[x]]
            x = groups[x]
        return x

    for i, j in t.edges:
        if len(t.separator(i, j)) > bound:
            a, b = find(i), find(j)
            groups[max(a, b)] = min(a, b)
    members: dict[int, set[int]] = {}
    for i, c in enumerate(t.clusters):
        members.setdefault(find(i), set()).update(c)
    clusters = {r: frozenset(vs) for r, vs in members.items()}
    edges = {(find(i), find(j)) for i, j in t.edges if find(i) != find(j)}

    # absorption: a cluster contained in its neighbour is contracted into it
    changed = True
    while changed:
        changed = False
        for a, b in sorted(edges):
            small, big = (a, b) if clusters[a] <= clusters[b] else (b, a)
            if clusters[small] <= clusters[big]:
                edges = {tuple(sorted((big if x == small else x, big if y == small else y))) for x, y in edges}
                edges.discard((big, big))
                del clusters[small]
                changed = True
                break

    roots = sorted(clusters, key=lambda r: tuple(sorted(clusters[r])))
    index = {r: k for k, r in enumerate(roots)}
    return JoinTree(tuple(clusters[r] for r in roots),
                    tuple((index[a], index[b]) for a, b in edges), bound)


def secondary_join_trees(t: JoinTree) -> list[tuple[int, JoinTree]]:
    """One ``(s_i, T_i)`` per distinct separator size, strictly descending.

    The first entry is the primary tree itself. A tree without separators
    yields the single level ``s = 0``.
    """
    sizes = sorted({len(s) for s in t.separators()}, reverse=True)
    if not sizes:
        return [(0, JoinTree(t.clusters, t.edges, 0))]
    return [(s, merge_join_tree(t, s)) for s in sizes]


@dataclass(frozen=True)
class Decomposition:
    """The full decomposition pipeline result for one graph."""

    graph: UndirectedGraph
    chordal: ChordalResult
    cliques: tuple[frozenset[int], ...]
    primary: JoinTree
    levels: tuple[tuple[int, JoinTree], ...]

    @property
    def bounds(self) -> list[int]:
        return [s for s, _ in self.levels]

    def level(self, bound: int | None = None) -> JoinTree:
        """The tree for separator bound ``bound`` (None = primary)."""
        if bound is None:
            return self.levels[0][1]
        for s, tree in self.levels:
            if s == bound:
                return tree
        raise DecompositionError(
            f"separator bound {bound} is not an available level; available: {{{', '.join(map(str, self.bounds))}}}")


def decompose(g: UndirectedGraph, heuristic: str = "min-fill", given: Sequence[int] | None = None) -> Decomposition:
    order = find_ordering(g, heuristic, given)
    chordal = triangulate(g, order)
    cliques = max_cliques(chordal)
    primary = build_primary_join_tree(cliques)
    return Decomposition(g, chordal, tuple(cliques), primary, tuple(secondary_join_trees(primary)))


# ---------------------------------------------------------------- cutsets

@dataclass(frozen=True)
class CycleCutset:
    vertices: frozenset[int]
    exact: bool
    fallback: bool = False  # exact search was requested but over budget

    @property
    def size(self) -> int:
        return len(self.vertices)


def _core(g: UndirectedGraph) -> set[int]:
    """Vertices left after repeatedly stripping vertices of degree <= 1.
    No minimum cycle cutset contains a stripped vertex."""
    deg = {v: g.degree(v) for v in g.vertices}
    alive = set(g.vertices)
    stack = [v for v in g.vertices if deg[v] <= 1]
    while stack:
        v = stack.pop()
        if v not in alive:
            continue
        alive.discard(v)
        for w in g.neighbors(v):
            if w in alive:
                deg[w] -= 1
                if deg[w] == 1:
                    stack.append(w)
    return alive


def _is_forest_without(g: UndirectedGraph, removed: Iterable[int]) -> bool:
    return is_forest(subgraph(g, g.vertices - frozenset(removed)))


def _greedy_cutset(g: UndirectedGraph) -> frozenset[int]:
    cut = []
    h = g
    while True:
        core = _core(h)
        if not core:
            break
        h = subgraph(h, core)
        v = min(core, key=lambda u: (-h.degree(u), u))
        cut.append(v)
        h = subgraph(h, core - {v})
    # drop redundant picks, latest first
    for v in reversed(list(cut)):
        trial = [u for u in cut if u != v]
        if _is_forest_without(g, trial):
            cut = trial
    return frozenset(cut)


def cycle_cutset(g: UndirectedGraph, mode: str = "exact", budget: int = DEFAULT_CUTSET_BUDGET) -> CycleCutset:
    """Vertex set whose removal leaves a forest.

    Exact mode searches subsets of the 2-core in increasing size and
    lexicographic order, so it returns the lexicographically least minimum
    cutset. Graphs whose 2-core exceeds ``budget`` vertices fall back to the
    greedy heuristic (highest degree on the 2-core first), flagged in the
    result.
    """
    if mode not in ("exact", "greedy"):
        raise DecompositionError(f"unknown cutset mode {mode!r}")
    core = sorted(_core(g))
    if not core:
        return CycleCutset(frozenset(), exact=True)
    if mode == "greedy" or len(core) > budget:
        return CycleCutset(_greedy_cutset(g), exact=False, fallback=(mode == "exact"))
    h = subgraph(g, core)
    # a forest on the remaining m vertices has at most m - 1 edges
    for size in range(1, len(core) + 1):
        for cand in combinations(core, size):
            removed = set(cand)
            remaining_edges = sum(1 for u, v in h.edges if u not in removed and v not in removed)
            if remaining_edges > len(core) - size - 1 and len(core) > size:
                continue
            if _is_forest_without(h, cand):
                return CycleCutset(frozenset(cand), exact=True)
    raise AssertionError("unreachable: removing every core vertex leaves a forest")


# ---------------------------------------------------------------- tradeoffs

@dataclass(frozen=True)
class LevelReport:
    index: int
    s: int
    r: int
    c: int
    c_exact: bool
    n_clusters: int
    brute_time: int
    brute_space: int
    cutset_time: int
    cutset_space: int

    @property
    def pairs(self) -> dict[str, tuple[int, int]]:
        return {"brute": (self.brute_time, self.brute_space), "cutset": (self.cutset_time, self.cutset_space)}


def _space_label(s: int) -> str:
    return "linear" if s <= 1 else f"k^{s}"


@dataclass(frozen=True)
class TradeoffReport:
    """Per-level structural parameters and predicted cost exponents.

    Brute-force processing of a cluster is predicted at time exponent
    ``r + 1`` (cluster size) and space exponent ``s``. Conditioning inside
    clusters is predicted at time exponent ``max(c + 2, s)`` and space ``s``.
    """

    levels: tuple[LevelReport, ...]

    def dominating(self) -> list[tuple[int, int]]:
        """Pareto-minimal (time, space) exponent pairs, sorted by time."""
        pairs = {p for lvl in self.levels for p in lvl.pairs.values()}
        front = [p for p in pairs
                 if not any(q != p and q[0] <= p[0] and q[1] <= p[1] for q in pairs)]
        return sorted(front)

    def records(self) -> str:
        lines = []
        for lvl in self.levels:
            lines.append(
                f"level={lvl.index} s={lvl.s} r={lvl.r} c={lvl.c} c_exact={int(lvl.c_exact)} "
                f"clusters={lvl.n_clusters} brute_time={lvl.brute_time} brute_space={lvl.brute_space} "
                f"cutset_time={lvl.cutset_time} cutset_space={lvl.cutset_space}")
        for t, s in self.dominating():
            lines.append(f"dominating time={t} space={s} space_label={_space_label(s)}")
        return "\n".join(lines) + "\n"

    def table(self) -> str:
        head = f"{'level':>5} {'s':>3} {'r':>3} {'c':>3} {'clusters':>8}  {'brute (time, space)':>22}  {'cutset (time, space)':>22}"
        lines = [head, "-" * len(head)]
        for lvl in self.levels:
            c = f"{lvl.c}" + ("" if lvl.c_exact else "~")
            brute = f"(k^{lvl.brute_time}, {_space_label(lvl.brute_space)})"
            cut = f"(k^{lvl.cutset_time}, {_space_label(lvl.cutset_space)})"
            lines.append(f"{'T' + str(lvl.index):>5} {lvl.s:>3} {lvl.r:>3} {c:>3} {lvl.n_clusters:>8}  {brute:>22}  {cut:>22}")
        dom = ", ".join(f"(k^{t}, {_space_label(s)})" for t, s in self.dominating())
        lines.append(f"dominating tradeoffs: {dom}")
        return "\n".join(lines) + "\n"


def max_cluster_cutset(g: UndirectedGraph, t: JoinTree, budget: int = DEFAULT_CUTSET_BUDGET) -> tuple[int, bool]:
    """Largest minimal cycle cutset over the subgraphs induced by clusters."""
    worst, exact = 0, True
    for c in t.clusters:
        cs = cycle_cutset(subgraph(g, c), "exact", budget)
        worst = max(worst, cs.size)
        exact = exact and cs.exact
    return worst, exact


def tradeoff_report(g: UndirectedGraph, levels: Sequence[tuple[int, JoinTree]] | Decomposition,
                    budget: int = DEFAULT_CUTSET_BUDGET) -> TradeoffReport:
    if isinstance(levels, Decomposition):
        levels = levels.levels
    out = []
    for i, (s, t) in enumerate(levels):
        r = t.width
        c, exact = max_cluster_cutset(g, t, budget)
        out.append(LevelReport(i, s, r, c, exact, len(t.clusters), r + 1, s, max(c + 2, s), s))
    return TradeoffReport(tuple(out))


__all__ = [
    "ChordalResult", "CycleCutset", "Decomposition", "DecompositionError", "GraphError",
    "JoinTree", "LevelReport", "TradeoffReport", "build_primary_join_tree", "cycle_cutset",
    "decompose", "find_ordering", "induced_width", "is_chordal", "max_cliques",
    "merge_join_tree", "perfect_elimination_ordering", "secondary_join_trees", "triangulate",
    "tradeoff_report",
]

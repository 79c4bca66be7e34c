"""Directed and undirected graphs over dense integer variable ids.

Graphs are immutable values. Every transform returns a new graph and all
iteration runs in ascending vertex order so results are deterministic.
"""
from __future__ import annotations

from collections.abc import Iterable
from itertools import combinations


class GraphError(ValueError):
    pass


class CycleError(GraphError):
    """Raised when an acyclic graph was required. ``cycle`` is a witness."""

    def __init__(self, message: str, cycle: list[int]):
        super().__init__(message)
        self.cycle = cycle


def _edge(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


class DirectedGraph:
    __slots__ = ("n", "edges", "_parents", "_children")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        edge_list = [tuple(e) for e in edges]
        seen = set()
        for u, v in edge_list:
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise GraphError(f"self-loop on vertex {u}")
            if (u, v) in seen:
                raise GraphError(f"duplicate arc ({u}, {v})")
            seen.add((u, v))
        self.n = n
        self.edges = frozenset(seen)
        parents = [[] for _ in range(n)]
        children = [[] for _ in range(n)]
        for u, v in sorted(seen):
            parents[v].append(u)
            children[u].append(v)
        self._parents = tuple(tuple(sorted(p)) for p in parents)
        self._children = tuple(tuple(sorted(c)) for c in children)

    def parents(self, v: int) -> tuple[int, ...]:
        return self._parents[v]

    def children(self, v: int) -> tuple[int, ...]:
        return self._children[v]

    def family(self, v: int) -> tuple[int, ...]:
        return tuple(sorted((v, *self._parents[v])))

    def find_cycle(self) -> list[int] | None:
        """Return a directed cycle as a vertex list, or None if acyclic."""
        WHITE, GREY, BLACK = 0, 1, 2
        color = [WHITE] * self.n
        for root in range(self.n):
            if color[root] != WHITE:
                continue
            stack = [(root, iter(self._children[root]))]
            path = [root]
            color[root] = GREY
            while stack:
                v, it = stack[-1]
                for w in it:
                    if color[w] == GREY:
                        return path[path.index(w):]
                    if color[w] == WHITE:
                        color[w] = GREY
                        path.append(w)
                        stack.append((w, iter(self._children[w])))
                        break
                else:
                    color[v] = BLACK
                    path.pop()
                    stack.pop()
        return None

    def is_acyclic(self) -> bool:
        return self.find_cycle() is None

    def topological_order(self) -> list[int]:
        cycle = self.find_cycle()
        if cycle is not None:
            raise CycleError("directed graph has a cycle", cycle)
        indeg = [len(p) for p in self._parents]
        ready = [v for v in range(self.n) if indeg[v] == 0]
        order = []
        while ready:
            ready.sort()
            v = ready.pop(0)
            order.append(v)
            for w in self._children[v]:
                indeg[w] -= 1
                if indeg[w] == 0:
                    ready.append(w)
        return order

    def skeleton(self) -> UndirectedGraph:
        return UndirectedGraph(self.n, {_edge(u, v) for u, v in self.edges})

    def __eq__(self, other):
        if not isinstance(other, DirectedGraph):
            return NotImplemented
        return self.n == other.n and self.edges == other.edges

    def __hash__(self):
        return hash((self.n, self.edges))

    def __repr__(self):
        return f"DirectedGraph(n={self.n}, edges={sorted(self.edges)})"


class UndirectedGraph:
    """Simple undirected graph on an explicit vertex set.

    ``vertices`` may be an int ``n`` (meaning ``range(n)``) or any iterable of
    non-negative ids. Edges are stored normalised as ``(min, max)``.
    """

    __slots__ = ("vertices", "edges", "_adj")

    def __init__(self, vertices: int | Iterable[int] = 0, edges: Iterable[tuple[int, int]] = ()):
        if isinstance(vertices, int):
            vertices = range(vertices)
        self.vertices = frozenset(vertices)
        norm = set()
        for e in edges:
            u, v = e
            if u == v:
                raise GraphError(f"self-loop on vertex {u}")
            if u not in self.vertices or v not in self.vertices:
                raise GraphError(f"edge ({u}, {v}) has an endpoint outside the vertex set")
            norm.add(_edge(u, v))
        self.edges = frozenset(norm)
        adj = {v: set() for v in self.vertices}
        for u, v in norm:
            adj[u].add(v)
            adj[v].add(u)
        self._adj = {v: frozenset(s) for v, s in adj.items()}

    @property
    def n(self) -> int:
        return len(self.vertices)

    def sorted_vertices(self) -> list[int]:
        return sorted(self.vertices)

    def neighbors(self, v: int) -> frozenset[int]:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._adj.get(u, ())

    def with_edges(self, extra: Iterable[tuple[int, int]]) -> UndirectedGraph:
        return UndirectedGraph(self.vertices, self.edges | {_edge(u, v) for u, v in extra})

    def __eq__(self, other):
        if not isinstance(other, UndirectedGraph):
            return NotImplemented
        return self.vertices == other.vertices and self.edges == other.edges

    def __hash__(self):
        return hash((self.vertices, self.edges))

    def __repr__(self):
        return f"UndirectedGraph(vertices={sorted(self.vertices)}, edges={sorted(self.edges)})"


def moralize(g: DirectedGraph) -> UndirectedGraph:
    """Marry the parents of every child and drop arc directions."""
    cycle = g.find_cycle()
    if cycle is not None:
        raise CycleError(f"cannot moralize a cyclic graph (cycle {cycle})", cycle)
    edges = {_edge(u, v) for u, v in g.edges}
    for v in range(g.n):
        edges.update(combinations(g.parents(v), 2))
    return UndirectedGraph(g.n, edges)


def _clique_edges(scopes: Iterable[Iterable[int]]) -> set[tuple[int, int]]:
    edges = set()
    for scope in scopes:
        edges.update(combinations(sorted(set(scope)), 2))
    return edges


def augment(g: UndirectedGraph, scopes: Iterable[Iterable[int]]) -> UndirectedGraph:
    """Add a clique over each scope."""
    scopes = [tuple(s) for s in scopes]
    for s in scopes:
        unknown = [v for v in s if v not in g.vertices]
        if unknown:
            raise GraphError(f"scope {s} mentions unknown variables {unknown}")
    return g.with_edges(_clique_edges(scopes))


def primal_graph(scopes: Iterable[Iterable[int]], n: int) -> UndirectedGraph:
    scopes = [tuple(s) for s in scopes]
    for s in scopes:
        if not s:
            raise GraphError("empty constraint scope")
        if any(not 0 <= v < n for v in s):
            raise GraphError(f"scope {s} out of range for n={n}")
    return UndirectedGraph(n, _clique_edges(scopes))


def subgraph(g: UndirectedGraph, vertices: Iterable[int]) -> UndirectedGraph:
    keep = frozenset(vertices)
    missing = keep - g.vertices
    if missing:
        raise GraphError(f"vertices {sorted(missing)} not in graph")
    return UndirectedGraph(keep, (e for e in g.edges if e[0] in keep and e[1] in keep))


def connected_components(g: UndirectedGraph) -> list[frozenset[int]]:
    """Components ordered by their smallest vertex."""
    seen = set()
    comps = []
    for root in g.sorted_vertices():
        if root in seen:
            continue
        comp = {root}
        stack = [root]
        while stack:
            v = stack.pop()
            for w in g.neighbors(v):
                if w not in comp:
                    comp.add(w)
                    stack.append(w)
        seen |= comp
        comps.append(frozenset(comp))
    return comps


def find_cycle(g: UndirectedGraph) -> list[int] | None:
    """Return the vertices of some cycle, or None if ``g`` is a forest."""
    parent: dict[int, int | None] = {}
    for root in g.sorted_vertices():
        if root in parent:
            continue
        parent[root] = None
        stack = [root]
        while stack:
            v = stack.pop()
            for w in sorted(g.neighbors(v)):
                if w == parent[v]:
                    continue
                if w in parent:
                    # back edge v-w closes a cycle through their tree paths
                    path_v = [v]
                    while path_v[-1] is not None:
                        path_v.append(parent[path_v[-1]])
                    path_w = [w]
                    while path_w[-1] is not None:
                        path_w.append(parent[path_w[-1]])
                    anc_w = set(path_w)
                    cycle = []
                    for x in path_v:
                        cycle.append(x)
                        if x in anc_w:
                            break
                    meet = cycle[-1]
                    tail = path_w[: path_w.index(meet)]
                    return cycle + tail[::-1]
                parent[w] = v
                stack.append(w)
    return None


def is_cyclic(g: UndirectedGraph) -> bool:
    # A simple graph is a forest iff |E| = |V| - #components.
    return len(g.edges) != g.n - len(connected_components(g))


def is_forest(g: UndirectedGraph) -> bool:
    return not is_cyclic(g)


def remove_vertices(g: UndirectedGraph, vertices: Iterable[int]) -> UndirectedGraph:
    return subgraph(g, g.vertices - frozenset(vertices))


def biconnected_components(g: UndirectedGraph) -> tuple[list[frozenset[int]], frozenset[int]]:
    """Hopcroft-Tarjan biconnected components.

    Returns ``(components, articulation_points)``. Each component is the
    vertex set of a maximal 2-connected block (a bridge counts as a block of
    two vertices). Isolated vertices belong to no component. Components are
    ordered by their sorted vertex tuples.
    """
    disc: dict[int, int] = {}
    low: dict[int, int] = {}
    comps: list[frozenset[int]] = []
    arts: set[int] = set()
    counter = 0
    for root in g.sorted_vertices():
        if root in disc or not g.neighbors(root):
            continue
        disc[root] = low[root] = counter
        counter += 1
        edge_stack: list[tuple[int, int]] = []
        root_children = 0
        stack = [(root, None, iter(sorted(g.neighbors(root))))]
        while stack:
            v, par, it = stack[-1]
            advanced = False
            for w in it:
                if w == par:
                    continue
                if w not in disc:
                    disc[w] = low[w] = counter
                    counter += 1
                    edge_stack.append((v, w))
                    stack.append((w, v, iter(sorted(g.neighbors(w)))))
                    advanced = True
                    break
                if disc[w] < disc[v]:
                    edge_stack.append((v, w))
                    low[v] = min(low[v], disc[w])
            if advanced:
                continue
            stack.pop()
            if par is None:
                continue
            low[par] = min(low[par], low[v])
            if low[v] >= disc[par]:
                if par == root:
                    root_children += 1
                else:
                    arts.add(par)
                comp = set()
                while True:
                    a, b = edge_stack.pop()
                    comp.update((a, b))
                    if (a, b) == (par, v):
                        break
                comps.append(frozenset(comp))
        if root_children > 1:
            arts.add(root)
    comps.sort(key=lambda c: tuple(sorted(c)))
    return comps, frozenset(arts)

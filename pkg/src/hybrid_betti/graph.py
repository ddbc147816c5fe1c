"""Graph representation, edge-list ingestion and structural statistics.

Vertices are dense integer ids ``0..n-1``.  The graph is the 1-skeleton of a
clique complex, so isolated vertices are meaningful (they are 0-simplices)
and can be declared with a ``# n=<count>`` header line.
"""

from __future__ import annotations

import heapq
import math
import re
from dataclasses import dataclass, field
from typing import Iterable


class GraphError(ValueError):
    """Raised for malformed graph input."""


class EdgeListParseError(GraphError):
    def __init__(self, lineno: int, line: str, reason: str):
        self.lineno = lineno
        self.line = line
        super().__init__(f"line {lineno}: {reason}: {line!r}")


_HEADER = re.compile(r"^#\s*n\s*=\s*(\d+)\s*$")


@dataclass(frozen=True)
class Graph:
    """Immutable simple undirected graph on vertices ``0..n-1``."""

    n: int
    edges: frozenset[tuple[int, int]]
    adjacency: tuple[tuple[int, ...], ...] = field(repr=False, compare=False)

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[int, int]], n: int | None = None) -> "Graph":
        canon = set()
        top = -1
        for u, v in edges:
            u, v = int(u), int(v)
            if u < 0 or v < 0:
                raise GraphError(f"negative vertex id in edge ({u}, {v})")
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            canon.add((u, v) if u < v else (v, u))
            top = max(top, u, v)
        if n is None:
            n = top + 1
        elif n <= top:
            raise GraphError(f"declared n={n} but vertex id {top} present")
        nbrs: list[list[int]] = [[] for _ in range(n)]
        for u, v in canon:
            nbrs[u].append(v)
            nbrs[v].append(u)
        adjacency = tuple(tuple(sorted(a)) for a in nbrs)
        return cls(n=n, edges=frozenset(canon), adjacency=adjacency)

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls.from_edges((), n=n)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    @property
    def max_degree(self) -> int:
        return max((len(a) for a in self.adjacency), default=0)

    def has_edge(self, u: int, v: int) -> bool:
        return (u, v) in self.edges if u < v else (v, u) in self.edges

    def neighbor_sets(self) -> list[frozenset[int]]:
        return [frozenset(a) for a in self.adjacency]

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def remove_vertex(self, v: int) -> "Graph":
        """Graph with all edges at ``v`` dropped; ids are kept so ``v`` stays isolated."""
        return Graph.from_edges((e for e in self.edges if v not in e), n=self.n)

    def to_edge_list(self) -> str:
        lines = [f"# n={self.n}"]
        lines.extend(f"{u} {v}" for u, v in self.sorted_edges())
        return "\n".join(lines) + "\n"


def parse_edge_list(text: str) -> Graph:
    """Parse the line-oriented edge-list format.

    Blank lines and lines starting with ``#`` are ignored, except a
    ``# n=<count>`` header which fixes the vertex count.  Duplicate edges are
    collapsed; self-loops are rejected.
    """
    declared_n = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            m = _HEADER.match(line)
            if m:
                declared_n = int(m.group(1))
            continue
        parts = line.split()
        if len(parts) != 2 or not all(p.isdigit() for p in parts):
            raise EdgeListParseError(lineno, raw, "expected two nonnegative integers")
        u, v = int(parts[0]), int(parts[1])
        if u == v:
            raise EdgeListParseError(lineno, raw, "self-loop")
        edges.append((u, v))
    return Graph.from_edges(edges, n=declared_n)


def read_edge_list(path) -> Graph:
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_edge_list(fh.read())


@dataclass(frozen=True)
class GraphStats:
    max_degree: int
    degeneracy: int
    degeneracy_order: tuple[int, ...]
    arboricity_lower: int
    arboricity_upper: int


def degeneracy_ordering(g: Graph) -> tuple[int, tuple[int, ...]]:
    """Exact degeneracy by min-degree peeling (heap, O(|E| log n)).

    Returns ``(d, order)`` where ``order`` is the removal order.  Every vertex
    has at most ``d`` neighbours removed after it.
    """
    n = g.n
    if n == 0:
        return 0, ()
    deg = [len(a) for a in g.adjacency]
    # lazy-deletion heap; ties broken by smallest id for a deterministic order
    heap = [(dv, v) for v, dv in enumerate(deg)]
    heapq.heapify(heap)
    removed = [False] * n
    order = []
    d = 0
    while heap:
        dv, v = heapq.heappop(heap)
        if removed[v] or dv != deg[v]:
            continue
        d = max(d, dv)
        removed[v] = True
        order.append(v)
        for u in g.adjacency[v]:
            if not removed[u]:
                deg[u] -= 1
                heapq.heappush(heap, (deg[u], u))
    return d, tuple(order)


def _first_fit_forests(g: Graph, order: tuple[int, ...]) -> int:
    """Forests used by a first-fit edge partition along ``order``."""
    pos = {v: i for i, v in enumerate(order)}
    edges = sorted(g.edges, key=lambda e: (max(pos[e[0]], pos[e[1]]), min(pos[e[0]], pos[e[1]])))
    forests: list[list[int]] = []

    def find(parent, x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in edges:
        for parent in forests:
            ru, rv = find(parent, u), find(parent, v)
            if ru != rv:
                parent[ru] = rv
                break
        else:
            parent = list(range(g.n))
            parent[find(parent, u)] = find(parent, v)
            forests.append(parent)
    return len(forests)


def _dfs_forest_peel(g: Graph) -> int:
    """Forests used when repeatedly removing a DFS spanning forest of the remaining edges.

    DFS trees tend to be long paths, which peels dense pieces (e.g. K_n) into
    close to ``ceil(n / 2)`` forests.
    """
    rem = [set(a) for a in g.adjacency]
    count = 0
    while any(rem):
        count += 1
        seen = [False] * g.n
        for s in range(g.n):
            if seen[s] or not rem[s]:
                continue
            seen[s] = True
            stack = [s]
            while stack:
                v = stack[-1]
                nxt = min((u for u in rem[v] if not seen[u]), default=None)
                if nxt is None:
                    stack.pop()
                    continue
                seen[nxt] = True
                rem[v].discard(nxt)
                rem[nxt].discard(v)
                stack.append(nxt)
    return count


def arboricity_bounds(g: Graph, order: tuple[int, ...] | None = None) -> tuple[int, int]:
    """Lower and upper bounds bracketing the arboricity.

    The lower bound is the Nash-Williams density ``ceil(|E(H)| / (|V(H)| - 1))``
    maximised over the whole graph and the suffix subgraphs of the degeneracy
    ordering.  The upper bound is the smallest of the max degree, the
    degeneracy and two constructive forest partitions (first-fit and DFS
    peeling).  Both ends are valid bounds; exact arboricity is not computed.
    """
    if g.n < 2:
        raise GraphError("arboricity bounds need at least two vertices")
    if g.num_edges == 0:
        return 0, 0
    d, peel = degeneracy_ordering(g)
    if order is None:
        order = peel
    lower = math.ceil(g.num_edges / (g.n - 1))
    # walk the peeling backwards, growing the suffix subgraph one vertex at a time
    alive: set[int] = set()
    m = 0
    for v in reversed(peel):
        m += sum(1 for u in g.adjacency[v] if u in alive)
        alive.add(v)
        if len(alive) >= 2:
            lower = max(lower, math.ceil(m / (len(alive) - 1)))
    upper = min(g.max_degree, d, _first_fit_forests(g, order), _dfs_forest_peel(g))
    return lower, upper


def graph_stats(g: Graph) -> GraphStats:
    d, order = degeneracy_ordering(g)
    if g.n >= 2:
        lo, hi = arboricity_bounds(g, order)
    else:
        lo = hi = 0
    return GraphStats(
        max_degree=g.max_degree,
        degeneracy=d,
        degeneracy_order=order,
        arboricity_lower=lo,
        arboricity_upper=hi,
    )


def later_neighbor_counts(g: Graph, order: Iterable[int]) -> list[int]:
    pos = {v: i for i, v in enumerate(order)}
    return [sum(1 for u in g.adjacency[v] if pos[u] > pos[v]) for v in range(g.n)]

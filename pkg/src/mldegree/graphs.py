"""Simple undirected graphs, chordality, clique trees and the model index sets."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

Pair = tuple[int, int]


def _pair(i: int, j: int) -> Pair:
    return (i, j) if i <= j else (j, i)


@dataclass(frozen=True)
class Graph:
    """Simple graph on vertices ``0..n-1``; edges stored as sorted pairs."""

    n: int
    edges: frozenset[Pair] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("vertex count must be >= 0")
        clean = set()
        for e in self.edges:
            i, j = e
            if i == j:
                raise ValueError(f"loop at vertex {i}")
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise ValueError(f"edge {e} out of range for n={self.n}")
            clean.add(_pair(i, j))
        object.__setattr__(self, "edges", frozenset(clean))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Iterable[int]]) -> Graph:
        return cls(n, frozenset(tuple(e) for e in edges))

    def has_edge(self, i: int, j: int) -> bool:
        return _pair(i, j) in self.edges

    def neighbors(self, v: int) -> set[int]:
        return {j if i == v else i for i, j in self.edges if v in (i, j)}

    def sorted_edges(self) -> list[Pair]:
        return sorted(self.edges)

    def non_edges(self) -> list[Pair]:
        """Off-diagonal pairs that are not edges, in lexicographic order."""
        return [(i, j) for i, j in itertools.combinations(range(self.n), 2)
                if (i, j) not in self.edges]

    def is_connected(self) -> bool:
        if self.n == 0:
            return True
        seen, stack = {0}, [0]
        adj = self.adjacency()
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.n

    def adjacency(self) -> list[set[int]]:
        adj: list[set[int]] = [set() for _ in range(self.n)]
        for i, j in self.edges:
            adj[i].add(j)
            adj[j].add(i)
        return adj

    def to_json(self) -> dict:
        return {"n": self.n, "edges": [list(e) for e in self.sorted_edges()]}

    @classmethod
    def from_json(cls, obj) -> Graph:
        if isinstance(obj, str):
            obj = json.loads(obj)
        if not isinstance(obj, dict) or "n" not in obj or "edges" not in obj:
            raise ValueError('graph JSON must be an object with "n" and "edges"')
        return cls.from_edges(int(obj["n"]), obj["edges"])


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise ValueError(f"cycle needs n >= 3, got {n}")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, itertools.combinations(range(n), 2))


def star_graph(n: int) -> Graph:
    """Vertex 0 joined to ``1..n-1``."""
    return Graph.from_edges(n, [(0, i) for i in range(1, n)])


def empty_graph(n: int) -> Graph:
    return Graph(n)


def add_pendant(g: Graph, attach: int = 0) -> Graph:
    """Append vertex ``g.n`` joined only to ``attach``."""
    return Graph.from_edges(g.n + 1, list(g.edges) + [(attach, g.n)])


_NAMED = {
    "cycle": cycle_graph,
    "path": path_graph,
    "complete": complete_graph,
    "star": star_graph,
    "empty": empty_graph,
}


def parse_graph(source: str) -> Graph:
    """``cycle:N`` (also ``path``, ``complete``, ``star``, ``empty``) or a JSON file path."""
    kind, sep, arg = source.partition(":")
    if sep and kind in _NAMED:
        try:
            n = int(arg)
        except ValueError:
            raise ValueError(f"bad vertex count in {source!r}") from None
        return _NAMED[kind](n)
    path = Path(source)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ValueError(f"cannot read graph file {source!r}: {exc}") from None
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"{source}: line {exc.lineno}: {exc.msg}") from None
    return Graph.from_json(obj)


def induced_subgraph(g: Graph, keep: Iterable[int]) -> Graph:
    """Subgraph on ``keep``, relabelled ``0..k-1`` preserving vertex order."""
    keep = sorted(set(keep))
    if not keep:
        raise ValueError("induced subgraph needs at least one vertex")
    if keep[0] < 0 or keep[-1] >= g.n:
        raise ValueError("vertices out of range")
    index = {v: k for k, v in enumerate(keep)}
    edges = [(index[i], index[j]) for i, j in g.edges if i in index and j in index]
    return Graph.from_edges(len(keep), edges)


def remove_vertex(g: Graph, v: int) -> Graph:
    return induced_subgraph(g, [u for u in range(g.n) if u != v])


# ---------------------------------------------------------------------------
# Chordality


def maximum_cardinality_search(g: Graph) -> list[int]:
    """Visit order of MCS; its reverse is a perfect elimination ordering iff g is chordal."""
    adj = g.adjacency()
    weight = [0] * g.n
    visited = [False] * g.n
    order = []
    for _ in range(g.n):
        # ties broken by smallest label for reproducible certificates
        v = max((u for u in range(g.n) if not visited[u]), key=lambda u: (weight[u], -u))
        visited[v] = True
        order.append(v)
        for w in adj[v]:
            if not visited[w]:
                weight[w] += 1
    return order


def is_perfect_elimination_ordering(g: Graph, order: list[int]) -> bool:
    """For every v, its neighbours later in ``order`` must form a clique."""
    pos = {v: k for k, v in enumerate(order)}
    adj = g.adjacency()
    for v in order:
        later = [w for w in adj[v] if pos[w] > pos[v]]
        if not later:
            continue
        # checking against the earliest later neighbour suffices (Tarjan-Yannakakis)
        parent = min(later, key=pos.__getitem__)
        if any(w != parent and w not in adj[parent] for w in later):
            return False
    return True


@dataclass(frozen=True)
class ChordalityResult:
    chordal: bool
    ordering: list[int] | None  # perfect elimination ordering when chordal

    def __bool__(self):
        return self.chordal


def is_chordal(g: Graph) -> ChordalityResult:
    peo = maximum_cardinality_search(g)[::-1]
    if is_perfect_elimination_ordering(g, peo):
        return ChordalityResult(True, peo)
    return ChordalityResult(False, None)


@dataclass(frozen=True)
class CliqueTree:
    cliques: list[frozenset[int]]
    separators: list[frozenset[int]]
    tree_edges: list[tuple[int, int]]  # tree_edges[k] is joined by separators[k]

    def has_running_intersection(self) -> bool:
        """Every vertex's cliques form a connected subtree."""
        vertices = set().union(*self.cliques) if self.cliques else set()
        for v in vertices:
            holding = {k for k, c in enumerate(self.cliques) if v in c}
            sub = [(a, b) for a, b in self.tree_edges if a in holding and b in holding]
            if len(sub) != len(holding) - 1:
                return False
        return True


def clique_decomposition(g: Graph) -> CliqueTree:
    """Maximal cliques of a chordal graph joined into a clique tree.

    The tree is a maximum-weight spanning tree of the clique intersection
    graph, which satisfies running intersection for chordal graphs.
    """
    res = is_chordal(g)
    if not res.chordal:
        raise ValueError("clique decomposition requires a chordal graph")
    peo = res.ordering
    pos = {v: k for k, v in enumerate(peo)}
    adj = g.adjacency()
    candidates = [frozenset([v] + [w for w in adj[v] if pos[w] > pos[v]]) for v in peo]
    cliques: list[frozenset[int]] = []
    for c in sorted(candidates, key=lambda c: (-len(c), sorted(c))):
        if not any(c <= d for d in cliques):
            cliques.append(c)
    cliques.sort(key=lambda c: sorted(c))

    # Kruskal on intersection sizes; zero-weight edges join components.
    pairs = sorted(itertools.combinations(range(len(cliques)), 2),
                   key=lambda ab: (-len(cliques[ab[0]] & cliques[ab[1]]), ab))
    root = list(range(len(cliques)))

    def find(a):
        while root[a] != a:
            root[a] = root[root[a]]
            a = root[a]
        return a

    tree_edges, separators = [], []
    for a, b in pairs:
        ra, rb = find(a), find(b)
        if ra != rb:
            root[ra] = rb
            tree_edges.append((a, b))
            separators.append(cliques[a] & cliques[b])
    return CliqueTree(cliques, separators, tree_edges)


# ---------------------------------------------------------------------------
# Coordinates of L_G and its orthogonal complement


@dataclass(frozen=True)
class ModelSpace:
    graph: Graph
    support: list[Pair]      # diagonal pairs then edges
    co_support: list[Pair]   # non-edges


def model_space(g: Graph) -> ModelSpace:
    support = [(i, i) for i in range(g.n)] + g.sorted_edges()
    return ModelSpace(g, support, g.non_edges())

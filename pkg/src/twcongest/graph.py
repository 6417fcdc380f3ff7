"""Undirected simple graphs with dense integer IDs, subgraph views and replicated networks."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence


class GraphFormatError(ValueError):
    """Raised when an edge-list file is malformed. `line` is 1-based."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class Graph:
    n: int
    adjacency: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.adjacency) != self.n:
            raise ValueError("adjacency length does not match n")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        if n < 0:
            raise ValueError("n must be non-negative")
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range")
            if v in nbrs[u]:
                raise ValueError(f"duplicate edge ({u}, {v})")
            nbrs[u].add(v)
            nbrs[v].add(u)
        return cls(n, tuple(tuple(sorted(s)) for s in nbrs))

    @classmethod
    def from_adjacency(cls, adj: Mapping[int, Iterable[int]] | Sequence[Iterable[int]]) -> "Graph":
        items = adj.items() if isinstance(adj, Mapping) else enumerate(adj)
        edges = set()
        n = 0
        for u, vs in items:
            n = max(n, u + 1)
            for v in vs:
                n = max(n, v + 1)
                edges.add((min(u, v), max(u, v)))
        return cls.from_edges(n, sorted(edges))

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def has_edge(self, u: int, v: int) -> bool:
        nb = self.adjacency[u]
        # neighbor tuples are short; bisect is not worth it
        return v in nb

    def nodes(self) -> range:
        return range(self.n)

    def edges(self) -> Iterator[tuple[int, int]]:
        for u, nb in enumerate(self.adjacency):
            for v in nb:
                if u < v:
                    yield (u, v)

    @property
    def m(self) -> int:
        return sum(len(nb) for nb in self.adjacency) // 2

    def closed_neighborhood(self, nodes: Iterable[int]) -> set[int]:
        out = set(nodes)
        for v in list(out):
            out.update(self.adjacency[v])
        return out

    def open_neighborhood(self, nodes: Iterable[int]) -> set[int]:
        s = set(nodes)
        return self.closed_neighborhood(s) - s

    def induced(self, members: Iterable[int]) -> "SubgraphView":
        return SubgraphView(self, frozenset(members))

    def bfs_distances(self, source: int, allowed: set[int] | frozenset[int] | None = None) -> dict[int, int]:
        dist = {source: 0}
        q = deque([source])
        while q:
            u = q.popleft()
            for w in self.adjacency[u]:
                if w not in dist and (allowed is None or w in allowed):
                    dist[w] = dist[u] + 1
                    q.append(w)
        return dist

    def diameter(self) -> int:
        best = 0
        for v in range(self.n):
            d = self.bfs_distances(v)
            if len(d) != self.n:
                raise ValueError("graph is disconnected")
            best = max(best, max(d.values()))
        return best

    def is_connected(self) -> bool:
        return self.n == 0 or len(self.bfs_distances(0)) == self.n


def parse_graph(text: str | bytes) -> Graph:
    if isinstance(text, bytes):
        text = text.decode()
    header = None
    n = m = 0
    seen: set[tuple[int, int]] = set()
    edges: list[tuple[int, int]] = []
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if header is None:
            if len(parts) != 2:
                raise GraphFormatError("header must be 'n m'", lineno)
            try:
                n, m = int(parts[0]), int(parts[1])
            except ValueError:
                raise GraphFormatError("header must contain two integers", lineno) from None
            if n < 0 or m < 0:
                raise GraphFormatError("negative count in header", lineno)
            header = lineno
            continue
        if len(parts) != 2:
            raise GraphFormatError("edge line must be 'u v'", lineno)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFormatError("edge endpoints must be integers", lineno) from None
        if u == v:
            raise GraphFormatError(f"self-loop at node {u}", lineno)
        if not (0 <= u < n and 0 <= v < n):
            raise GraphFormatError(f"endpoint out of range in edge ({u}, {v})", lineno)
        key = (min(u, v), max(u, v))
        if key in seen:
            raise GraphFormatError(f"duplicate edge {key}", lineno)
        seen.add(key)
        edges.append(key)
    if header is None:
        raise GraphFormatError("missing header")
    if len(edges) != m:
        raise GraphFormatError(f"header declares {m} edges, found {len(edges)}")
    return Graph.from_edges(n, edges)


def serialize_graph(g: Graph) -> str:
    lines = [f"{g.n} {g.m}"]
    lines.extend(f"{u} {v}" for u, v in g.edges())
    return "\n".join(lines) + "\n"


def read_graph(path) -> Graph:
    with open(path, "rb") as fh:
        return parse_graph(fh.read())


def write_graph(g: Graph, path) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(serialize_graph(g))


@dataclass(frozen=True)
class SubgraphView:
    """Either the induced subgraph G[members] or an explicit edge subset on members."""

    base: Graph
    members: frozenset[int]
    edge_set: frozenset[tuple[int, int]] | None = None

    def __post_init__(self):
        for v in self.members:
            if not 0 <= v < self.base.n:
                raise ValueError(f"member {v} is not a node of the base graph")
        if self.edge_set is not None:
            for u, v in self.edge_set:
                if u not in self.members or v not in self.members:
                    raise ValueError(f"edge ({u}, {v}) leaves the member set")
                if not self.base.has_edge(u, v):
                    raise ValueError(f"edge ({u}, {v}) is not in the base graph")

    @property
    def induced(self) -> bool:
        return self.edge_set is None

    @classmethod
    def from_edges(cls, base: Graph, edges: Iterable[tuple[int, int]], members: Iterable[int] = ()) -> "SubgraphView":
        es = frozenset((min(u, v), max(u, v)) for u, v in edges)
        mem = set(members)
        for u, v in es:
            mem.add(u)
            mem.add(v)
        return cls(base, frozenset(mem), es)

    def neighbors(self, v: int) -> list[int]:
        if self.edge_set is None:
            return [w for w in self.base.adjacency[v] if w in self.members]
        return [w for w in self.base.adjacency[v] if (min(v, w), max(v, w)) in self.edge_set]

    def adjacency(self) -> dict[int, list[int]]:
        return {v: self.neighbors(v) for v in sorted(self.members)}

    def edges(self) -> list[tuple[int, int]]:
        if self.edge_set is not None:
            return sorted(self.edge_set)
        return [(u, v) for u in sorted(self.members) for v in self.base.adjacency[u] if u < v and v in self.members]

    def without(self, nodes: Iterable[int]) -> "SubgraphView":
        drop = set(nodes)
        if self.edge_set is None:
            return SubgraphView(self.base, self.members - drop)
        return SubgraphView(self.base, self.members - drop,
                            frozenset(e for e in self.edge_set if e[0] not in drop and e[1] not in drop))


def connected_components(view: SubgraphView) -> list[list[int]]:
    seen: set[int] = set()
    comps = []
    for start in sorted(view.members):
        if start in seen:
            continue
        seen.add(start)
        comp = [start]
        q = deque([start])
        while q:
            u = q.popleft()
            for w in view.neighbors(u):
                if w not in seen:
                    seen.add(w)
                    comp.append(w)
                    q.append(w)
        comps.append(sorted(comp))
    return comps


def components_of(g: Graph, members: Iterable[int]) -> list[list[int]]:
    """Components of G[members], ordered by smallest ID."""
    return connected_components(SubgraphView(g, frozenset(members)))


@dataclass(frozen=True)
class ReplicatedGraph:
    """G^ell: every node v becomes a clique v^1..v^ell; base edges become complete bipartite joins.

    Replicated node (v, i) with i in 1..ell has ID v*ell + (i-1).
    """

    base: Graph
    ell: int
    graph: Graph = field(repr=False)

    def node_id(self, v: int, copy: int) -> int:
        if not 1 <= copy <= self.ell:
            raise ValueError(f"copy index {copy} outside 1..{self.ell}")
        return v * self.ell + copy - 1

    def host(self, rid: int) -> int:
        return rid // self.ell

    def copy_index(self, rid: int) -> int:
        return rid % self.ell + 1

    @property
    def n(self) -> int:
        return self.graph.n


def replicate(g: Graph, ell: int) -> ReplicatedGraph:
    if ell < 1:
        raise ValueError("replication factor must be at least 1")
    edges = []
    for v in range(g.n):
        base = v * ell
        for a in range(ell):
            for b in range(a + 1, ell):
                edges.append((base + a, base + b))
    for u, v in g.edges():
        for a in range(ell):
            for b in range(ell):
                edges.append((u * ell + a, v * ell + b))
    return ReplicatedGraph(g, ell, Graph.from_edges(g.n * ell, edges))


@dataclass(frozen=True)
class SelectiveReplica:
    """G^+: node v gets copies[v] copies (default 1), wired like G^ell."""

    base: Graph
    copies: tuple[int, ...]
    graph: Graph = field(repr=False)
    offsets: tuple[int, ...] = field(repr=False)

    def node_id(self, v: int, copy: int = 1) -> int:
        if not 1 <= copy <= self.copies[v]:
            raise ValueError(f"node {v} has no copy {copy}")
        return self.offsets[v] + copy - 1

    def host(self, rid: int) -> int:
        # offsets are increasing, so binary search
        lo, hi = 0, len(self.offsets) - 1
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if self.offsets[mid] <= rid:
                lo = mid
            else:
                hi = mid - 1
        return lo


def selective_replicate(g: Graph, copies: Mapping[int, int]) -> SelectiveReplica:
    counts = tuple(int(copies.get(v, 1)) for v in range(g.n))
    if any(c < 1 for c in counts):
        raise ValueError("every node needs at least one copy")
    offsets = []
    total = 0
    for c in counts:
        offsets.append(total)
        total += c
    edges = []
    for v in range(g.n):
        o = offsets[v]
        for a in range(counts[v]):
            for b in range(a + 1, counts[v]):
                edges.append((o + a, o + b))
    for u, v in g.edges():
        for a in range(counts[u]):
            for b in range(counts[v]):
                edges.append((offsets[u] + a, offsets[v] + b))
    return SelectiveReplica(g, counts, Graph.from_edges(total, edges), tuple(offsets))


def relabel(g: Graph, perm: Sequence[int]) -> Graph:
    """Graph with node v renamed to perm[v]."""
    return Graph.from_edges(g.n, [(perm[u], perm[v]) for u, v in g.edges()])


def induced_graph(g: Graph, members: Iterable[int]) -> tuple[Graph, list[int]]:
    """Materialize G[members] with dense IDs; also returns new-ID -> old-ID."""
    order = sorted(set(members))
    index = {v: i for i, v in enumerate(order)}
    edges = [(index[u], index[v]) for u in order for v in g.adjacency[u] if v in index and u < v]
    return Graph.from_edges(len(order), edges), order

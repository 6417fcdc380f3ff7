"""Deterministic graph families for the test corpus.

k-trees keep their construction decomposition as a certificate of treewidth <= k.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .decomposition import TreeDecomposition
from .graph import Graph, relabel

FAMILIES = ("path", "cycle", "grid", "ktree", "partial_ktree", "clique", "tree", "random")


@dataclass
class Generated:
    graph: Graph
    certificate: TreeDecomposition | None = None


def path(n: int) -> Graph:
    if n < 1:
        raise ValueError("path needs n >= 1")
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle(n: int) -> Graph:
    if n < 3:
        raise ValueError("cycle needs n >= 3")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def grid(rows: int, cols: int) -> Graph:
    if rows < 1 or cols < 1:
        raise ValueError("grid needs positive dimensions")
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1))
            if r + 1 < rows:
                edges.append((v, v + cols))
    return Graph.from_edges(rows * cols, edges)


def clique(n: int) -> Graph:
    if n < 1:
        raise ValueError("clique needs n >= 1")
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def random_tree(n: int, seed: int = 0) -> Graph:
    rng = random.Random(seed)
    return Graph.from_edges(n, [(rng.randrange(i), i) for i in range(1, n)])


def random_connected(n: int, p: float, seed: int = 0) -> Graph:
    """Random spanning tree plus each remaining pair with probability p."""
    rng = random.Random(seed)
    edges = {(rng.randrange(i), i) for i in range(1, n)}
    for i in range(n):
        for j in range(i + 1, n):
            if (i, j) not in edges and rng.random() < p:
                edges.add((i, j))
    perm = list(range(n))
    rng.shuffle(perm)
    return relabel(Graph.from_edges(n, sorted(edges)), perm)


def ktree(k: int, n: int, seed: int = 0) -> Generated:
    """Random k-tree on n >= k+1 nodes, labels shuffled, with its clique-tree decomposition."""
    return _ktree(k, n, 0.0, seed)


def partial_ktree(k: int, n: int, p: float, seed: int = 0) -> Generated:
    """Random k-tree with each edge dropped with probability p, keeping a spanning tree's edges
    so the result stays connected."""
    return _ktree(k, n, p, seed)


def _ktree(k: int, n: int, p: float, seed: int) -> Generated:
    if k < 1 or n < k + 1:
        raise ValueError("k-tree needs k >= 1 and n >= k+1")
    if not 0.0 <= p <= 1.0:
        raise ValueError("drop probability must lie in [0, 1]")
    rng = random.Random(seed)
    edges = {(i, j) for i in range(k + 1) for j in range(i + 1, k + 1)}
    cliques = [tuple(range(k + 1))]
    bags = {0: frozenset(range(k + 1))}
    tree_edges = []
    attach_edge = {}
    for v in range(k + 1, n):
        ci = rng.randrange(len(cliques))
        base = cliques[ci]
        drop = rng.randrange(k + 1)
        face = tuple(x for i, x in enumerate(base) if i != drop)
        for u in face:
            edges.add((u, v))
        attach_edge[v] = (face[rng.randrange(k)], v)
        new = tuple(sorted(face + (v,)))
        cliques.append(new)
        b = len(bags)
        bags[b] = frozenset(new)
        tree_edges.append((ci, b))
    if p > 0:
        keep = {(a, b) for a, b in ((min(x, y), max(x, y)) for x, y in attach_edge.values())}
        # initial clique: keep a path so the seed clique stays connected
        keep.update((i, i + 1) for i in range(k))
        edges = {e for e in sorted(edges) if e in keep or rng.random() >= p}
    perm = list(range(n))
    rng.shuffle(perm)
    g = relabel(Graph.from_edges(n, sorted(edges)), perm)
    cert = TreeDecomposition({b: frozenset(perm[x] for x in nodes) for b, nodes in bags.items()}, tree_edges, 0)
    return Generated(g, cert)


def generate(family: str, params: dict, seed: int = 0) -> Graph:
    return generate_with_certificate(family, params, seed).graph


def generate_with_certificate(family: str, params: dict, seed: int = 0) -> Generated:
    try:
        if family == "path":
            return Generated(path(int(params["n"])))
        if family == "cycle":
            return Generated(cycle(int(params["n"])))
        if family == "grid":
            return Generated(grid(int(params["rows"]), int(params["cols"])))
        if family == "clique":
            return Generated(clique(int(params["n"])))
        if family == "tree":
            return Generated(random_tree(int(params["n"]), seed))
        if family == "random":
            return Generated(random_connected(int(params["n"]), float(params.get("p", 0.3)), seed))
        if family == "ktree":
            return ktree(int(params["k"]), int(params["n"]), seed)
        if family == "partial_ktree":
            return partial_ktree(int(params["k"]), int(params["n"]), float(params.get("p", 0.3)), seed)
    except KeyError as exc:
        raise ValueError(f"family {family!r} needs parameter {exc.args[0]!r}") from None
    raise ValueError(f"unknown family {family!r}; expected one of {', '.join(FAMILIES)}")

"""Deterministic graph corpus shared by the module tests and the acceptance suite."""

from __future__ import annotations

import random
from dataclasses import dataclass

from twcongest.generators import (clique, cycle, grid, ktree, partial_ktree, path, random_connected,
                                  random_tree)
from twcongest.graph import Graph


@dataclass
class Entry:
    name: str
    graph: Graph
    tw: int | None = None  # known exact treewidth, when it follows from the construction


def petersen() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph.from_edges(10, outer + spokes + inner)


def two_triangles() -> Graph:
    """Triangles {0,1,2} and {2,3,4} sharing node 2."""
    return Graph.from_edges(5, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)])


def corpus() -> list[Entry]:
    out: list[Entry] = []
    for n in (1, 2, 3, 5, 8, 12, 20):
        out.append(Entry(f"path{n}", path(n), 0 if n == 1 else 1))
    for n in (3, 4, 5, 6, 9, 12):
        out.append(Entry(f"cycle{n}", cycle(n), 2))
    for r, c in ((2, 2), (2, 5), (3, 3), (3, 4), (4, 4)):
        out.append(Entry(f"grid{r}x{c}", grid(r, c), min(r, c)))
    for n in (2, 3, 4, 5, 6, 7):
        out.append(Entry(f"clique{n}", clique(n), n - 1))
    for seed in range(4):
        out.append(Entry(f"tree{seed}", random_tree(6 + 4 * seed, seed), 1))
    out.append(Entry("petersen", petersen(), 4))
    out.append(Entry("two_triangles", two_triangles(), 2))
    for k in (1, 2, 3):
        for seed in range(3):
            out.append(Entry(f"ktree{k}_{seed}", ktree(k, 8 + 5 * seed, seed).graph, k))
            out.append(Entry(f"pktree{k}_{seed}", partial_ktree(k, 9 + 4 * seed, 0.3, seed).graph))
    for seed in range(10):
        rng = random.Random(seed)
        out.append(Entry(f"random{seed}", random_connected(rng.randint(5, 12), rng.choice((0.2, 0.35, 0.5)), seed)))
    return out


def bfs_parents(g: Graph, root: int) -> dict[int, int | None]:
    """Sequential BFS where each node's parent is its lowest-ID neighbour one level closer."""
    dist = g.bfs_distances(root)
    parent: dict[int, int | None] = {root: None}
    for v, d in dist.items():
        if v != root:
            parent[v] = min(w for w in g.adjacency[v] if dist.get(w) == d - 1)
    return parent

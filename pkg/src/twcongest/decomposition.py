"""Rooted tree decompositions, their JSON form and the replicated-network lift."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping


@dataclass
class TreeDecomposition:
    """Rooted tree of bags keyed by integer bag IDs.

    `depth` and `in_charge` carry the recursion metadata used by the DP:
    depth of each bag and, for each non-root bag, the node of its parent bag
    that exchanges tables with it.
    """

    bags: dict[int, frozenset[int]]
    edges: list[tuple[int, int]]  # (parent, child)
    root: int
    depth: dict[int, int] = field(default_factory=dict)
    in_charge: dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        self.bags = {int(b): frozenset(v) for b, v in self.bags.items()}
        self.edges = [(int(p), int(c)) for p, c in self.edges]

    @property
    def width(self) -> int:
        if not self.bags:
            return -1
        return max(len(b) for b in self.bags.values()) - 1

    def children(self) -> dict[int, list[int]]:
        ch: dict[int, list[int]] = {b: [] for b in self.bags}
        for p, c in self.edges:
            ch.setdefault(p, []).append(c)
        for lst in ch.values():
            lst.sort()
        return ch

    def parent(self) -> dict[int, int]:
        return {c: p for p, c in self.edges}

    def order_top_down(self) -> list[int]:
        """Bags in BFS order from the root; raises if the edges are not a tree rooted at `root`."""
        ch = self.children()
        order = [self.root]
        seen = {self.root}
        i = 0
        while i < len(order):
            for c in ch.get(order[i], ()):
                if c in seen:
                    raise ValueError(f"bag {c} reached twice")
                seen.add(c)
                order.append(c)
            i += 1
        if len(order) != len(self.bags):
            raise ValueError("bag tree is not connected")
        return order

    def compute_depths(self) -> dict[int, int]:
        depth = {self.root: 0}
        par = self.parent()
        for b in self.order_top_down()[1:]:
            depth[b] = depth[par[b]] + 1
        return depth

    def with_default_metadata(self) -> "TreeDecomposition":
        """Fill missing depth/in-charge data: in-charge = smallest node shared with the parent bag,
        else the smallest node of the parent bag."""
        depth = self.depth or self.compute_depths()
        in_charge = dict(self.in_charge)
        par = self.parent()
        for c, p in par.items():
            if c not in in_charge:
                shared = self.bags[c] & self.bags[p]
                pool = shared or self.bags[p] or self.bags[c]
                in_charge[c] = min(pool) if pool else -1
        return TreeDecomposition(dict(self.bags), list(self.edges), self.root, dict(depth), in_charge)

    def to_json(self) -> dict:
        return {
            "width": self.width,
            "bags": {str(b): sorted(v) for b, v in sorted(self.bags.items())},
            "edges": [[p, c] for p, c in self.edges],
            "root": self.root,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, obj: Mapping | str) -> "TreeDecomposition":
        if isinstance(obj, str):
            obj = json.loads(obj)
        bags = {int(k): frozenset(int(x) for x in v) for k, v in obj["bags"].items()}
        edges = [(int(p), int(c)) for p, c in obj.get("edges", [])]
        root = int(obj["root"]) if "root" in obj else min(bags)
        return cls(bags, edges, root)


def single_bag(nodes: Iterable[int]) -> TreeDecomposition:
    return TreeDecomposition({0: frozenset(nodes)}, [], 0)


def decomposition_of_replicated(decomp: TreeDecomposition, ell: int, n: int | None = None) -> TreeDecomposition:
    """Replace every node v in every bag by its copies v*ell .. v*ell+ell-1.

    Pass the base graph's `n` to have the input checked for range errors.
    """
    if ell < 1:
        raise ValueError("replication factor must be at least 1")
    decomp.order_top_down()
    bags = {}
    for b, nodes in decomp.bags.items():
        if n is not None and any(not 0 <= v < n for v in nodes):
            raise ValueError(f"bag {b} names a node outside the graph")
        bags[b] = frozenset(v * ell + i for v in nodes for i in range(ell))
    return TreeDecomposition(bags, list(decomp.edges), decomp.root, dict(decomp.depth))


def join_decompositions(parts: list[TreeDecomposition]) -> TreeDecomposition:
    """Join decompositions of distinct components by hanging every root below the first one.

    Bag IDs must already be disjoint across the parts.
    """
    if not parts:
        return TreeDecomposition({}, [], 0)
    bags: dict[int, frozenset[int]] = {}
    edges: list[tuple[int, int]] = []
    depth: dict[int, int] = {}
    in_charge: dict[int, int] = {}
    root = parts[0].root
    for i, d in enumerate(parts):
        if set(bags) & set(d.bags):
            raise ValueError("bag IDs collide across components")
        bags.update(d.bags)
        edges.extend(d.edges)
        shift = 0 if i == 0 else 1
        for b, dep in (d.depth or d.compute_depths()).items():
            depth[b] = dep + shift
        in_charge.update(d.in_charge)
        if i:
            edges.append((root, d.root))
    return TreeDecomposition(bags, edges, root, depth, in_charge)

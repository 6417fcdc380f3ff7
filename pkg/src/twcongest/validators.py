"""Independent checks for decompositions, path systems, cuts and problem solutions."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

from .decomposition import TreeDecomposition
from .graph import Graph
from .oracles import reachable


@dataclass
class ValidationReport:
    ok: bool
    violated: str | None = None
    witness: object = None
    details: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.ok


def validate_decomposition(g: Graph, decomp: TreeDecomposition, max_width: int | None = None) -> ValidationReport:
    """Check tree shape, (i) coverage, (ii) connected occurrence, (iii) edge coverage and the width claim."""
    bags = decomp.bags
    if not bags:
        return ValidationReport(g.n == 0, None if g.n == 0 else "coverage", None if g.n == 0 else 0)
    if decomp.root not in bags:
        return ValidationReport(False, "tree", f"root {decomp.root} is not a bag")
    for p, c in decomp.edges:
        if p not in bags or c not in bags:
            return ValidationReport(False, "tree", (p, c))
    if len(decomp.edges) != len(bags) - 1:
        return ValidationReport(False, "tree", f"{len(decomp.edges)} edges for {len(bags)} bags")
    und: dict[int, list[int]] = {b: [] for b in bags}
    for p, c in decomp.edges:
        und[p].append(c)
        und[c].append(p)
    seen = {decomp.root}
    q = deque([decomp.root])
    while q:
        b = q.popleft()
        for c in und[b]:
            if c not in seen:
                seen.add(c)
                q.append(c)
    if len(seen) != len(bags):
        return ValidationReport(False, "tree", sorted(set(bags) - seen)[0])
    for b, nodes in bags.items():
        for v in nodes:
            if not 0 <= v < g.n:
                return ValidationReport(False, "coverage", f"bag {b} names unknown node {v}")
    occ: dict[int, list[int]] = {v: [] for v in range(g.n)}
    for b, nodes in bags.items():
        for v in nodes:
            occ[v].append(b)
    for v in range(g.n):
        if not occ[v]:
            return ValidationReport(False, "coverage", v)
    for v in range(g.n):
        where = set(occ[v])
        start = occ[v][0]
        reach = {start}
        q = deque([start])
        while q:
            b = q.popleft()
            for c in und[b]:
                if c in where and c not in reach:
                    reach.add(c)
                    q.append(c)
        if reach != where:
            return ValidationReport(False, "connectivity", v)
    for u, v in g.edges():
        if not set(occ[u]) & set(occ[v]):
            return ValidationReport(False, "edge", (u, v))
    width = decomp.width
    if max_width is not None and width > max_width:
        return ValidationReport(False, "width", width, {"width": width})
    return ValidationReport(True, details={"width": width})


def validate_paths(g: Graph, paths: Iterable[list[int]], ends_a: set[int], ends_b: set[int],
                   forbidden: Iterable[int] = ()) -> ValidationReport:
    """Paths must run from A to B over graph edges, be simple and pairwise vertex-disjoint.

    For s-t paths pass A={s}, B={t}; endpoints s and t may then be shared.
    """
    forbidden = set(forbidden)
    used: set[int] = set()
    shared = ends_a | ends_b if len(ends_a) == 1 and len(ends_b) == 1 else set()
    for path in paths:
        if len(path) < 2 or path[0] not in ends_a or path[-1] not in ends_b:
            return ValidationReport(False, "endpoints", path)
        if len(set(path)) != len(path):
            return ValidationReport(False, "simple", path)
        for a, b in zip(path, path[1:]):
            if not g.has_edge(a, b):
                return ValidationReport(False, "edge", (a, b))
        for v in path:
            if v in forbidden:
                return ValidationReport(False, "forbidden", v)
            if v in shared:
                continue
            if v in used:
                return ValidationReport(False, "disjoint", v)
            used.add(v)
    return ValidationReport(True)


def validate_st_cut(g: Graph, s: int, t: int, cut: Iterable[int]) -> ValidationReport:
    cut = set(cut)
    if s in cut or t in cut:
        return ValidationReport(False, "endpoint-in-cut", cut)
    if reachable(g, s, t, cut):
        return ValidationReport(False, "separation", sorted(cut))
    return ValidationReport(True)


def validate_set_cut(g: Graph, members: Iterable[int], a: Iterable[int], b: Iterable[int],
                     cut: Iterable[int]) -> ValidationReport:
    """No path from A to B whose interior lies in `members` - cut (cut nodes may lie in A or B)."""
    cut = set(cut)
    allowed = set(members) - cut
    src = set(a) - cut
    dst = set(b) - cut
    seen = set(src)
    q = deque(src)
    while q:
        u = q.popleft()
        if u in dst:
            return ValidationReport(False, "separation", u)
        for w in g.adjacency[u]:
            if w in seen:
                continue
            if w in dst or w in allowed:
                seen.add(w)
                if w in dst:
                    return ValidationReport(False, "separation", w)
                q.append(w)
    return ValidationReport(True)


def is_independent(g: Graph, nodes: Iterable[int]) -> bool:
    s = set(nodes)
    return all(not (set(g.adjacency[v]) & s) for v in s)


def is_vertex_cover(g: Graph, nodes: Iterable[int]) -> bool:
    s = set(nodes)
    return all(u in s or v in s for u, v in g.edges())


def is_dominating(g: Graph, nodes: Iterable[int]) -> bool:
    s = set(nodes)
    return all(v in s or set(g.adjacency[v]) & s for v in range(g.n))


def is_proper_colouring(g: Graph, colours) -> bool:
    return len(colours) == g.n and all(colours[u] != colours[v] for u, v in g.edges())

"""Sequential reference solvers. None of these share code with the distributed algorithms."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .decomposition import TreeDecomposition
from .graph import Graph

TREEWIDTH_ORACLE_MAX_N = 12
MIS_ORACLE_MAX_N = 20
SMALL_ORACLE_MAX_N = 14


class OracleSizeError(ValueError):
    pass


def oracle_vertex_maxflow(g: Graph, s: int, t: int, removed: frozenset[int] = frozenset()) -> tuple[int, list[list[int]]]:
    """Maximum number of internally vertex-disjoint s-t paths, with witnesses.

    A direct s-t edge counts as one path. Nodes in `removed` are deleted first.
    Unit-capacity Edmonds-Karp on the vertex-split graph: node v becomes 2v (in) -> 2v+1 (out).
    """
    if s == t:
        raise ValueError("s and t must differ")
    cap: dict[tuple[int, int], int] = {}
    adj: dict[int, set[int]] = {}

    def arc(a: int, b: int) -> None:
        cap[(a, b)] = cap.get((a, b), 0) + 1
        cap.setdefault((b, a), 0)
        adj.setdefault(a, set()).add(b)
        adj.setdefault(b, set()).add(a)

    big = g.n + 1
    for v in range(g.n):
        if v in removed:
            continue
        arc(2 * v, 2 * v + 1)
        if v in (s, t):
            cap[(2 * v, 2 * v + 1)] = big
    for u, v in g.edges():
        if u in removed or v in removed:
            continue
        arc(2 * u + 1, 2 * v)
        arc(2 * v + 1, 2 * u)
    orig = dict(cap)
    src, snk = 2 * s, 2 * t + 1
    flow = 0
    while True:
        prev = {src: None}
        q = deque([src])
        while q and snk not in prev:
            a = q.popleft()
            for b in sorted(adj.get(a, ())):
                if b not in prev and cap[(a, b)] > 0:
                    prev[b] = a
                    q.append(b)
        if snk not in prev:
            break
        b = snk
        while prev[b] is not None:
            a = prev[b]
            cap[(a, b)] -= 1
            cap[(b, a)] += 1
            b = a
        flow += 1
    # decompose the flow into node paths: an edge arc carries flow iff its residual dropped
    succ: dict[int, list[int]] = {}
    for u, v in g.edges():
        if u in removed or v in removed:
            continue
        for a, b in ((u, v), (v, u)):
            if orig[(2 * a + 1, 2 * b)] - cap[(2 * a + 1, 2 * b)] > 0:
                succ.setdefault(a, []).append(b)
    paths = []
    for _ in range(flow):
        path = [s]
        while path[-1] != t:
            path.append(succ[path[-1]].pop())
        paths.append(path)
    return flow, paths


def oracle_min_vertex_cut(g: Graph, s: int, t: int) -> set[int] | None:
    """A minimum s-t vertex cut by brute-force search over growing sizes, or None if s,t are adjacent."""
    if g.has_edge(s, t):
        return None
    from itertools import combinations
    others = [v for v in range(g.n) if v not in (s, t)]
    for size in range(len(others) + 1):
        for cut in combinations(others, size):
            if not reachable(g, s, t, set(cut)):
                return set(cut)
    return set(others)


def reachable(g: Graph, s: int, t: int, removed: set[int] | frozenset[int] = frozenset()) -> bool:
    if s in removed or t in removed:
        return False
    seen = {s}
    q = deque([s])
    while q:
        u = q.popleft()
        if u == t:
            return True
        for w in g.adjacency[u]:
            if w not in seen and w not in removed:
                seen.add(w)
                q.append(w)
    return False


def _adj_masks(g: Graph) -> list[int]:
    masks = []
    for v in range(g.n):
        m = 0
        for w in g.adjacency[v]:
            m |= 1 << w
        masks.append(m)
    return masks


def _elimination_table(g: Graph) -> dict[int, tuple[int, int]]:
    """TW(S) with the last vertex of an optimal elimination of S, for every vertex subset S.

    TW(S) = min_{v in S} max(TW(S - v), |Q(S - v, v)|), where Q(S, v) is the set of vertices
    outside S + v reachable from v through S. This is the elimination-ordering formulation.
    """
    n = g.n
    if n > TREEWIDTH_ORACLE_MAX_N:
        raise OracleSizeError(f"exact treewidth oracle limited to n <= {TREEWIDTH_ORACLE_MAX_N}")
    adj = _adj_masks(g)
    full = (1 << n) - 1

    def q_size(S: int, v: int) -> int:
        # vertices outside S | {v} reachable from v via interior vertices in S
        seen = 1 << v
        frontier = 1 << v
        out = 0
        while frontier:
            nb = 0
            f = frontier
            while f:
                low = f & -f
                nb |= adj[low.bit_length() - 1]
                f ^= low
            nb &= ~seen
            seen |= nb
            out |= nb & ~S
            frontier = nb & S
        return bin(out & ~(1 << v)).count("1")

    tw: dict[int, tuple[int, int]] = {0: (-1, -1)}
    for S in range(1, full + 1):
        best = (n, -1)
        rest = S
        while rest:
            low = rest & -rest
            v = low.bit_length() - 1
            rest ^= low
            prev = S ^ low
            val = max(tw[prev][0], q_size(prev, v))
            if val < best[0]:
                best = (val, v)
        tw[S] = best
    return tw


def oracle_treewidth_exact(g: Graph) -> int:
    """Exact treewidth by dynamic programming over vertex subsets (n <= 12)."""
    if g.n == 0:
        return -1
    return _elimination_table(g)[(1 << g.n) - 1][0]


def oracle_optimal_decomposition(g: Graph) -> TreeDecomposition:
    """A decomposition of width exactly tw(G), from an optimal elimination ordering."""
    if g.n == 0:
        return TreeDecomposition({}, [], 0)
    table = _elimination_table(g)
    order = []
    S = (1 << g.n) - 1
    while S:
        v = table[S][1]
        order.append(v)
        S ^= 1 << v
    order.reverse()
    pos = {v: i for i, v in enumerate(order)}
    fill = {v: set(g.adjacency[v]) for v in range(g.n)}
    bags: dict[int, frozenset[int]] = {}
    edges: list[tuple[int, int]] = []
    roots = []
    for i, v in enumerate(order):
        later = {w for w in fill[v] if pos[w] > i}
        bags[i] = frozenset(later | {v})
        for a in later:
            fill[a] |= later - {a}
        if later:
            edges.append((min(pos[w] for w in later), i))
        else:
            roots.append(i)
    # one root per component; hang the others below the last one
    for r in roots[:-1]:
        edges.append((roots[-1], r))
    return TreeDecomposition(bags, edges, roots[-1])


@dataclass
class BruteResult:
    value: int
    witness: list[int]  # chosen node set, or colour per node for chromatic


def _mis(g: Graph) -> BruteResult:
    adj = _adj_masks(g)
    best = [0, 0]

    def search(cand: int, chosen: int, size: int) -> None:
        if not cand:
            if size > best[0]:
                best[0], best[1] = size, chosen
            return
        if size + bin(cand).count("1") <= best[0]:
            return
        low = cand & -cand
        v = low.bit_length() - 1
        search(cand & ~low & ~adj[v], chosen | low, size + 1)
        search(cand & ~low, chosen, size)

    search((1 << g.n) - 1, 0, 0)
    return BruteResult(best[0], [v for v in range(g.n) if best[1] >> v & 1])


def _ds(g: Graph) -> BruteResult:
    from itertools import combinations
    closed = [m | (1 << v) for v, m in enumerate(_adj_masks(g))]
    full = (1 << g.n) - 1
    for size in range(g.n + 1):
        for combo in combinations(range(g.n), size):
            cover = 0
            for v in combo:
                cover |= closed[v]
            if cover == full:
                return BruteResult(size, list(combo))
    return BruteResult(0, [])


def _chromatic(g: Graph) -> BruteResult:
    n = g.n
    if n == 0:
        return BruteResult(0, [])
    order = sorted(range(n), key=lambda v: -g.degree(v))
    for c in range(1, n + 1):
        colour = [-1] * n

        def place(i: int) -> bool:
            if i == n:
                return True
            v = order[i]
            used = {colour[w] for w in g.adjacency[v]}
            top = max(colour) + 1
            for col in range(min(c, top + 1)):
                if col not in used:
                    colour[v] = col
                    if place(i + 1):
                        return True
                    colour[v] = -1
            return False

        if place(0):
            return BruteResult(c, colour)
    raise AssertionError("unreachable")


def oracle_bruteforce(g: Graph, problem: str) -> BruteResult:
    problem = problem.lower()
    if problem in ("mis", "vc"):
        if g.n > MIS_ORACLE_MAX_N:
            raise OracleSizeError(f"{problem} oracle limited to n <= {MIS_ORACLE_MAX_N}")
        r = _mis(g)
        if problem == "vc":
            chosen = set(r.witness)
            return BruteResult(g.n - r.value, [v for v in range(g.n) if v not in chosen])
        return r
    if problem in ("ds", "chromatic"):
        if g.n > SMALL_ORACLE_MAX_N:
            raise OracleSizeError(f"{problem} oracle limited to n <= {SMALL_ORACLE_MAX_N}")
        return _ds(g) if problem == "ds" else _chromatic(g)
    raise ValueError(f"unknown problem {problem!r}")

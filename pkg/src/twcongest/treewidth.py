"""Recursive treewidth approximation: decide tw(G) > k or build a decomposition of width <= 7k+4.

The recursion works on instances (U, X) where U is a connected node set and X = N(U) is its
boundary (X and U are disjoint). Each instance picks a separator S inside U, emits the bag
X | S and recurses on every component U' of G[U] - S with boundary N(U').

Odd depths shrink the boundary: S separates two groups of X. Even depths shrink U with the
help of a splitter R of a spanning tree of G[U]. All disjoint-paths queries of one recursion
layer are batched, since the U sets of a layer are pairwise disjoint.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from itertools import combinations
from typing import Generator, Iterable

from .aggregation import AggOp, Aggregator, DirectAggregator, rooted_aggregate, spanning_tree
from .decomposition import TreeDecomposition
from .graph import Graph
from .paths import DisjointPathsResult, batch_disjoint_paths

# at most this many splitter partitions are tried per even instance before the exact search
PHASE1_LIMIT = 32


@dataclass(frozen=True)
class Instance:
    U: frozenset[int]
    X: frozenset[int]
    depth: int
    parent: int | None = None  # bag key of the parent instance

    @property
    def uid(self) -> int:
        return min(self.U)

    def key(self, n: int) -> int:
        return self.depth * n + self.uid


@dataclass
class TwExceeded:
    """Verdict that tw(G) > k, with the instance where every separator candidate failed."""
    k: int
    depth: int
    uid: int
    reason: str

    def __bool__(self) -> bool:
        return False

    def to_json(self) -> dict:
        return {"verdict": "tw_exceeds", "k": self.k, "depth": self.depth, "uid": self.uid,
                "reason": self.reason}


@dataclass
class Splitter:
    tree: dict[int, set[int]]
    root: int
    parent: dict[int, int | None]
    R: frozenset[int]
    B: int
    sub_size: dict[int, int]
    weights: dict[int, int]
    greedy_fallback: bool = False


@dataclass
class TwStats:
    layers: int = 0
    instances: int = 0
    leaves: int = 0
    dp_queries: int = 0
    batches: int = 0
    phase1_successes: int = 0
    phase2_uses: int = 0
    splitter_fallbacks: int = 0
    max_x: int = 0
    max_bag: int = 0
    violations: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return dict(self.__dict__)


# a step generator yields disjoint-paths queries (U, A, B, X, k) and returns a separator or a verdict
Query = tuple[frozenset, frozenset, frozenset, frozenset, int]
Step = Generator[Query, DisjointPathsResult, "frozenset[int] | TwExceeded"]


def _components(g: Graph, members: Iterable[int]) -> list[set[int]]:
    members = set(members)
    seen: set[int] = set()
    comps = []
    for v in sorted(members):
        if v in seen:
            continue
        comp = {v}
        seen.add(v)
        q = deque([v])
        while q:
            u = q.popleft()
            for w in g.adjacency[u]:
                if w in members and w not in seen:
                    seen.add(w)
                    comp.add(w)
                    q.append(w)
        comps.append(comp)
    return comps


def _boundary(g: Graph, U: set[int] | frozenset[int]) -> frozenset[int]:
    return frozenset(w for v in U for w in g.adjacency[v] if w not in U)


def _partitions(items: list[int], limit: int) -> Iterable[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Unordered splits (Y, Z) of `items`, Y holding the smallest item, by |Y| then lexicographic.

    Both sides stay within `limit` elements. Mirrored duplicates are skipped.
    """
    if not items:
        yield (), ()
        return
    first, rest = items[0], items[1:]
    lo = max(0, len(items) - limit - 1)
    for extra in range(lo, min(limit - 1, len(rest)) + 1):
        for pick in combinations(rest, extra):
            y = (first,) + pick
            chosen = set(y)
            yield y, tuple(v for v in items if v not in chosen)


def odd_step_gen(g: Graph, inst: Instance, k: int) -> Step:
    X = sorted(inst.X)
    cap = (2 * len(X)) // 3
    for size in range(min(k + 1, len(X)) + 1):
        for xp in combinations(X, size):
            xps = set(xp)
            rest = [v for v in X if v not in xps]
            for y, z in _partitions(rest, cap):
                if not y or not z:
                    return frozenset()
                zs = set(z)
                if any(w in zs for v in y for w in g.adjacency[v]):
                    continue
                res = yield (inst.U | frozenset(xp), frozenset(y), frozenset(z), frozenset(xp), k + 2 - size)
                if res.kind == "cut":
                    return frozenset(res.cut) & inst.U
    return TwExceeded(k, inst.depth, inst.uid, "no boundary partition admits a small separator")


def build_splitter(g: Graph, U: Iterable[int], B: int, agg: Aggregator | None = None) -> Splitter:
    """Splitter of a spanning tree of G[U], rooted at the smallest node.

    v joins R when 1 + sum over children u of (sub_size(u) mod B) exceeds B. The result is
    checked directly; on failure a bottom-up greedy splitter is used instead. The root
    always joins R so that every node has a first R node on its way up.
    """
    if B < 1:
        raise ValueError("B must be at least 1")
    U = set(U)
    agg = agg or DirectAggregator(g)
    adj = {v: [w for w in g.adjacency[v] if w in U] for v in U}
    tree = spanning_tree(g, adj, agg)
    root = min(U)
    parent, size = rooted_aggregate(g, tree, root, {v: 1 for v in U}, AggOp.SUM, agg)
    kids: dict[int, list[int]] = {v: [] for v in U}
    for v, p in parent.items():
        if p is not None:
            kids[p].append(v)
    agg.charge_raw(1)  # each node reports its subtree size to its parent
    R = {v for v in U if 1 + sum(size[u] % B for u in kids[v]) > B}
    fallback = False
    if not _splitter_ok(tree, U, R, B):
        fallback = True
        R = _greedy_splitter(root, kids, B)
        if not _splitter_ok(tree, U, R, B):
            raise RuntimeError("greedy splitter violates its invariants")
    R.add(root)
    weights = _splitter_weights(root, kids, size, R)
    if sum(weights.values()) != len(U):
        raise RuntimeError("splitter weights do not add up to |U|")
    agg.charge_sa(math.ceil(math.log2(max(g.n, 2))) + 1)
    return Splitter(tree, root, parent, frozenset(R), B, size, weights, fallback)


def _splitter_ok(tree: dict[int, set[int]], U: set[int], R: set[int], B: int) -> bool:
    if len(R) * B > len(U):
        return False
    seen = set(R)
    for v in U:
        if v in seen:
            continue
        seen.add(v)
        q = deque([v])
        count = 0
        while q:
            u = q.popleft()
            count += 1
            for w in tree[u]:
                if w not in seen:
                    seen.add(w)
                    q.append(w)
        if count >= B:
            return False
    return True


def _greedy_splitter(root: int, kids: dict[int, list[int]], B: int) -> set[int]:
    order = [root]
    for v in order:
        order.extend(kids[v])
    residual: dict[int, int] = {}
    R = set()
    for v in reversed(order):
        residual[v] = 1 + sum(residual[u] for u in kids[v])
        if residual[v] >= B:
            R.add(v)
            residual[v] = 0
    return R


def _splitter_weights(root: int, kids: dict[int, list[int]], size: dict[int, int], R: set[int]) -> dict[int, int]:
    """w_r = number of nodes whose first R node on the way to the root is r."""
    weights = {}
    for r in R:
        w = size[r]
        stack = list(kids[r])
        while stack:
            v = stack.pop()
            if v in R:
                w -= size[v]
            else:
                stack.extend(kids[v])
        weights[r] = w
    return weights


def _weighted_partitions(R: list[int], w: dict[int, int], total: int):
    """Splits (Y, Z) of R with 3/12 total <= w(Y) <= 9/12 total, so both sides weigh at most 9/12.

    Same order as `_partitions`; subset sizes whose weight range misses the window are skipped.
    """
    if len(R) < 2:
        return
    first, rest = R[0], R[1:]
    asc = sorted(w[v] for v in rest)
    for extra in range(len(rest)):
        lo_w = w[first] + sum(asc[:extra])
        hi_w = w[first] + sum(asc[len(asc) - extra:]) if extra else w[first]
        if 12 * lo_w > 9 * total or 12 * hi_w < 3 * total:
            continue
        for pick in combinations(rest, extra):
            wy = w[first] + sum(w[v] for v in pick)
            if 3 * total <= 12 * wy <= 9 * total:
                chosen = set(pick)
                yield (first,) + pick, tuple(v for v in rest if v not in chosen)


def _balanced(g: Graph, U: frozenset[int], S: frozenset[int], num: int, den: int) -> bool:
    return all(len(c) * den <= num * len(U) for c in _components(g, U - S))


def _exact_balanced_separator(g: Graph, U: frozenset[int], k: int, prefer: frozenset[int],
                              agg: Aggregator) -> frozenset[int] | None:
    """Separator S of size <= k+1 with every component of G[U] - S at most (|U| - |S|)/2.

    Such a set exists whenever tw(G[U]) <= k. Any solution extending S must hit the
    largest component that is too big, so branching over its nodes is complete.
    """
    seen: set[frozenset[int]] = set()

    def search(S: frozenset[int]) -> frozenset[int] | None:
        if S in seen:
            return None
        seen.add(S)
        agg.charge_sa(1)
        comps = _components(g, U - S)
        big = max(comps, key=len) if comps else set()
        if 2 * len(big) <= len(U) - len(S):
            return S
        if len(S) == k + 1:
            return None
        for v in sorted(big, key=lambda x: (x not in prefer, x)):
            found = search(S | {v})
            if found is not None:
                return found
        return None

    return search(frozenset())


def even_step_gen(g: Graph, inst: Instance, k: int, agg: Aggregator, stats: TwStats) -> Step:
    U = inst.U
    B = max(1, math.ceil(len(U) / (12 * k)))
    sp = build_splitter(g, U, B, agg)
    if sp.greedy_fallback:
        stats.splitter_fallbacks += 1
    tried = 0
    for y, z in _weighted_partitions(sorted(sp.R), sp.weights, len(U)):
        if tried == PHASE1_LIMIT:
            break
        tried += 1
        res = yield (U, frozenset(y), frozenset(z), frozenset(), k + 2)
        if res.kind == "cut":
            S = frozenset(res.cut)
            if S and _balanced(g, U, S, 10, 12):
                stats.phase1_successes += 1
                return S
    stats.phase2_uses += 1
    S = _exact_balanced_separator(g, U, k, sp.R, agg)
    if S is None:
        return TwExceeded(k, inst.depth, inst.uid, "no balanced separator of size k+1 inside U")
    return S


def _drive(g: Graph, steps: dict[Instance, Step], agg: Aggregator, stats: TwStats) -> dict[Instance, object]:
    """Run step generators in lockstep; each round batches one query per still-running instance."""
    outcome: dict[Instance, object] = {}
    pending: dict[Instance, Query] = {}
    for inst, gen in steps.items():
        try:
            pending[inst] = next(gen)
        except StopIteration as stop:
            outcome[inst] = stop.value
    while pending:
        insts = list(pending)
        queries = [pending[i] for i in insts]
        stats.batches += 1
        stats.dp_queries += len(queries)
        results = batch_disjoint_paths(g, [q[:4] for q in queries], [q[4] for q in queries], agg)
        pending = {}
        for inst, res in zip(insts, results):
            try:
                pending[inst] = steps[inst].send(res)
            except StopIteration as stop:
                outcome[inst] = stop.value
    return outcome


def odd_step(g: Graph, inst: Instance, k: int, agg: Aggregator | None = None) -> frozenset[int] | TwExceeded:
    agg = agg or DirectAggregator(g)
    return _drive(g, {inst: odd_step_gen(g, inst, k)}, agg, TwStats())[inst]


def even_step(g: Graph, inst: Instance, k: int, agg: Aggregator | None = None) -> frozenset[int] | TwExceeded:
    agg = agg or DirectAggregator(g)
    if len(inst.U) <= k + 1:
        return inst.U
    stats = TwStats()
    return _drive(g, {inst: even_step_gen(g, inst, k, agg, stats)}, agg, stats)[inst]


def _leaf(inst: Instance) -> Step:
    return inst.U
    yield  # pragma: no cover


def decompose(g: Graph, k: int, agg: Aggregator | None = None,
              stats: TwStats | None = None) -> TreeDecomposition | TwExceeded:
    """Tree decomposition of width <= 7k+4, or the verdict tw(G) > k.

    Disconnected graphs are handled per component; the component roots hang below the first.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    agg = agg or DirectAggregator(g)
    stats = stats if stats is not None else TwStats()
    n = max(g.n, 1)
    layer = [Instance(frozenset(c), frozenset(), 0) for c in _components(g, range(g.n))]
    bags: dict[int, frozenset[int]] = {}
    edges: list[tuple[int, int]] = []
    in_charge: dict[int, int] = {}
    roots = [inst.key(n) for inst in layer]
    max_depth = 8 * (math.ceil(math.log2(n + 1)) + k + 2)
    depth = 0
    while layer:
        if depth > max_depth:
            raise RuntimeError(f"recursion exceeded depth {max_depth}")
        stats.layers += 1
        stats.instances += len(layer)
        steps: dict[Instance, Step] = {}
        for inst in layer:
            stats.max_x = max(stats.max_x, len(inst.X))
            if len(inst.X) > 7 * k + 4:
                stats.violations.append(f"|X|={len(inst.X)} exceeds 7k+4 at depth {depth}")
            if len(inst.U) <= k + 1:
                stats.leaves += 1
                steps[inst] = _leaf(inst)
            elif depth % 2:
                steps[inst] = odd_step_gen(g, inst, k)
            else:
                steps[inst] = even_step_gen(g, inst, k, agg, stats)
        outcome = _drive(g, steps, agg, stats)
        nxt = []
        for inst in layer:
            S = outcome[inst]
            if isinstance(S, TwExceeded):
                return S
            key = inst.key(n)
            if len(S) > k + 1:
                stats.violations.append(f"separator of size {len(S)} at depth {depth}")
            bag = inst.X | S
            bags[key] = bag
            stats.max_bag = max(stats.max_bag, len(bag))
            if inst.parent is not None:
                edges.append((inst.parent, key))
            if S == inst.U:
                if len(S) > k + 1:
                    stats.violations.append(f"leaf with |U|={len(S)} at depth {depth}")
                continue
            for comp in _components(g, inst.U - S):
                U2 = frozenset(comp)
                X2 = _boundary(g, U2)
                if not X2 <= inst.X | S:
                    raise RuntimeError("child boundary escapes the parent bag")
                if depth % 2 and len(X2) > (2 * len(inst.X)) // 3 + k + 1:
                    stats.violations.append(f"odd-depth boundary {len(X2)} from {len(inst.X)}")
                if depth % 2 == 0 and 12 * len(U2) > 10 * len(inst.U):
                    stats.violations.append(f"even-depth child {len(U2)} of {len(inst.U)}")
                child = Instance(U2, X2, depth + 1, key)
                pool = (X2 & S) or X2 or bag
                in_charge[child.key(n)] = min(pool)
                nxt.append(child)
        layer = nxt
        depth += 1
    for r in roots[1:]:
        edges.append((roots[0], r))
        in_charge[r] = min(bags[roots[0]])
    if not bags:
        return TreeDecomposition({}, [], 0)
    decomp = TreeDecomposition(bags, edges, roots[0], {}, in_charge)
    decomp.depth = decomp.compute_depths()
    if decomp.width > 7 * k + 4:
        stats.violations.append(f"width {decomp.width} exceeds 7k+4")
    return decomp


def approx_treewidth(g: Graph, agg: Aggregator | None = None,
                     stats: TwStats | None = None) -> tuple[int, TreeDecomposition]:
    """Smallest k >= 1 for which `decompose` succeeds, with its decomposition.

    Guarantees k - 1 < tw(G) <= 7k + 4 (for k = 1 the lower bound is vacuous).
    """
    k = 1
    while True:
        res = decompose(g, k, agg, stats)
        if not isinstance(res, TwExceeded):
            return k, res
        k += 1

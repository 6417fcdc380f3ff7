"""Partwise and subgraph aggregation plus the tree/path helpers built on them.

Two engines implement one PA round:

* `SimulatedAggregator` runs it as node programs on the simulator (flood a leader and BFS
  tree inside each part, convergecast, broadcast).
* `DirectAggregator` folds each part directly and only counts the round. The large
  algorithms use it for speed; both engines produce identical values.

SA is always reduced to PA rounds through Heads/Tails clustering (`heads_tails`), except
that `DirectAggregator(fast_sa=True)` may fold subgraph components directly and charge one
SA round.
"""

from __future__ import annotations

import math
from collections import deque
from enum import Enum
from typing import Any, Iterable, Mapping

from .graph import Graph
from .sim import WORD_MAX, WORD_MIN, RoundStats, mix_seed, run_rounds

NEG_INF = WORD_MIN
POS_INF = WORD_MAX


class AggOp(Enum):
    MIN = "min"
    MAX = "max"
    SUM = "sum"
    LEXMIN = "lexmin"
    LEXMAX = "lexmax"

    def combine(self, a, b):
        if self is AggOp.SUM:
            return a + b
        if self in (AggOp.MIN, AggOp.LEXMIN):
            return a if a <= b else b
        return a if a >= b else b


def fold(op: AggOp, values: Iterable):
    it = iter(values)
    acc = next(it)
    for x in it:
        acc = op.combine(acc, x)
    return acc


class AggregationError(RuntimeError):
    pass


class SAConvergenceError(AggregationError):
    """Heads/Tails clustering did not finish within its iteration cap. Re-run with a fresh seed."""


def _parts_groups(parts: Mapping[int, Any]) -> dict[Any, list[int]]:
    groups: dict[Any, list[int]] = {}
    for v in sorted(parts):
        groups.setdefault(parts[v], []).append(v)
    return groups


def _check_connected(graph: Graph, members: list[int]) -> bool:
    mset = set(members)
    seen = {members[0]}
    q = deque([members[0]])
    while q:
        u = q.popleft()
        for w in graph.adjacency[u]:
            if w in mset and w not in seen:
                seen.add(w)
                q.append(w)
    return len(seen) == len(mset)


class Aggregator:
    """Base engine. Subclasses implement `_pa`; every call to `pa` is one counted PA round."""

    def __init__(self, graph: Graph | None = None, seed: int = 0, sa_cap_factor: int = 8,
                 stats: RoundStats | None = None):
        self.graph = graph
        self.seed = seed
        self.sa_cap_factor = sa_cap_factor
        self.stats = stats if stats is not None else RoundStats()
        self._sa_calls = 0
        self.last_sa_iterations = 0

    def pa(self, parts: Mapping[int, Any], values: Mapping[int, Any], op: AggOp) -> dict[int, Any]:
        self.stats.pa_rounds += 1
        return self._pa(parts, values, op)

    def _pa(self, parts, values, op):
        raise NotImplementedError

    def sa(self, adj: Mapping[int, Iterable[int]], values: Mapping[int, Any], op: AggOp,
           n: int | None = None) -> dict[int, Any]:
        if n is None:
            n = self.graph.n if self.graph is not None else len(adj)
        self._sa_calls += 1
        out, iters = heads_tails(self, n, adj, values, op, mix_seed(self.seed, self._sa_calls))
        self.last_sa_iterations = iters
        return out

    def charge_sa(self, count: int = 1) -> None:
        self.stats.sa_rounds += count

    def charge_raw(self, count: int = 1) -> None:
        self.stats.raw_rounds += count


class DirectAggregator(Aggregator):
    def __init__(self, graph: Graph | None = None, seed: int = 0, sa_cap_factor: int = 8,
                 stats: RoundStats | None = None, fast_sa: bool = True, check: bool = False):
        super().__init__(graph, seed, sa_cap_factor, stats)
        self.fast_sa = fast_sa
        self.check = check

    def _pa(self, parts, values, op):
        out = {}
        for label, members in _parts_groups(parts).items():
            if self.check and self.graph is not None and not _check_connected(self.graph, members):
                raise AggregationError(f"part {label} is disconnected")
            agg = fold(op, (values[v] for v in members))
            for v in members:
                out[v] = agg
        return out

    def sa(self, adj, values, op, n=None):
        if not self.fast_sa:
            return super().sa(adj, values, op, n)
        self.stats.sa_rounds += 1
        out = {}
        for comp in subgraph_components(adj):
            agg = fold(op, (values[v] for v in comp))
            for v in comp:
                out[v] = agg
        return out


def _encode(value) -> tuple[int, ...]:
    return tuple(value) if isinstance(value, tuple) else (value,)


def _decode(words: tuple[int, ...], like):
    return tuple(words) if isinstance(like, tuple) else words[0]


class SimulatedAggregator(Aggregator):
    """PA as message passing on `graph`: intra-part leader/BFS flood, convergecast, broadcast."""

    def __init__(self, graph: Graph, seed: int = 0, sa_cap_factor: int = 8,
                 stats: RoundStats | None = None, budget: int = 100_000):
        super().__init__(graph, seed, sa_cap_factor, stats)
        self.budget = budget

    def _run(self, step, init, halt=None):
        states, st = run_rounds(self.graph, step, halt, self.budget, self.seed, init)
        if st.exhausted:
            raise AggregationError("PA did not complete within the round budget (disconnected part?)")
        self.stats.raw_rounds += st.raw_rounds
        self.stats.messages_sent += st.messages_sent
        return states

    def _pa(self, parts, values, op):
        g = self.graph
        init = {}
        for v, label in parts.items():
            same = tuple(w for w in g.adjacency[v] if w in parts and parts[w] == label)
            init[v] = {"member": True, "same": same, "value": values[v]}
        like = next(iter(values.values())) if values else 0

        # leader election by minimum ID plus BFS tree toward the leader
        def elect(ctx):
            st = ctx.state
            if not st.get("member"):
                return
            if ctx.round == 0:
                st["best"], st["dist"], st["parent"] = ctx.node, 0, None
                for w in st["same"]:
                    ctx.send(w, ctx.node, 0)
                return
            cur = (st["best"], st["dist"], -1 if st["parent"] is None else st["parent"])
            improved = None
            for sender in sorted(ctx.inbox):
                if sender not in st["same"]:
                    continue
                best, dist = ctx.inbox[sender]
                cand = (best, dist + 1, sender)
                if cand < cur:
                    cur = cand
                    improved = cand
            if improved is not None:
                st["best"], st["dist"], st["parent"] = improved
                for w in st["same"]:
                    ctx.send(w, st["best"], st["dist"])

        states = self._run(elect, init)

        def notify(ctx):
            st = ctx.state
            if not st.get("member"):
                return
            if ctx.round == 0:
                st["children"] = []
                if st["parent"] is not None:
                    ctx.send(st["parent"], 1)
            else:
                st["children"] = sorted(ctx.inbox)

        states = self._run(notify, states, halt=lambda s, r: r >= 1)

        def convergecast(ctx):
            st = ctx.state
            if not st.get("member") or st.get("sent"):
                return
            if ctx.round == 0:
                st["acc"] = st["value"]
                st["heard"] = set()
            for sender in sorted(ctx.inbox):
                st["acc"] = op.combine(st["acc"], _decode(ctx.inbox[sender], like))
                st["heard"].add(sender)
            if st["heard"] >= set(st["children"]):
                st["sent"] = True
                if st["parent"] is not None:
                    ctx.send(st["parent"], *_encode(st["acc"]))
                else:
                    st["result"] = st["acc"]

        states = self._run(convergecast, states)

        def downcast(ctx):
            st = ctx.state
            if not st.get("member"):
                return
            if ctx.round == 0 and st["parent"] is None:
                for c in st["children"]:
                    ctx.send(c, *_encode(st["result"]))
                return
            if st["parent"] in ctx.inbox:
                st["result"] = _decode(ctx.inbox[st["parent"]], like)
                for c in st["children"]:
                    ctx.send(c, *_encode(st["result"]))

        states = self._run(downcast, states)
        out = {}
        for v in parts:
            if "result" not in states[v]:
                raise AggregationError(f"node {v} did not receive its part aggregate (disconnected part?)")
            out[v] = states[v]["result"]
        return out


def subgraph_components(adj: Mapping[int, Iterable[int]]) -> list[list[int]]:
    seen: set[int] = set()
    comps = []
    for s in sorted(adj):
        if s in seen:
            continue
        seen.add(s)
        comp = [s]
        q = deque([s])
        while q:
            u = q.popleft()
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    comp.append(w)
                    q.append(w)
        comps.append(comp)
    return comps


def sa_iteration_cap(n: int, factor: int = 8) -> int:
    return factor * math.ceil(math.log2(n)) if n > 1 else 0


def heads_tails(agg: Aggregator, n: int, adj: Mapping[int, Iterable[int]], values: Mapping[int, Any],
                op: AggOp, seed: int) -> tuple[dict[int, Any], int]:
    """Reduce one SA round to PA rounds by random Heads/Tails merging of parts.

    A part's coin is the first bit of its leader's random stream for that iteration; since every
    member knows the leader ID (= part ID) and the iteration, members evaluate the coin locally
    and no PA round is spent announcing it. Tails parts adopt the smallest offered Heads ID.
    Returns (per-node aggregate, merge iterations).
    """
    nodes = sorted(adj)
    nbrs = {v: tuple(adj[v]) for v in nodes}
    part = {v: v for v in nodes}
    edges = [(u, w) for u in nodes for w in nbrs[u] if u < w]
    cap = sa_iteration_cap(n, agg.sa_cap_factor)
    iters = 0
    while any(part[u] != part[w] for u, w in edges):
        iters += 1
        if iters > cap:
            raise SAConvergenceError(f"Heads/Tails clustering exceeded {cap} iterations on n={n}")
        heads = {p: mix_seed(seed, p, iters) & 1 == 1 for p in set(part.values())}
        agg.charge_raw(1)  # members tell H-neighbours their part ID and coin
        offers = {}
        for v in nodes:
            best = POS_INF
            if not heads[part[v]]:
                for w in nbrs[v]:
                    pw = part[w]
                    if pw != part[v] and heads[pw] and pw < best:
                        best = pw
            offers[v] = best
        chosen = agg.pa(part, offers, AggOp.MIN)
        part = {v: (chosen[v] if not heads[part[v]] and chosen[v] != POS_INF else part[v]) for v in nodes}
    out = agg.pa(part, values, op) if nodes else {}
    agg.stats.sa_rounds += 1
    return out, iters


def _validate_subgraphs(g: Graph, adj: Mapping[int, Iterable[int]]) -> None:
    for v, ws in adj.items():
        for w in ws:
            if not g.has_edge(v, w):
                raise ValueError(f"declared subgraph edge ({v}, {w}) is not in the graph")
            if w not in adj or v not in adj[w]:
                raise ValueError(f"subgraph edge ({v}, {w}) is not declared symmetrically")


def _validate_parts(g: Graph, parts: Mapping[int, Any]) -> None:
    for label, members in _parts_groups(parts).items():
        if not _check_connected(g, members):
            raise AggregationError(f"part {label} is disconnected")


def pa_round(g: Graph, parts: Mapping[int, Any], values: Mapping[int, Any], op: AggOp,
             agg: Aggregator | None = None) -> dict[int, Any]:
    """Every member of each part learns the fold of its part; non-members are absent from the result."""
    if agg is None:
        agg = SimulatedAggregator(g)
        # the simulated engine detects disconnected parts itself; check early for a clear message
        _validate_parts(g, parts)
    return agg.pa(parts, values, op)


def sa_round(g: Graph, subgraphs: Mapping[int, Iterable[int]], values: Mapping[int, Any], op: AggOp,
             agg: Aggregator | None = None) -> dict[int, Any]:
    """Every node of each connected subgraph learns the fold over that subgraph.

    `subgraphs` maps each participating node to its incident subgraph neighbours.
    Always runs Heads/Tails clustering, whatever the engine's shortcut settings.
    """
    _validate_subgraphs(g, subgraphs)
    if agg is None:
        agg = SimulatedAggregator(g)
    agg._sa_calls += 1
    out, iters = heads_tails(agg, g.n, subgraphs, values, op, mix_seed(agg.seed, agg._sa_calls))
    agg.last_sa_iterations = iters
    return out


def broadcast_in_parts(agg: Aggregator, parts: Mapping[int, Any], source_values: Mapping[int, int]) -> dict[int, int]:
    """Broadcast as PA with max, where non-sources contribute -inf."""
    vals = {v: source_values.get(v, NEG_INF) for v in parts}
    return agg.pa(parts, vals, AggOp.MAX)


# ---- helpers -------------------------------------------------------------------------------

def _edge_key(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


def spanning_tree(g: Graph | None, adj: Mapping[int, Iterable[int]], agg: Aggregator | None = None) -> dict[int, set[int]]:
    """Borůvka with lexicographic edge weights; one PA (lexmin) and one SA per phase."""
    if agg is None:
        agg = DirectAggregator(g)
    nodes = sorted(adj)
    nbrs = {v: tuple(adj[v]) for v in nodes}
    if len(subgraph_components(nbrs)) > 1:
        raise ValueError("subgraph is disconnected")
    frag = {v: v for v in nodes}
    tree: dict[int, set[int]] = {v: set() for v in nodes}
    none = (POS_INF, POS_INF)
    while True:
        agg.charge_raw(1)  # learn neighbours' fragment IDs
        cand = {}
        for v in nodes:
            best = none
            for w in nbrs[v]:
                if frag[w] != frag[v]:
                    e = _edge_key(v, w)
                    if e < best:
                        best = e
            cand[v] = best
        if all(c == none for c in cand.values()):
            break
        chosen = agg.pa(frag, cand, AggOp.LEXMIN)
        for v in nodes:
            a, b = chosen[v]
            if (a, b) != none:
                tree[a].add(b)
                tree[b].add(a)
        frag = agg.sa(tree, {v: v for v in nodes}, AggOp.MIN, g.n if g is not None else None)
    return tree


def rooted_aggregate(g: Graph | None, tree: Mapping[int, Iterable[int]], root: int,
                     values: Mapping[int, Any], op: AggOp,
                     agg: Aggregator | None = None) -> tuple[dict[int, int | None], dict[int, Any]]:
    """Orient `tree` toward `root`; return (parent, subtree aggregate) per node.

    Subtree folds are charged as ceil(log2 n)+1 SA rounds (the cited tree-aggregation cost).
    Parents are then read off subtree sizes: the parent is the neighbour with the larger size.
    """
    if root not in tree:
        raise ValueError(f"root {root} is not a tree node")
    if agg is None:
        agg = DirectAggregator(g)
    nodes = list(tree)
    order = [root]
    dfs_parent: dict[int, int | None] = {root: None}
    i = 0
    while i < len(order):
        u = order[i]
        for w in tree[u]:
            if w not in dfs_parent:
                dfs_parent[w] = u
                order.append(w)
            elif dfs_parent[u] != w:
                raise ValueError("input is not a tree")
        i += 1
    if len(order) != len(nodes):
        raise ValueError("input tree is disconnected")
    size = {v: 1 for v in nodes}
    acc = {v: values[v] for v in nodes}
    for v in reversed(order[1:]):
        p = dfs_parent[v]
        size[p] += size[v]
        acc[p] = op.combine(acc[p], acc[v])
    n = g.n if g is not None else len(nodes)
    agg.charge_sa(math.ceil(math.log2(max(n, 2))) + 1)
    parent: dict[int, int | None] = {}
    for v in nodes:
        bigger = [w for w in tree[v] if size[w] > size[v]]
        if v == root:
            parent[v] = None
        else:
            if len(bigger) != 1:
                raise AssertionError("subtree sizes do not determine a unique parent")
            parent[v] = bigger[0]
    return parent, acc


Links = dict[int, tuple[int | None, int | None]]


def _path_order(links: Mapping[int, tuple[int | None, int | None]]) -> list[int]:
    heads = [v for v, (p, _) in links.items() if p is None]
    if len(heads) != 1:
        raise ValueError("broken path: expected exactly one first node")
    for v, (p, s) in links.items():
        if s is not None and (s not in links or links[s][0] != v):
            raise ValueError(f"broken path at node {v}: successor disagrees")
        if p is not None and (p not in links or links[p][1] != v):
            raise ValueError(f"broken path at node {v}: predecessor disagrees")
    order = [heads[0]]
    while links[order[-1]][1] is not None:
        order.append(links[order[-1]][1])
        if len(order) > len(links):
            raise ValueError("broken path: cycle")
    if len(order) != len(links):
        raise ValueError("broken path: nodes not on the path")
    return order


def path_aggregate(g: Graph | None, links: Mapping[int, tuple[int | None, int | None]],
                   values: Mapping[int, Any], op: AggOp,
                   agg: Aggregator | None = None) -> dict[int, tuple[int, Any, Any]]:
    """Per path node: (index from 1, prefix fold, suffix fold)."""
    order = _path_order(links)
    if agg is None:
        agg = DirectAggregator(g)
    tree = {v: [w for w in links[v] if w is not None] for v in order}
    # rooted at the last node, subtree = prefix; rooted at the first node, subtree = suffix
    _, ones = rooted_aggregate(g, tree, order[-1], {v: 1 for v in order}, AggOp.SUM, agg)
    _, prefix = rooted_aggregate(g, tree, order[-1], values, op, agg)
    _, suffix = rooted_aggregate(g, tree, order[0], values, op, agg)
    return {v: (ones[v], prefix[v], suffix[v]) for v in order}


def st_path(g: Graph | None, adj: Mapping[int, Iterable[int]], s: int, t: int,
            agg: Aggregator | None = None) -> Links:
    """A simple s->t path inside the connected subgraph `adj`, as node -> (pred, succ)."""
    if s not in adj or t not in adj:
        raise ValueError("s and t must be subgraph nodes")
    if s == t:
        return {s: (None, None)}
    if agg is None:
        agg = DirectAggregator(g)
    tree = spanning_tree(g, adj, agg)
    parent, sums = rooted_aggregate(g, tree, t, {v: int(v == s) for v in tree}, AggOp.SUM, agg)
    links: Links = {}
    for v, val in sums.items():
        if val:
            pred = next((w for w in tree[v] if parent.get(w) == v and sums[w]), None)
            links[v] = (pred, parent[v])
    return links


def links_to_list(links: Mapping[int, tuple[int | None, int | None]]) -> list[int]:
    return _path_order(links)


def list_to_links(path: list[int]) -> Links:
    return {v: (path[i - 1] if i else None, path[i + 1] if i + 1 < len(path) else None)
            for i, v in enumerate(path)}

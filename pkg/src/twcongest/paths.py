"""Vertex-disjoint s-t paths or a small node cut, by augmenting through a contracted bridge graph.

Each augmentation step works on the residual structure of the current r paths:

* bridges are the components left after deleting s, t, the path nodes and the forbidden set;
  every chord (an edge between two path/terminal nodes that is not a path edge) is subdivided
  by a single-node virtual bridge so that all off-path movement goes through bridges;
* for bridge i and path y, l[i][y] / r[i][y] are the smallest / largest indices of path
  nodes adjacent to the bridge (0 when absent). A bridge adjacent to t gets r = |P|+1 on
  every path;
* bridge i can hop to bridge x along path y iff l[x][y] >= 1 and l[x][y] < r[i][y]
  (enter path y at its in-vertex, walk left, leave at an out-vertex);
* for j = 1..r the arcs D_j pick, per super-bridge, the hop target with the largest
  (r^j, ID) among targets with larger r^j, and each undirected component of D_j contracts.
  Every contraction builds a tree H_C^j over bridge nodes and path-node copies; treeness,
  disjointness and unique left endpoints are asserted.

After r rounds of contraction, a component holding an s-reachable and a t-reachable bridge
means an augmenting path exists; otherwise the rightmost entry points of the s-side bridges
form the cut.

Path-node copies are indexed by (node, j, side) with side 0 = in, 1 = out, i.e. 2r copies
per path node. Fine positions on a path: in-vertex of index i is 2i-1, out-vertex is 2i.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .aggregation import AggOp, Aggregator, DirectAggregator, spanning_tree, st_path, links_to_list
from .graph import Graph
from .sim import RoundStats


class DisjointPathsError(RuntimeError):
    """Internal invariant breach inside the disjoint-paths machinery."""


class RecoveryError(DisjointPathsError):
    pass


@dataclass
class PathSystem:
    """Vertex-disjoint paths; paths[y] is the full node list from source to sink and has ID y+1."""

    s: int
    t: int
    paths: list[list[int]]

    @property
    def r(self) -> int:
        return len(self.paths)

    def info(self) -> dict[int, tuple[int, int, int, int]]:
        """Internal node -> (path ID, index from 1, predecessor, successor)."""
        out = {}
        for y, p in enumerate(self.paths):
            for i in range(1, len(p) - 1):
                out[p[i]] = (y + 1, i, p[i - 1], p[i + 1])
        return out


@dataclass
class DisjointPathsResult:
    kind: str
    paths: list[list[int]] = field(default_factory=list)
    cut: list[int] = field(default_factory=list)
    stats: RoundStats = field(default_factory=RoundStats)
    direct_edge: bool = False
    augmentations: int = 0

    def to_json(self) -> dict:
        return {"kind": self.kind, "paths": [list(p) for p in self.paths], "cut": sorted(self.cut)}


# ---- residual graph (reference structure, also used by tests) --------------------------------

@dataclass
class ResidualGraph:
    """Residual digraph of a path system. Vertices: 's', 't', ('in', v), ('out', v), ('node', v)."""

    arcs: dict[object, set]

    def reach(self, src) -> set:
        seen = {src}
        q = deque([src])
        while q:
            a = q.popleft()
            for b in self.arcs.get(a, ()):
                if b not in seen:
                    seen.add(b)
                    q.append(b)
        return seen

    def strongly_connected(self, a, b) -> bool:
        return b in self.reach(a) and a in self.reach(b)


def _vertex_of(v, on_path: set, side: str, s: int, t: int):
    if v == s:
        return "s"
    if v == t:
        return "t"
    return (side, v) if v in on_path else ("node", v)


def build_residual(adj: Mapping[int, Iterable[int]] | Graph, s: int, t: int, paths: Sequence[Sequence[int]],
                   forbidden: Iterable[int] = ()) -> ResidualGraph:
    """Residual graph of vertex-disjoint s-t paths (full node lists), with path nodes split
    into in/out halves and forbidden nodes removed."""
    if isinstance(adj, Graph):
        adj = {v: adj.adjacency[v] for v in range(adj.n)}
    forbidden = set(forbidden)
    on_path = {v for p in paths for v in p[1:-1]}
    flow = {(p[i], p[i + 1]) for p in paths for i in range(len(p) - 1)}
    arcs: dict[object, set] = {}

    def add(a, b):
        arcs.setdefault(a, set()).add(b)

    for v in on_path:
        add(("out", v), ("in", v))
    for u in adj:
        if u in forbidden:
            continue
        for w in adj[u]:
            if w in forbidden:
                continue
            if (u, w) in flow:
                add(_vertex_of(w, on_path, "in", s, t), _vertex_of(u, on_path, "out", s, t))
            elif (w, u) not in flow:
                add(_vertex_of(u, on_path, "out", s, t), _vertex_of(w, on_path, "in", s, t))
    return ResidualGraph(arcs)


# ---- bridge state --------------------------------------------------------------------------

@dataclass
class Bridge:
    bid: int
    members: list[int]
    virtual: bool
    l: list[int]
    r: list[int]
    s_reach: bool
    t_reach: bool
    # per path: index -> smallest member adjacent to that path node
    touch: list[dict[int, int]]


@dataclass
class Arc:
    src: int  # super-bridge label
    dst: int
    y: int  # 0-based path position in ID order
    q: int  # l of dst on path y
    p: int  # r of src on path y


@dataclass
class BridgeState:
    s: int
    t: int
    paths: list[list[int]]  # ID order, full lists
    pos: dict[int, tuple[int, int]]  # internal node -> (path position y, index)
    bridges: list[Bridge]
    node_bridge: dict[int, int]
    adj: dict[int, tuple[int, ...]]  # includes virtual bridge nodes
    virtual_ends: dict[int, tuple[int, int]]
    label: list[int] = field(default_factory=list)  # bridge -> current super-bridge label
    arcs: dict[int, list[Arc]] = field(default_factory=dict)
    forests: dict[int, dict[int, tuple[set, set]]] = field(default_factory=dict)
    trees: dict[int, tuple[set, set]] = field(default_factory=dict)  # label -> (nodes, edges)

    @property
    def r(self) -> int:
        return len(self.paths)

    def plen(self, y: int) -> int:
        return len(self.paths[y]) - 2


def assign_path_ids(paths: Sequence[Sequence[int]], agg: Aggregator | None = None,
                    n: int | None = None) -> list[list[int]]:
    """Order paths so that position y holds the path with ID y+1.

    IDs r, r-1, ..., 1 go to the path holding the current global maximum node ID; that path
    then drops out. Only internal nodes take part (the shared endpoints would tie every path).
    """
    remaining = [list(p) for p in paths]
    ordered: list[list[int]] = []
    while remaining:
        if agg is not None:
            agg.stats.pa_rounds += 1  # one global max over the remaining path nodes
        top = max(remaining, key=lambda p: max(p[1:-1]) if len(p) > 2 else -1)
        ordered.append(top)
        remaining.remove(top)
    ordered.reverse()
    if agg is not None and n is not None:
        # indices via path aggregation on every path in parallel
        agg.charge_sa(3 * (math.ceil(math.log2(max(n, 2))) + 1))
    return ordered


def compute_bridges_and_lr(adj: Mapping[int, Iterable[int]], s: int, t: int, paths: list[list[int]],
                           forbidden: Iterable[int] = (), agg: Aggregator | None = None,
                           n: int | None = None) -> BridgeState:
    forbidden = set(forbidden)
    pos: dict[int, tuple[int, int]] = {}
    for y, p in enumerate(paths):
        for i in range(1, len(p) - 1):
            pos[p[i]] = (y, i)
    path_edges = {frozenset((p[i], p[i + 1])) for p in paths for i in range(len(p) - 1)}
    terminals = {s, t}
    base_adj = {v: tuple(w for w in adj[v] if w not in forbidden) for v in adj if v not in forbidden}
    off = [v for v in sorted(base_adj) if v not in pos and v not in terminals]
    offset = set(off)
    # chords get a virtual bridge node each
    next_id = max(list(base_adj) + [s, t]) + 1
    work = {v: list(base_adj[v]) for v in base_adj}
    virtual_ends: dict[int, tuple[int, int]] = {}
    for u in sorted(base_adj):
        if u in offset:
            continue
        for w in base_adj[u]:
            if w <= u or w in offset:
                continue
            if frozenset((u, w)) in path_edges or {u, w} == terminals:
                continue
            e = next_id
            next_id += 1
            virtual_ends[e] = (u, w)
            work[u].remove(w)
            work[w].remove(u)
            work[u].append(e)
            work[w].append(e)
            work[e] = [u, w]
    adj2 = {v: tuple(sorted(ws)) for v, ws in work.items()}
    bridge_nodes = off + sorted(virtual_ends)
    bset = set(bridge_nodes)
    node_bridge: dict[int, int] = {}
    bridges: list[Bridge] = []
    r = len(paths)
    for start in bridge_nodes:
        if start in node_bridge:
            continue
        comp = [start]
        node_bridge[start] = len(bridges)
        q = deque([start])
        while q:
            u = q.popleft()
            for w in adj2[u]:
                if w in bset and w not in node_bridge:
                    node_bridge[w] = len(bridges)
                    comp.append(w)
                    q.append(w)
        comp.sort()
        l = [0] * r
        rr = [0] * r
        touch: list[dict[int, int]] = [dict() for _ in range(r)]
        s_reach = t_reach = False
        for u in comp:
            for w in adj2[u]:
                if w == s:
                    s_reach = True
                elif w == t:
                    t_reach = True
                elif w in pos:
                    y, i = pos[w]
                    if i not in touch[y] or u < touch[y][i]:
                        touch[y][i] = u
        for y in range(r):
            if touch[y]:
                l[y] = min(touch[y])
                rr[y] = max(touch[y])
            if t_reach:
                rr[y] = len(paths[y]) - 1  # |P_y| + 1
        bridges.append(Bridge(comp[0], comp, comp[0] in virtual_ends, l, rr, s_reach, t_reach, touch))
    if agg is not None:
        # index broadcast plus one min and one max SA per path
        agg.charge_raw(1)
        agg.charge_sa(2 * r)
    st = BridgeState(s, t, paths, pos, bridges, node_bridge, adj2, virtual_ends)
    st.label = [b.bid for b in bridges]
    for bi, b in enumerate(bridges):
        for y in range(r):
            if b.l[y] and b.r[y] and not b.r[y] >= b.l[y] - 1:
                raise DisjointPathsError(f"bridge {b.bid}: r < l - 1 on path {y + 1}")
    return st


def _super_data(st: BridgeState) -> dict[int, dict]:
    data: dict[int, dict] = {}
    r = st.r
    for bi, b in enumerate(st.bridges):
        lab = st.label[bi]
        d = data.get(lab)
        if d is None:
            d = data[lab] = {"members": [], "l": [0] * r, "r": [0] * r, "s": False, "t": False}
        d["members"].append(bi)
        for y in range(r):
            if b.l[y] and (d["l"][y] == 0 or b.l[y] < d["l"][y]):
                d["l"][y] = b.l[y]
            if b.r[y] > d["r"][y]:
                d["r"][y] = b.r[y]
        d["s"] = d["s"] or b.s_reach
        d["t"] = d["t"] or b.t_reach
    return data


def build_Dj(st: BridgeState, j: int, agg: Aggregator | None = None, n: int | None = None) -> list[Arc]:
    """Arcs of D_j (j is 1-based) over the current super-bridges, via per-path prefix maxima."""
    data = _super_data(st)
    r = st.r
    jj = j - 1
    prefix: list[list[tuple[int, int]]] = []
    for y in range(r):
        m = st.plen(y)
        slot: list[tuple[int, int]] = [(-1, -1)] * (m + 2)
        for lab, d in data.items():
            q = d["l"][y]
            if q:
                cand = (d["r"][jj], lab)
                if cand > slot[q]:
                    slot[q] = cand
        best = (-1, -1)
        pm = [(-1, -1)] * (m + 2)
        for i in range(1, m + 2):
            if slot[i] > best:
                best = slot[i]
            pm[i] = best
        prefix.append(pm)
    arcs = []
    for lab in sorted(data):
        d = data[lab]
        best = (-1, -1)
        for y in range(r):
            p = d["r"][y]
            if p >= 2:
                c = prefix[y][p - 1]
                if c > best:
                    best = c
        # r^j is absent (no D_j arc) unless the super-bridge touches P_j, or touches s,
        # which sits at index 0 of every path; otherwise nothing could lead back to it along P_j
        if (d["r"][jj] or d["s"]) and best[0] > d["r"][jj]:
            x = best[1]
            dx = data[x]
            y = next(y for y in range(r) if dx["l"][y] and dx["l"][y] < d["r"][y])
            arcs.append(Arc(lab, x, y, dx["l"][y], d["r"][y]))
    if agg is not None:
        logn = math.ceil(math.log2(max(n or 2, 2))) + 1
        agg.charge_raw(2)  # two-phase broadcast of (r, ID) and l values
        agg.charge_sa(2 + 2 * logn)  # candidate maxima plus per-path prefix maxima
    out = {}
    for a in arcs:
        if a.src in out:
            raise DisjointPathsError("out-degree above one in D_j")
        out[a.src] = a.dst
    for start in out:
        seen = {start}
        cur = start
        while cur in out:
            cur = out[cur]
            if cur in seen:
                raise DisjointPathsError("D_j has a cycle")
            seen.add(cur)
    st.arcs[j] = arcs
    return arcs


def _member_touching(st: BridgeState, lab: int, y: int, idx: int) -> int:
    best = None
    for bi, b in enumerate(st.bridges):
        if st.label[bi] == lab:
            u = b.touch[y].get(idx)
            if u is not None and (best is None or u < best):
                best = u
    if best is None:
        raise DisjointPathsError(f"super-bridge {lab} has no member next to index {idx} of path {y + 1}")
    return best


def _is_tree(nodes: set, edges: set) -> bool:
    if len(edges) != len(nodes) - 1:
        return False
    adj: dict[object, list] = {v: [] for v in nodes}
    for a, b in edges:
        if a not in adj or b not in adj:
            return False
        adj[a].append(b)
        adj[b].append(a)
    start = next(iter(nodes))
    seen = {start}
    q = deque([start])
    while q:
        u = q.popleft()
        for w in adj[u]:
            if w not in seen:
                seen.add(w)
                q.append(w)
    return len(seen) == len(nodes)


def contract_iteration(st: BridgeState, j: int, agg: Aggregator | None = None, n: int | None = None) -> dict[int, tuple[set, set]]:
    """Contract the components of undirected D_j and build their trees H_C^j."""
    arcs = st.arcs[j] if j in st.arcs else build_Dj(st, j, agg, n)
    if j == 1:
        st.trees = {}
        for b in st.bridges:
            bnodes = set(b.members)
            sub = {u: [w for w in st.adj[u] if w in bnodes] for u in b.members}
            if len(b.members) == 1:
                tree_edges: set = set()
            else:
                t_adj = spanning_tree(None, sub, agg if agg is not None else DirectAggregator())
                tree_edges = {(("b", u), ("b", w)) for u in t_adj for w in t_adj[u] if u < w}
            st.trees[b.bid] = ({("b", u) for u in b.members}, tree_edges)
    # union-find over D_j arcs
    parent = {lab: lab for lab in st.trees}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a in arcs:
        ra, rb = find(a.src), find(a.dst)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    comp_of = {lab: find(lab) for lab in st.trees}
    # unique left endpoints per path
    left_owner: dict[tuple[int, int], int] = {}
    for a in arcs:
        key = (a.y, a.q)
        if left_owner.setdefault(key, a.dst) != a.dst:
            raise DisjointPathsError(f"two targets share left endpoint {a.q} on path {a.y + 1}")
    new_nodes: dict[int, set] = {c: set() for c in set(comp_of.values())}
    new_edges: dict[int, set] = {c: set() for c in new_nodes}
    for lab, (nodes, edges) in st.trees.items():
        c = comp_of[lab]
        new_nodes[c] |= nodes
        new_edges[c] |= edges
    # suffix minimum over fine positions on each path
    owner_of_copy: dict[object, int] = {}
    for y in range(st.r):
        m = st.plen(y)
        sent: dict[int, tuple[int, int]] = {}
        for a in arcs:
            if a.y == y:
                key = 2 * a.p - 1
                val = (2 * a.q, a.dst)
                if key not in sent or val < sent[key]:
                    sent[key] = val
        if not sent:
            continue
        path = st.paths[y]
        sm: tuple[int, int] | None = None
        for f in range(2 * m, 0, -1):
            if f in sent and (sm is None or sent[f] < sm):
                sm = sent[f]
            if sm is None or sm[0] > f:
                continue
            idx = (f + 1) // 2
            side = 1 - f % 2
            copy = ("p", path[idx], j, side)
            c = comp_of[sm[1]]
            if copy in owner_of_copy:
                raise DisjointPathsError("path copy claimed twice")
            owner_of_copy[copy] = c
            new_nodes[c].add(copy)
            if sm[0] < f:
                pidx = f // 2 if f % 2 == 1 else idx
                pside = 1 if f % 2 == 1 else 0
                prev = ("p", path[pidx], j, pside)
                new_edges[c].add((copy, prev))
            else:
                # left endpoint: attach to the target bridge's member next to this node
                u = _member_touching(st, sm[1], y, idx)
                new_edges[c].add((copy, ("b", u)))
    for a in arcs:
        c = comp_of[a.src]
        copy = ("p", st.paths[a.y][a.p], j, 0)
        if owner_of_copy.get(copy) != c:
            raise DisjointPathsError("arc entry point lies outside its component's segment")
        u = _member_touching(st, a.src, a.y, a.p)
        new_edges[c].add((copy, ("b", u)))
    seen_nodes: set = set()
    for c in new_nodes:
        if not _is_tree(new_nodes[c], new_edges[c]):
            raise DisjointPathsError(f"H_C^{j} for component {c} is not a tree")
        if seen_nodes & new_nodes[c]:
            raise DisjointPathsError(f"H_C^{j} subgraphs overlap")
        seen_nodes |= new_nodes[c]
    st.label = [comp_of[lab] for lab in st.label]
    st.trees = {c: (new_nodes[c], new_edges[c]) for c in new_nodes}
    st.forests[j] = st.trees
    if agg is not None:
        logn = math.ceil(math.log2(max(n or 2, 2))) + 1
        agg.charge_sa(2 * logn + 2)  # suffix minima, then ID broadcast inside the new trees
    return st.trees


def final_components(st: BridgeState) -> dict[int, list[int]]:
    comps: dict[int, list[int]] = {}
    for bi, lab in enumerate(st.label):
        comps.setdefault(lab, []).append(bi)
    return comps


def _hop_path_y(src: Bridge, dst: Bridge, r: int) -> int | None:
    for y in range(r):
        if dst.l[y] and src.r[y] and dst.l[y] < src.r[y]:
            return y
    return None


def _walk_in_bridge(st: BridgeState, b: Bridge, a: int, z: int) -> list[int]:
    if a == z:
        return [a]
    members = set(b.members)
    prev = {a: None}
    q = deque([a])
    while q:
        u = q.popleft()
        if u == z:
            break
        for w in st.adj[u]:
            if w in members and w not in prev:
                prev[w] = u
                q.append(w)
    out = [z]
    while prev[out[-1]] is not None:
        out.append(prev[out[-1]])
    return out[::-1]


def _prune(walk: list) -> list:
    last = {v: i for i, v in enumerate(walk)}
    out = []
    i = 0
    while i < len(walk):
        out.append(walk[i])
        i = last[walk[i]] + 1
    return out


def recover_augmenting_path(st: BridgeState) -> list:
    """Residual-graph walk from s to t through bridge hops, pruned to a simple path."""
    r = st.r
    B = st.bridges
    starts = [bi for bi in range(len(B)) if B[bi].s_reach]
    prev: dict[int, int | None] = {bi: None for bi in starts}
    q = deque(starts)
    goal = None
    while q:
        bi = q.popleft()
        if B[bi].t_reach:
            goal = bi
            break
        for bx in range(len(B)):
            if bx not in prev and _hop_path_y(B[bi], B[bx], r) is not None:
                prev[bx] = bi
                q.append(bx)
    if goal is None:
        raise RecoveryError("no bridge hop sequence from s to t")
    chain = [goal]
    while prev[chain[-1]] is not None:
        chain.append(prev[chain[-1]])
    chain.reverse()

    def gr(u: int):
        return ("virt", u) if u in st.virtual_ends else ("node", u)

    walk: list = ["s"]
    entry = min(u for u in B[chain[0]].members if st.s in st.adj[u])
    for k, bi in enumerate(chain):
        b = B[bi]
        if k + 1 < len(chain):
            nb = B[chain[k + 1]]
            y = _hop_path_y(b, nb, r)
            p, qq = b.r[y], nb.l[y]
            exit_node = b.touch[y][p]
            walk.extend(gr(u) for u in _walk_in_bridge(st, b, entry, exit_node))
            path = st.paths[y]
            walk.append(("in", path[p]))
            for i in range(p - 1, qq - 1, -1):
                walk.append(("out", path[i]))
                if i > qq:
                    walk.append(("in", path[i]))
            entry = nb.touch[y][qq]
        else:
            exit_node = min(u for u in b.members if st.t in st.adj[u])
            walk.extend(gr(u) for u in _walk_in_bridge(st, b, entry, exit_node))
            walk.append("t")
    path = _prune(walk)
    # leftward-only check on path segments
    for a, c in zip(path, path[1:]):
        if isinstance(a, tuple) and isinstance(c, tuple) and a[0] == "in" and c[0] == "out":
            y, i = st.pos[a[1]]
            if st.pos.get(c[1]) != (y, i - 1):
                raise RecoveryError("augmenting path moves rightward along a path")
    if len(set(path)) != len(path):
        raise RecoveryError("pruned augmenting path is not simple")
    return path


def apply_augmenting_path(st: BridgeState, aug: list) -> list[list[int]]:
    """Symmetric difference of the flow with the augmenting path, traced into r+1 paths."""
    flow = {(p[i], p[i + 1]) for p in st.paths for i in range(len(p) - 1)}

    def node_of(x):
        if x == "s":
            return st.s
        if x == "t":
            return st.t
        return x[1]

    added = set()
    removed = set()
    seq = list(aug)
    i = 0
    while i + 1 < len(seq):
        a, b = seq[i], seq[i + 1]
        if isinstance(b, tuple) and b[0] == "virt":
            u, w = node_of(a), node_of(seq[i + 2])
            if u != w:
                added.add((u, w))
            i += 2
            continue
        if isinstance(a, tuple) and isinstance(b, tuple) and a[0] == "in" and b[0] == "out":
            removed.add((b[1], a[1]))
        elif isinstance(a, tuple) and isinstance(b, tuple) and a[0] == "out" and b[0] == "in" and a[1] == b[1]:
            pass
        else:
            added.add((node_of(a), node_of(b)))
        i += 1
    new = (flow - removed) | added
    for u, w in list(new):
        if (w, u) in new:
            new.discard((u, w))
            new.discard((w, u))
    out_arcs: dict[int, list[int]] = {}
    for u, w in new:
        out_arcs.setdefault(u, []).append(w)
    for u, ws in out_arcs.items():
        if u != st.s and len(ws) > 1:
            raise DisjointPathsError(f"node {u} carries two units of flow")
    paths = []
    for first in sorted(out_arcs.get(st.s, [])):
        p = [st.s, first]
        while p[-1] != st.t:
            nxt = out_arcs.get(p[-1])
            if not nxt or len(p) > len(st.adj) + 2:
                raise DisjointPathsError("flow path does not reach t")
            p.append(nxt[0])
        paths.append(p)
    if len(paths) != st.r + 1:
        raise DisjointPathsError(f"augmentation produced {len(paths)} paths from {st.r}")
    return paths


def compute_cut(st: BridgeState) -> list[int]:
    comps = final_components(st)
    bs = set()
    for members in comps.values():
        if any(st.bridges[bi].s_reach for bi in members):
            bs.update(members)
    cut = []
    for y in range(st.r):
        best = 0
        for bi in bs:
            best = max(best, st.bridges[bi].r[y])
        if best > st.plen(y):
            raise DisjointPathsError("cut requested although t is on the s side")
        cut.append(st.paths[y][max(best, 1)])
    return cut


def decide_and_recover(st: BridgeState) -> tuple[str, list]:
    """('paths', r+1 paths) when some final component has s- and t-reachable bridges, else ('cut', nodes)."""
    for members in final_components(st).values():
        if any(st.bridges[bi].s_reach for bi in members) and any(st.bridges[bi].t_reach for bi in members):
            aug = recover_augmenting_path(st)
            return "paths", apply_augmenting_path(st, aug)
    return "cut", compute_cut(st)


def augment_once(adj: Mapping[int, Iterable[int]], s: int, t: int, paths: list[list[int]],
                 forbidden: Iterable[int] = (), agg: Aggregator | None = None,
                 n: int | None = None) -> tuple[str, list, BridgeState]:
    ordered = assign_path_ids(paths, agg, n)
    st = compute_bridges_and_lr(adj, s, t, ordered, forbidden, agg, n)
    for j in range(1, st.r + 1):
        build_Dj(st, j, agg, n)
        contract_iteration(st, j, agg, n)
    if agg is not None:
        agg.charge_sa(1)  # s-side broadcast inside the final trees
    kind, out = decide_and_recover(st)
    return kind, out, st


def _component_adj(adj: Mapping[int, Iterable[int]], s: int) -> dict[int, list[int]]:
    seen = {s}
    q = deque([s])
    while q:
        u = q.popleft()
        for w in adj[u]:
            if w not in seen:
                seen.add(w)
                q.append(w)
    return {v: [w for w in adj[v] if w in seen] for v in seen}


def _solve(adj: dict[int, set[int]], s: int, t: int, k: int, agg: Aggregator, n: int,
           seed_paths: list[list[int]] | None = None) -> DisjointPathsResult:
    direct = t in adj[s]
    if direct:
        adj = {v: set(ws) for v, ws in adj.items()}
        adj[s].discard(t)
        adj[t].discard(s)
        k -= 1
    paths: list[list[int]] = list(seed_paths or [])
    augmentations = 0
    if k > 0 and not paths:
        comp = _component_adj(adj, s)
        if t not in comp:
            return _finish("cut", [], [], agg, direct, augmentations)
        links = st_path(None, comp, s, t, agg)
        paths = [links_to_list(links)]
    while len(paths) < k:
        kind, out, _ = augment_once(adj, s, t, paths, (), agg, n)
        augmentations += 1
        if kind == "cut":
            return _finish("cut", paths, out, agg, direct, augmentations)
        paths = out
    return _finish("paths", paths[:max(k, 0)], [], agg, direct, augmentations)


def _finish(kind, paths, cut, agg, direct, augmentations) -> DisjointPathsResult:
    return DisjointPathsResult(kind, paths, list(cut), agg.stats, direct, augmentations)


def _network_stats(agg: Aggregator, r: int) -> None:
    if r >= 1:
        agg.stats.network_kind = "replicated"
        agg.stats.ell = max(agg.stats.ell, 2 * r)


def disjoint_paths(g: Graph, s: int, t: int, k: int, agg: Aggregator | None = None) -> DisjointPathsResult:
    """k vertex-disjoint s-t paths, or an s-t node cut of size < k.

    A direct s-t edge counts as one path; in that case a cut separates s and t only after the
    edge itself is removed (`direct_edge` is set on the result).
    """
    if k <= 0:
        raise ValueError("k must be positive")
    if s == t:
        raise ValueError("s and t must differ")
    if not (0 <= s < g.n and 0 <= t < g.n):
        raise ValueError("s or t is not a node")
    if agg is None:
        agg = DirectAggregator(g)
    adj = {v: set(g.adjacency[v]) for v in range(g.n)}
    res = _solve(adj, s, t, k, agg, g.n)
    if res.direct_edge:
        res.paths = [[s, t]] + res.paths if res.kind == "paths" else res.paths
    _network_stats(agg, len(res.paths))
    return res


def _greedy_ab(adj, a_set, b_set, limit) -> list[tuple[int, int]]:
    used = set()
    pairs = []
    for a in sorted(a_set):
        if len(pairs) >= limit:
            break
        for b in sorted(adj[a]):
            if b in b_set and b not in used:
                pairs.append((a, b))
                used.add(b)
                break
    return pairs


def disjoint_paths_sets(g: Graph, U: Iterable[int], A: Iterable[int], B: Iterable[int],
                        X: Iterable[int], k: int, agg: Aggregator | None = None) -> DisjointPathsResult:
    """k vertex-disjoint A-B paths with interiors in G[U] - X, or a cut of fewer than k nodes.

    Virtual terminals s* (joined to A) and t* (joined to B) are simulated by the harness.
    A-A and B-B edges are dropped (they never help). Direct A-B edges seed the initial
    path system greedily; later augmentations may reroute them.
    """
    if k <= 0:
        raise ValueError("k must be positive")
    U, A, B, X = set(U), set(A), set(B), set(X)
    if A & B or A & X or B & X:
        raise ValueError("A, B and X must be pairwise disjoint")
    if not X <= U:
        raise ValueError("X must lie inside U")
    if agg is None:
        agg = DirectAggregator(g)
    nodes = (U - X) | A | B
    s_star, t_star = g.n, g.n + 1
    adj: dict[int, set[int]] = {v: set() for v in nodes}
    for v in nodes:
        for w in g.adjacency[v]:
            if w not in nodes:
                continue
            if (v in A and w in A) or (v in B and w in B):
                continue
            adj[v].add(w)
    adj[s_star] = set(A)
    adj[t_star] = set(B)
    for a in A:
        adj[a].add(s_star)
    for b in B:
        adj[b].add(t_star)
    seeds = [[s_star, a, b, t_star] for a, b in _greedy_ab(adj, A, B, k)]
    if not A or not B:
        res = DisjointPathsResult("cut", [], [], agg.stats)
        return res
    res = _solve(adj, s_star, t_star, k, agg, g.n + 2, seeds)
    res.paths = [_shortest_ab_segment(p[1:-1], A, B) for p in res.paths]
    _network_stats(agg, len(res.paths))
    return res


def _shortest_ab_segment(path: list[int], A: set[int], B: set[int]) -> list[int]:
    """Cut a path down to its last A node before its first B node, so no interior node is a terminal."""
    end = next(i for i, v in enumerate(path) if v in B)
    start = max(i for i in range(end + 1) if path[i] in A)
    return path[start:end + 1]


def batch_disjoint_paths(g: Graph, instances: Sequence[tuple[Iterable[int], Iterable[int], Iterable[int], Iterable[int]]],
                         k: int | Sequence[int], agg: Aggregator | None = None) -> list[DisjointPathsResult]:
    """Run several instances with pairwise disjoint interiors U - X in lockstep.

    Terminal sets A, B and the excluded X may be shared between instances (sibling
    recursion instances share boundary nodes). Results equal solo runs. Cost is the
    maximum over instances, as they share rounds.
    """
    insts = [(set(U), set(A), set(B), set(X)) for U, A, B, X in instances]
    seen: set[int] = set()
    for U, _, _, X in insts:
        if seen & (U - X):
            raise ValueError("instances overlap: the sets U - X must be pairwise disjoint")
        seen |= U - X
    ks = [k] * len(insts) if isinstance(k, int) else list(k)
    if len(ks) != len(insts):
        raise ValueError("one k per instance expected")
    results = []
    worst = RoundStats()
    for (U, A, B, X), kk in zip(insts, ks):
        local = DirectAggregator(g)
        res = disjoint_paths_sets(g, U, A, B, X, kk, local)
        results.append(res)
        for name in ("raw_rounds", "pa_rounds", "sa_rounds", "messages_sent"):
            setattr(worst, name, max(getattr(worst, name), getattr(res.stats, name)))
        worst.ell = max(worst.ell, res.stats.ell)
    if agg is not None and results:
        worst.network_kind = "replicated" if worst.ell > 1 else "base"
        agg.stats.absorb(worst)
    return results

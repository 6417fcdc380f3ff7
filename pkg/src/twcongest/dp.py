"""Dynamic programming over a rooted tree decomposition.

Tables are computed bottom-up, one recursion layer at a time (deepest bags first), and a
solution is recovered top-down. Every child ships its table projected onto the nodes it
shares with its parent; those (state, value) pairs are what the in-charge node receives.

MIS states are independent subsets of a bag, as bitmasks (bit i = i-th smallest node ID).
DS states label every bag node IN, DOM (already dominated) or FREE (no promise yet).
Chromatic states are partitions of the bag into colour classes, as restricted-growth strings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product

from .decomposition import TreeDecomposition
from .graph import Graph
from .validators import (is_dominating, is_independent, is_proper_colouring, is_vertex_cover,
                         validate_decomposition)

PROBLEMS = ("mis", "vc", "ds", "chromatic")
NEG_INF = -math.inf

IN, DOM, FREE = 0, 1, 2


@dataclass
class DpStats:
    layers: int = 0
    pairs_streamed: int = 0
    raw_rounds: int = 0
    sa_rounds: int = 0
    max_states: int = 0

    def to_json(self) -> dict:
        return dict(self.__dict__)


@dataclass
class DpTable:
    problem: str
    order: dict[int, tuple[int, ...]]  # bag -> nodes ascending
    tables: dict[int, dict]  # bag -> state -> value
    best: dict[int, dict]  # child bag -> projection onto parent -> (value, child state)
    root: int
    value: int
    extra: dict = field(default_factory=dict)
    stats: DpStats = field(default_factory=DpStats)

    def join(self, bag: int, mask: int) -> float:
        """MIS table entry; -inf for subsets that are not independent."""
        return self.tables[bag].get(mask, NEG_INF)


@dataclass
class Solution:
    problem: str
    value: int
    members: list[int] | None = None
    colours: list[int] | None = None
    stats: DpStats = field(default_factory=DpStats)

    def to_json(self) -> dict:
        return {"problem": self.problem, "size_or_colors": self.value,
                "members_or_colors": self.colours if self.colours is not None else self.members}


def _prepare(g: Graph, decomp: TreeDecomposition) -> TreeDecomposition:
    d = decomp.with_default_metadata() if not decomp.in_charge or not decomp.depth else decomp
    par = d.parent()
    for c, p in par.items():
        if c not in d.in_charge:
            raise ValueError(f"bag {c} has no in-charge node")
        if d.bags[p] and d.in_charge[c] not in d.bags[p]:
            raise ValueError(f"in-charge node {d.in_charge[c]} of bag {c} is not in its parent bag")
    if set(d.depth) != set(d.bags):
        raise ValueError("depth metadata does not cover every bag")
    return d


def _layers(d: TreeDecomposition) -> list[int]:
    """Bags deepest first, ties by bag ID."""
    return sorted(d.bags, key=lambda b: (-d.depth[b], b))


def _lex_key(mask: int, width: int) -> tuple[int, ...]:
    return tuple((mask >> i) & 1 for i in range(width))


def _ship(stats: DpStats, layer_pairs: dict[int, int], layer: int, pairs: int) -> None:
    stats.pairs_streamed += pairs
    layer_pairs[layer] = max(layer_pairs.get(layer, 0), pairs)


def _finish_stats(stats: DpStats, layer_pairs: dict[int, int], depths: set[int]) -> None:
    stats.layers = len(depths)
    # one pair per message per round; then one SA round per layer to sum over U
    stats.raw_rounds += sum(layer_pairs.values())
    stats.sa_rounds += len(depths)


# ---- maximum independent set -------------------------------------------------------------

def _mis_upsweep(g: Graph, d: TreeDecomposition, stats: DpStats) -> DpTable:
    order = {b: tuple(sorted(nodes)) for b, nodes in d.bags.items()}
    kids = d.children()
    tables: dict[int, dict[int, int]] = {}
    best: dict[int, dict] = {}
    layer_pairs: dict[int, int] = {}
    par = d.parent()
    for b in _layers(d):
        nodes = order[b]
        pos = {v: i for i, v in enumerate(nodes)}
        conflict = [0] * len(nodes)
        for i, v in enumerate(nodes):
            for w in g.adjacency[v]:
                if w in pos:
                    conflict[i] |= 1 << pos[w]
        states = _independent_masks(conflict)
        table = {}
        for mask in states:
            total = bin(mask).count("1")
            chosen = {nodes[i] for i in range(len(nodes)) if mask >> i & 1}
            for c in kids[b]:
                key = frozenset(chosen & d.bags[c])
                hit = best[c].get(key)
                if hit is None:
                    total = None
                    break
                total += hit[0]
            if total is not None:
                table[mask] = total
        tables[b] = table
        stats.max_states = max(stats.max_states, len(table))
        if b in par:
            p = par[b]
            shared = d.bags[b] & d.bags[p]
            proj: dict[frozenset, tuple[int, int]] = {}
            width = len(nodes)
            for mask, val in table.items():
                key = frozenset(nodes[i] for i in range(width) if mask >> i & 1 and nodes[i] in shared)
                cand = (val - len(key), mask)
                old = proj.get(key)
                if old is None or cand[0] > old[0] or (cand[0] == old[0] and _lex_key(mask, width) < _lex_key(old[1], width)):
                    proj[key] = cand
            best[b] = proj
            _ship(stats, layer_pairs, d.depth[b], len(proj))
    _finish_stats(stats, layer_pairs, set(d.depth.values()))
    root_table = tables[d.root]
    value = max(root_table.values()) if root_table else 0
    return DpTable("mis", order, tables, best, d.root, value, stats=stats)


def _independent_masks(conflict: list[int]) -> list[int]:
    out = [0]
    for i, c in enumerate(conflict):
        bit = 1 << i
        out += [m | bit for m in out if not m & c]
    return sorted(out)


def extend(g: Graph, tables: DpTable, child: int, child_mask: int, parent: int, parent_mask: int) -> float:
    """Value of child subset I_c under parent subset I_p: Join(c, I_c) + |I_p| - |I_c & I_p|,
    or -inf when the two disagree on the shared nodes."""
    cn, pn = tables.order[child], tables.order[parent]
    ci = {cn[i] for i in range(len(cn)) if child_mask >> i & 1}
    pi = {pn[i] for i in range(len(pn)) if parent_mask >> i & 1}
    shared = set(cn) & set(pn)
    if ci & shared != pi & shared:
        return NEG_INF
    val = tables.join(child, child_mask)
    if val == NEG_INF:
        return NEG_INF
    return val + len(pi) - len(ci & pi)


def _mis_downsweep(g: Graph, d: TreeDecomposition, t: DpTable) -> list[int]:
    order = t.order
    root_table = t.tables[d.root]
    width = len(order[d.root])
    top = max(root_table.values()) if root_table else 0
    start = min((m for m, v in root_table.items() if v == top), key=lambda m: _lex_key(m, width), default=0)
    decided: dict[int, bool] = {}
    kids = d.children()
    stack = [(d.root, start)]
    while stack:
        b, mask = stack.pop()
        nodes = order[b]
        chosen = set()
        for i, v in enumerate(nodes):
            flag = bool(mask >> i & 1)
            if v in decided:
                if decided[v] != flag:
                    raise RuntimeError(f"node {v} changed membership between bags")
            else:
                decided[v] = flag
            if flag:
                chosen.add(v)
        for c in kids[b]:
            key = frozenset(chosen & d.bags[c])
            stack.append((c, t.best[c][key][1]))
    for v in range(g.n):
        decided.setdefault(v, False)
    return sorted(v for v, f in decided.items() if f)


# ---- minimum dominating set --------------------------------------------------------------

def _closure(table: dict[tuple, tuple]) -> dict[tuple, tuple]:
    """Let FREE inherit any cheaper DOM entry. Returns state -> (value, state of `table`)."""
    out = {st: (val, st) for st, (val, _) in table.items()}
    if not out:
        return out
    for i in range(len(next(iter(out)))):
        for st, (val, origin) in list(out.items()):
            if st[i] == DOM:
                free = st[:i] + (FREE,) + st[i + 1:]
                old = out.get(free)
                if old is None or val < old[0]:
                    out[free] = (val, origin)
    return out


def _ds_upsweep(g: Graph, d: TreeDecomposition, stats: DpStats) -> DpTable:
    order = {b: tuple(sorted(nodes)) for b, nodes in d.bags.items()}
    kids = d.children()
    par = d.parent()
    final: dict[int, dict[tuple, tuple]] = {}  # closed final table per bag
    steps: dict[int, list] = {}  # per bag: [(closed acc0), (child, raw, closed), ...]
    best: dict[int, dict] = {}
    layer_pairs: dict[int, int] = {}
    for b in _layers(d):
        nodes = order[b]
        m = len(nodes)
        pos = {v: i for i, v in enumerate(nodes)}
        nb = [[pos[w] for w in g.adjacency[v] if w in pos] for v in nodes]
        raw0: dict[tuple, tuple] = {}
        for bits in range(1 << m):
            ins = [bits >> i & 1 for i in range(m)]
            covered = [any(ins[j] for j in nb[i]) for i in range(m)]
            others = [i for i in range(m) if not ins[i]]
            for labels in product((DOM, FREE), repeat=len(others)):
                st = [IN] * m
                ok = True
                for i, lab in zip(others, labels):
                    if lab == DOM and not covered[i]:
                        ok = False
                        break
                    st[i] = lab
                if ok:
                    raw0[tuple(st)] = (sum(ins), None)
        acc = _closure(raw0)
        trail = [(None, raw0, acc)]
        for c in kids[b]:
            cnodes = order[c]
            sh_pos = [pos[v] for v in cnodes if v in pos]
            proj = best[c]
            raw: dict[tuple, tuple] = {}
            for st, (val, _) in acc.items():
                choices = []
                for i in sh_pos:
                    if st[i] == IN:
                        choices.append(((IN, IN),))
                    elif st[i] == DOM:
                        choices.append(((DOM, FREE),))
                    else:
                        choices.append(((FREE, DOM), (FREE, FREE)))
                for combo in product(*choices):
                    key = tuple(ch for _, ch in combo)
                    hit = proj.get(key)
                    if hit is None:
                        continue
                    new = list(st)
                    for i, (mine, theirs) in zip(sh_pos, combo):
                        if theirs == DOM:
                            new[i] = DOM
                    new = tuple(new)
                    total = val + hit[0]
                    old = raw.get(new)
                    if old is None or total < old[0]:
                        raw[new] = (total, (st, key))
            acc = _closure(raw)
            trail.append((c, raw, acc))
        steps[b] = trail
        final[b] = acc
        stats.max_states = max(stats.max_states, len(acc))
        if b in par:
            p = par[b]
            shared = d.bags[b] & d.bags[p]
            sh = [i for i, v in enumerate(nodes) if v in shared]
            forgot = [i for i, v in enumerate(nodes) if v not in shared]
            raw_proj: dict[tuple, tuple] = {}
            for st, (val, _) in acc.items():
                if any(st[i] == FREE for i in forgot):
                    continue
                key = tuple(st[i] for i in sh)
                cost = val - sum(1 for i in sh if st[i] == IN)
                old = raw_proj.get(key)
                if old is None or cost < old[0]:
                    raw_proj[key] = (cost, st)
            closed = _closure(raw_proj)
            best[b] = {k2: (val, raw_proj[origin][1]) for k2, (val, origin) in closed.items()}
            _ship(stats, layer_pairs, d.depth[b], len(raw_proj))
    _finish_stats(stats, layer_pairs, set(d.depth.values()))
    root_vals = [v[0] for st, v in final[d.root].items() if FREE not in st]
    value = min(root_vals) if root_vals else 0
    return DpTable("ds", order, final, best, d.root, value, extra={"steps": steps})


def _ds_downsweep(g: Graph, d: TreeDecomposition, t: DpTable) -> list[int]:
    steps = t.extra["steps"]
    root = d.root
    candidates = sorted((st for st in t.tables[root] if FREE not in st), key=lambda st: (t.tables[root][st][0], st))
    start = candidates[0] if candidates else ()
    chosen: dict[int, bool] = {}
    stack = [(root, start)]
    while stack:
        b, st = stack.pop()
        nodes = t.order[b]
        for v, lab in zip(nodes, st):
            flag = lab == IN
            if chosen.setdefault(v, flag) != flag:
                raise RuntimeError(f"node {v} changed membership between bags")
        trail = steps[b]
        cur = st
        for c, raw, acc in reversed(trail[1:]):
            origin = acc[cur][1]
            prev, key = raw[origin][1]
            stack.append((c, t.best[c][key][1]))
            cur = prev
        _, raw0, acc0 = trail[0]
        if acc0[cur][1] not in raw0:
            raise RuntimeError("broken back-pointer")
    return sorted(v for v, f in chosen.items() if f)


# ---- chromatic number --------------------------------------------------------------------

def _partitions(nodes: tuple[int, ...], g: Graph) -> list[tuple[int, ...]]:
    """Proper partitions of `nodes` as restricted-growth strings."""
    pos = {v: i for i, v in enumerate(nodes)}
    earlier = [[pos[w] for w in g.adjacency[v] if w in pos and pos[w] < i] for i, v in enumerate(nodes)]
    out = []
    cur: list[int] = []

    def grow(i: int, used: int) -> None:
        if i == len(nodes):
            out.append(tuple(cur))
            return
        for col in range(used + 1):
            if any(cur[j] == col for j in earlier[i]):
                continue
            cur.append(col)
            grow(i + 1, max(used, col + 1))
            cur.pop()

    grow(0, 0)
    return out


def _canon(labels: list[int]) -> tuple[int, ...]:
    rename: dict[int, int] = {}
    return tuple(rename.setdefault(x, len(rename)) for x in labels)


def _chromatic_upsweep(g: Graph, d: TreeDecomposition, stats: DpStats) -> DpTable:
    order = {b: tuple(sorted(nodes)) for b, nodes in d.bags.items()}
    kids = d.children()
    par = d.parent()
    tables: dict[int, dict[tuple, int]] = {}
    best: dict[int, dict] = {}
    layer_pairs: dict[int, int] = {}
    for b in _layers(d):
        nodes = order[b]
        table = {}
        for rgs in _partitions(nodes, g):
            val = max(rgs) + 1 if rgs else 0
            for c in kids[b]:
                key = _canon([col for v, col in zip(nodes, rgs) if v in d.bags[c]])
                hit = best[c].get(key)
                if hit is None:
                    val = None
                    break
                val = max(val, hit[0])
            if val is not None:
                table[rgs] = val
        tables[b] = table
        stats.max_states = max(stats.max_states, len(table))
        if b in par:
            shared = d.bags[b] & d.bags[par[b]]
            proj: dict[tuple, tuple] = {}
            for rgs, val in table.items():
                key = _canon([col for v, col in zip(nodes, rgs) if v in shared])
                old = proj.get(key)
                if old is None or (val, rgs) < old:
                    proj[key] = (val, rgs)
            best[b] = proj
            _ship(stats, layer_pairs, d.depth[b], len(proj))
    _finish_stats(stats, layer_pairs, set(d.depth.values()))
    root_table = tables[d.root]
    value = min(root_table.values()) if root_table else 0
    return DpTable("chromatic", order, tables, best, d.root, value)


def _chromatic_downsweep(g: Graph, d: TreeDecomposition, t: DpTable) -> list[int]:
    colour = [-1] * g.n
    root_table = t.tables[d.root]
    start = min(root_table, key=lambda r: (root_table[r], r)) if root_table else ()
    kids = d.children()
    stack = [(d.root, start)]
    palette = max(t.value, 1)
    while stack:
        b, rgs = stack.pop()
        nodes = t.order[b]
        # classes touching already-coloured nodes keep their colour
        cls_colour: dict[int, int] = {}
        for v, cl in zip(nodes, rgs):
            if colour[v] >= 0:
                if cls_colour.setdefault(cl, colour[v]) != colour[v]:
                    raise RuntimeError("inconsistent colour classes")
        free = iter(c for c in range(palette) if c not in set(cls_colour.values()))
        for cl in sorted(set(rgs)):
            if cl not in cls_colour:
                cls_colour[cl] = next(free)
        for v, cl in zip(nodes, rgs):
            colour[v] = cls_colour[cl]
        for c in kids[b]:
            key = _canon([cl for v, cl in zip(nodes, rgs) if v in d.bags[c]])
            stack.append((c, t.best[c][key][1]))
    for v in range(g.n):
        if colour[v] < 0:
            colour[v] = 0
    return colour


# ---- entry points ------------------------------------------------------------------------

def dp_upsweep(g: Graph, decomp: TreeDecomposition, problem: str = "mis") -> DpTable:
    problem = problem.lower()
    d = _prepare(g, decomp)
    stats = DpStats()
    if problem in ("mis", "vc"):
        return _mis_upsweep(g, d, stats)
    if problem == "ds":
        t = _ds_upsweep(g, d, stats)
        t.stats = stats
        return t
    if problem == "chromatic":
        t = _chromatic_upsweep(g, d, stats)
        t.stats = stats
        return t
    raise ValueError(f"unknown problem {problem!r}; expected one of {', '.join(PROBLEMS)}")


def dp_downsweep(g: Graph, decomp: TreeDecomposition, tables: DpTable) -> Solution:
    d = _prepare(g, decomp)
    if tables.problem == "mis":
        members = _mis_downsweep(g, d, tables)
        return Solution("mis", len(members), members, stats=tables.stats)
    if tables.problem == "ds":
        members = _ds_downsweep(g, d, tables)
        return Solution("ds", len(members), members, stats=tables.stats)
    if tables.problem == "chromatic":
        colours = _chromatic_downsweep(g, d, tables)
        return Solution("chromatic", len(set(colours)) if colours else 0, colours=colours, stats=tables.stats)
    raise ValueError(f"unknown table kind {tables.problem!r}")


def solve_problem(g: Graph, decomp: TreeDecomposition, problem: str) -> Solution:
    """Optimal MIS, VC, DS or chromatic number; the witness is checked before returning."""
    problem = problem.lower()
    if problem not in PROBLEMS:
        raise ValueError(f"unknown problem {problem!r}; expected one of {', '.join(PROBLEMS)}")
    report = validate_decomposition(g, decomp)
    if not report:
        raise ValueError(f"invalid decomposition: {report.violated} ({report.witness})")
    t = dp_upsweep(g, decomp, problem)
    sol = dp_downsweep(g, decomp, t)
    if problem == "vc":
        chosen = set(sol.members)
        cover = [v for v in range(g.n) if v not in chosen]
        sol = Solution("vc", len(cover), cover, stats=sol.stats)
    checks = {"mis": is_independent, "vc": is_vertex_cover, "ds": is_dominating}
    if problem == "chromatic":
        if not is_proper_colouring(g, sol.colours) or sol.value != t.value:
            raise RuntimeError("chromatic witness does not match the table optimum")
    else:
        if not checks[problem](g, sol.members):
            raise RuntimeError(f"{problem} witness failed its validity check")
        expected = t.value if problem != "vc" else g.n - t.value
        if sol.value != expected:
            raise RuntimeError(f"{problem} witness size {sol.value} differs from optimum {expected}")
    return sol

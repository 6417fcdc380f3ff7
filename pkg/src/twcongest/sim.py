"""Round-synchronous CONGEST simulator.

Round 0 is local initialization: every node runs its step with an empty inbox
and may send. A message sent in round r is in the receiver's inbox in round r+1.
`raw_rounds` counts the communication rounds 1..T that were executed.
"""

from __future__ import annotations

import hashlib
import random
import struct
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping

from .graph import Graph, ReplicatedGraph

WORD_BITS = 64
WORD_MIN = -(2 ** 63)
WORD_MAX = 2 ** 63 - 1
MAX_WORDS = 4


class MessageBudgetError(RuntimeError):
    def __init__(self, node: int, round_no: int, detail: str):
        self.node = node
        self.round = round_no
        super().__init__(f"node {node}, round {round_no}: {detail}")


@dataclass
class RoundStats:
    raw_rounds: int = 0
    pa_rounds: int = 0
    sa_rounds: int = 0
    messages_sent: int = 0
    network_kind: str = "base"
    ell: int = 1
    simulated_rounds: int = 0
    exhausted: bool = False
    transcript: str = ""

    def to_json(self) -> dict:
        return {
            "raw_rounds": self.raw_rounds,
            "pa_rounds": self.pa_rounds,
            "sa_rounds": self.sa_rounds,
            "messages_sent": self.messages_sent,
            "network": {"kind": self.network_kind, "ell": self.ell},
        }

    def absorb(self, other: "RoundStats") -> None:
        """Add another run's counters into this one (sequential composition)."""
        self.raw_rounds += other.raw_rounds
        self.pa_rounds += other.pa_rounds
        self.sa_rounds += other.sa_rounds
        self.messages_sent += other.messages_sent
        self.simulated_rounds += other.simulated_rounds
        self.exhausted = self.exhausted or other.exhausted
        if other.ell > self.ell:
            self.ell = other.ell
            self.network_kind = other.network_kind


def mix_seed(*parts: int) -> int:
    """Stable 64-bit hash of a tuple of integers."""
    h = hashlib.blake2b(digest_size=8)
    for p in parts:
        h.update(struct.pack("<q", p) if WORD_MIN <= p <= WORD_MAX else str(p).encode())
    return int.from_bytes(h.digest(), "little")


def node_rng(seed: int, node: int, round_no: int) -> random.Random:
    return random.Random(mix_seed(seed, node, round_no))


def check_payload(words: tuple, node: int, round_no: int) -> tuple[int, ...]:
    if len(words) > MAX_WORDS:
        raise MessageBudgetError(node, round_no, f"payload of {len(words)} words exceeds {MAX_WORDS}")
    for w in words:
        if isinstance(w, bool) or not isinstance(w, int):
            raise MessageBudgetError(node, round_no, f"payload word {w!r} is not an integer")
        if not WORD_MIN <= w <= WORD_MAX:
            raise MessageBudgetError(node, round_no, f"payload word {w} does not fit in {WORD_BITS} bits")
    return tuple(words)


class RoundContext:
    __slots__ = ("node", "round", "neighbors", "inbox", "state", "_seed", "_rng", "_outbox")

    def __init__(self, node: int, round_no: int, neighbors, inbox: dict, state: dict, seed: int):
        self.node = node
        self.round = round_no
        self.neighbors = neighbors
        self.inbox = inbox
        self.state = state
        self._seed = seed
        self._rng = None
        self._outbox: dict[int, tuple[int, ...]] = {}

    @property
    def rng(self) -> random.Random:
        if self._rng is None:
            self._rng = node_rng(self._seed, self.node, self.round)
        return self._rng

    def send(self, nbr: int, *words: int) -> None:
        if nbr not in self.neighbors:
            raise MessageBudgetError(self.node, self.round, f"{nbr} is not a neighbor")
        if nbr in self._outbox:
            raise MessageBudgetError(self.node, self.round, f"second message to {nbr} in one round")
        self._outbox[nbr] = check_payload(words, self.node, self.round)

    def broadcast(self, *words: int) -> None:
        payload = check_payload(words, self.node, self.round)
        for nbr in self.neighbors:
            if nbr in self._outbox:
                raise MessageBudgetError(self.node, self.round, f"second message to {nbr} in one round")
            self._outbox[nbr] = payload


Step = Callable[[RoundContext], None]
Halt = Callable[[dict, int], bool]


def _resolve_step(programs, node: int) -> Step:
    if callable(programs):
        return programs
    return programs[node]


def _transcript_update(h, round_no: int, sender: int, receiver: int, payload: tuple) -> None:
    h.update(struct.pack("<qqqB", round_no, sender, receiver, len(payload)))
    for w in payload:
        h.update(struct.pack("<q", w))


def run_rounds(graph: Graph, programs: Step | Mapping[int, Step], halt: Halt | None = None,
               budget: int = 10_000, seed: int = 0,
               init_states: Mapping[int, dict] | None = None) -> tuple[dict[int, dict], RoundStats]:
    """Run node programs until `halt(states, round)` holds after a round, or until quiescence
    when no predicate is given. Returns (states, stats); stats.exhausted flags a budget stop."""
    if budget <= 0:
        raise ValueError("budget must be positive")
    states = {v: dict(init_states.get(v, {})) if init_states else {} for v in range(graph.n)}
    steps = {v: _resolve_step(programs, v) for v in range(graph.n)}
    nbr_sets = [frozenset(graph.adjacency[v]) for v in range(graph.n)]
    stats = RoundStats()
    h = hashlib.sha256()
    inboxes: dict[int, dict[int, tuple]] = {v: {} for v in range(graph.n)}
    round_no = 0
    while True:
        sent = 0
        next_inbox: dict[int, dict[int, tuple]] = {v: {} for v in range(graph.n)}
        for v in range(graph.n):
            ctx = RoundContext(v, round_no, nbr_sets[v], inboxes[v], states[v], seed)
            steps[v](ctx)
            for w in sorted(ctx._outbox):
                payload = ctx._outbox[w]
                next_inbox[w][v] = payload
                _transcript_update(h, round_no, v, w, payload)
                sent += 1
        stats.messages_sent += sent
        if round_no > 0:
            stats.raw_rounds += 1
        done = halt(states, round_no) if halt is not None else (sent == 0 and round_no > 0)
        if done:
            break
        if round_no >= budget:
            stats.exhausted = True
            break
        inboxes = next_inbox
        round_no += 1
    stats.simulated_rounds = stats.raw_rounds
    stats.transcript = h.hexdigest()
    return states, stats


def run_on_replicated(rep: ReplicatedGraph, programs: Step | Mapping[int, Step], halt: Halt | None = None,
                      budget: int = 10_000, seed: int = 0,
                      init_states: Mapping[int, dict] | None = None) -> tuple[dict[int, dict], RoundStats]:
    """Execute a G^ell program while hosting all copies of v on base node v.

    Neighborhoods of copies are derived from the base adjacency instead of the materialized
    replica. Copy-to-copy traffic on one host is free; traffic over a base edge is bundled
    (at most ell^2 messages per direction), so one replicated round costs ell^2 base rounds.
    """
    if budget <= 0:
        raise ValueError("budget must be positive")
    base, ell = rep.base, rep.ell
    total = base.n * ell

    def copies(v: int) -> range:
        return range(v * ell, v * ell + ell)

    def nbrs_of(rid: int) -> frozenset[int]:
        v = rid // ell
        out = {c for c in copies(v) if c != rid}
        for u in base.adjacency[v]:
            out.update(copies(u))
        return frozenset(out)

    nbr_sets = {rid: nbrs_of(rid) for rid in range(total)}
    states = {rid: dict(init_states.get(rid, {})) if init_states else {} for rid in range(total)}
    steps = {rid: _resolve_step(programs, rid) for rid in range(total)}
    stats = RoundStats(network_kind="base" if ell == 1 else "replicated", ell=ell)
    h = hashlib.sha256()
    inboxes: dict[int, dict[int, tuple]] = {rid: {} for rid in range(total)}
    round_no = 0
    while True:
        local: list[tuple[int, int, tuple]] = []
        bundles: dict[tuple[int, int], list[tuple[int, int, tuple]]] = {}
        sent = 0
        for v in range(base.n):
            for rid in copies(v):
                ctx = RoundContext(rid, round_no, nbr_sets[rid], inboxes[rid], states[rid], seed)
                steps[rid](ctx)
                for w in sorted(ctx._outbox):
                    payload = ctx._outbox[w]
                    _transcript_update(h, round_no, rid, w, payload)
                    hw = w // ell
                    if hw == v:
                        local.append((rid, w, payload))
                    else:
                        bundles.setdefault((v, hw), []).append((rid, w, payload))
                        sent += 1
        next_inbox: dict[int, dict[int, tuple]] = {rid: {} for rid in range(total)}
        for rid, w, payload in local:
            next_inbox[w][rid] = payload
        for (a, b), msgs in bundles.items():
            if len(msgs) > ell * ell:
                raise MessageBudgetError(a, round_no, f"{len(msgs)} messages bundled toward host {b}")
            for rid, w, payload in msgs:
                next_inbox[w][rid] = payload
        stats.messages_sent += sent
        if round_no > 0:
            stats.simulated_rounds += 1
        any_sent = sent + len(local)
        done = halt(states, round_no) if halt is not None else (any_sent == 0 and round_no > 0)
        if done:
            break
        if round_no >= budget:
            stats.exhausted = True
            break
        inboxes = next_inbox
        round_no += 1
    stats.raw_rounds = stats.simulated_rounds * ell * ell
    stats.transcript = h.hexdigest()
    return states, stats


def bfs_tree_program(root: int) -> Step:
    """Distributed BFS: a node adopts the lowest-ID sender among those reaching it first."""

    def step(ctx: RoundContext) -> None:
        st = ctx.state
        if ctx.round == 0:
            if ctx.node == root:
                st["dist"] = 0
                st["parent"] = None
                ctx.broadcast(0)
            return
        if "dist" in st or not ctx.inbox:
            return
        parent = min(ctx.inbox)
        st["parent"] = parent
        st["dist"] = ctx.inbox[parent][0] + 1
        ctx.broadcast(st["dist"])

    return step


def flood_program(source: int) -> Step:
    def step(ctx: RoundContext) -> None:
        st = ctx.state
        if ctx.round == 0:
            st["token"] = ctx.node == source
            if st["token"]:
                ctx.broadcast(1)
            return
        if not st["token"] and ctx.inbox:
            st["token"] = True
            ctx.broadcast(1)

    return step


def all_hold(key: str) -> Halt:
    return lambda states, _r: all(st.get(key) for st in states.values())

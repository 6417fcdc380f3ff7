import math
import random

import pytest
from hypothesis import given, strategies as st

from twcongest.aggregation import DirectAggregator
from twcongest.generators import clique, cycle, grid, partial_ktree, path, random_connected, random_tree
from twcongest.graph import Graph, components_of
from twcongest.oracles import oracle_treewidth_exact
from twcongest.paths import disjoint_paths_sets
from twcongest.treewidth import (Instance, TwExceeded, TwStats, approx_treewidth, build_splitter, decompose,
                                 even_step, odd_step)
from twcongest.validators import validate_decomposition


def inst(U, X=(), depth=0):
    return Instance(frozenset(U), frozenset(X), depth)


def balanced(g, U, S, num, den):
    return all(den * len(c) <= num * len(U) for c in components_of(g, set(U) - set(S)))


def test_odd_step_without_boundary_is_trivial():
    assert odd_step(path(5), inst(range(5), depth=1), 1) == frozenset()


def test_odd_step_p9_between_two_ends():
    g = path(9)
    S = odd_step(g, inst(range(1, 8), {0, 8}, 1), 1)
    assert not isinstance(S, TwExceeded) and len(S) <= 2
    # the underlying query finds a single node separating the two ends
    res = disjoint_paths_sets(g, range(1, 8), {0}, {8}, set(), 3)
    assert res.kind == "cut" and len(res.cut) == 1


def test_odd_step_small_boundary_always_splits():
    # with |X| <= 3(k+1) some X' leaves at most 2|X|/3 nodes, so one side can be empty
    assert odd_step(clique(5), inst({0, 1}, {2, 3, 4}, 1), 1) == frozenset()


def test_odd_step_clique_boundary_exceeds():
    # every Y-Z split of a 7-clique boundary has a direct edge, and no X' of size <= 2 helps
    res = odd_step(clique(8), inst({0}, range(1, 8), 1), 1)
    assert isinstance(res, TwExceeded) and not res
    assert res.to_json()["verdict"] == "tw_exceeds"


def test_splitter_small_instance():
    sp = build_splitter(path(10), range(10), 20)
    # the root always joins R; every other node stays in a small component
    assert sp.R == frozenset({sp.root})


def check_splitter(g, U, B):
    sp = build_splitter(g, U, B)
    U = set(U)
    assert len(sp.R) <= len(U) // B + 1
    tree_edges = [(u, w) for u in sp.tree for w in sp.tree[u] if u < w]
    forest = Graph.from_edges(g.n, tree_edges)
    for comp in components_of(forest, U - sp.R):
        assert len(comp) < B
    assert sum(sp.weights.values()) == len(U)
    assert set(sp.weights) == set(sp.R)
    return sp


def test_splitter_path_of_ten():
    check_splitter(path(10), range(10), 3)


@pytest.mark.parametrize("seed", range(6))
def test_splitter_random_tree(seed):
    check_splitter(random_tree(30, seed), range(30), 5)


@given(st.integers(0, 10_000), st.integers(2, 8))
def test_splitter_invariants_random_graphs(seed, B):
    g = random_connected(random.Random(seed).randint(3, 40), 0.15, seed)
    check_splitter(g, range(g.n), B)


def test_even_step_leaf():
    assert even_step(path(3), inst(range(3)), 2) == frozenset(range(3))


def test_even_step_grid():
    g = grid(4, 4)
    S = even_step(g, inst(range(16)), 4)
    assert not isinstance(S, TwExceeded)
    assert len(S) <= 5 and balanced(g, range(16), S, 10, 12)


def test_even_step_c5_finds_two_node_separator():
    g = cycle(5)
    S = even_step(g, inst(range(5)), 1)
    assert not isinstance(S, TwExceeded)
    assert len(S) <= 2 and balanced(g, range(5), S, 10, 12)


def test_even_step_small_clique_still_balances():
    # removing 2 nodes of K6 leaves 4 <= (10/12) * 6, so a separator exists at k = 1
    g = clique(6)
    S = even_step(g, inst(range(6)), 1)
    assert not isinstance(S, TwExceeded) and len(S) <= 2 and balanced(g, range(6), S, 10, 12)


def test_even_step_clique_exceeds():
    assert isinstance(even_step(clique(13), inst(range(13)), 1), TwExceeded)


def test_decompose_single_node():
    d = decompose(Graph.from_edges(1, []), 1)
    assert list(d.bags.values()) == [frozenset({0})] and d.width == 0


def test_decompose_p20():
    g = path(20)
    stats = TwStats()
    d = decompose(g, 1, stats=stats)
    assert validate_decomposition(g, d, 11)
    assert stats.violations == []


def test_decompose_k6_at_k1_stays_within_contract():
    # tw(K6) = 5 <= 7*1 + 4, so success is allowed; if it succeeds, the width claim must hold
    g = clique(6)
    res = decompose(g, 1)
    if not isinstance(res, TwExceeded):
        assert validate_decomposition(g, res, 11)


def test_decompose_k13_exceeds():
    # tw(K13) = 12 > 7*1 + 4, so k = 1 must be rejected
    res = decompose(clique(13), 1)
    assert isinstance(res, TwExceeded) and res.k == 1


def test_decompose_disconnected():
    g = Graph.from_edges(7, [(0, 1), (1, 2), (3, 4), (5, 6)])
    d = decompose(g, 1)
    assert validate_decomposition(g, d, 11)


def test_decompose_rejects_k0():
    with pytest.raises(ValueError):
        decompose(path(3), 0)


def test_decompose_metadata():
    g = grid(3, 5)
    d = decompose(g, 3)
    par = d.parent()
    assert d.depth == d.compute_depths()
    for child, parent in par.items():
        assert d.in_charge[child] in d.bags[parent]


def test_approx_tree():
    g = random_tree(25, 3)
    k, d = approx_treewidth(g)
    assert k == 1 and validate_decomposition(g, d, 11)


def test_approx_c6():
    g = cycle(6)
    k, d = approx_treewidth(g)
    assert k <= 2 and d.width <= 18 and validate_decomposition(g, d)


def test_approx_k7():
    g = clique(7)
    k, d = approx_treewidth(g)
    assert math.ceil((6 - 4) / 7) <= k <= 6
    assert d.width >= 6 and validate_decomposition(g, d, 7 * k + 4)


def test_rounds_are_charged():
    g = grid(4, 4)
    agg = DirectAggregator(g)
    stats = TwStats()
    decompose(g, 4, agg, stats)
    assert agg.stats.pa_rounds > 0 and agg.stats.sa_rounds > 0
    assert stats.batches >= 1 and stats.dp_queries >= stats.batches


@given(st.integers(0, 100_000), st.sampled_from((1, 2, 3)))
def test_partial_ktrees_decompose(seed, k):
    rng = random.Random(seed)
    g = partial_ktree(k, rng.randint(k + 1, 30), rng.choice((0.0, 0.2, 0.5)), seed).graph
    stats = TwStats()
    d = decompose(g, k, stats=stats)
    assert not isinstance(d, TwExceeded)
    assert validate_decomposition(g, d, 7 * k + 4)
    assert stats.violations == []


@given(st.integers(0, 100_000), st.sampled_from((1, 2, 3)))
def test_verdicts_are_sound(seed, k):
    rng = random.Random(seed)
    g = random_connected(rng.randint(4, 10), rng.choice((0.3, 0.5, 0.7)), seed)
    res = decompose(g, k)
    if isinstance(res, TwExceeded):
        assert oracle_treewidth_exact(g) > k
    else:
        assert validate_decomposition(g, res, 7 * k + 4)


@pytest.mark.parametrize("seed", range(6))
def test_approx_never_above_exact(seed):
    g = random_connected(9, 0.5, seed)
    k, d = approx_treewidth(g)
    tw = oracle_treewidth_exact(g)
    assert k <= max(tw, 1) and tw <= 7 * k + 4
    assert validate_decomposition(g, d, 7 * k + 4)

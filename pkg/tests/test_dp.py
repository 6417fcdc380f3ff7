import random

import pytest
from hypothesis import given, strategies as st

from twcongest.decomposition import TreeDecomposition, single_bag
from twcongest.dp import NEG_INF, dp_downsweep, dp_upsweep, extend, solve_problem
from twcongest.generators import clique, cycle, grid, partial_ktree, path, random_connected
from twcongest.graph import Graph
from twcongest.oracles import oracle_bruteforce
from twcongest.treewidth import approx_treewidth, decompose
from twcongest.validators import is_dominating, is_independent, is_proper_colouring, is_vertex_cover

from helpers import petersen

P3_DECOMP = TreeDecomposition({0: {0, 1}, 1: {1, 2}}, [(0, 1)], 0)


def check_witness(g, problem, sol):
    if problem == "mis":
        assert is_independent(g, sol.members)
    elif problem == "vc":
        assert is_vertex_cover(g, sol.members)
    elif problem == "ds":
        assert is_dominating(g, sol.members)
    else:
        assert is_proper_colouring(g, sol.colours)
        assert len(set(sol.colours)) == sol.value


def test_k3_single_bag_join_values():
    t = dp_upsweep(clique(3), single_bag(range(3)), "mis")
    for mask in range(8):
        size = bin(mask).count("1")
        assert t.join(0, mask) == (size if size <= 1 else NEG_INF)


def test_p3_two_bags():
    g = path(3)
    t = dp_upsweep(g, P3_DECOMP, "mis")
    assert t.value == 2
    sol = dp_downsweep(g, P3_DECOMP, t)
    assert sorted(sol.members) == [0, 2]


def test_extend_guard():
    g = path(3)
    t = dp_upsweep(g, P3_DECOMP, "mis")
    # bag 1 orders (1, 2); bag 0 orders (0, 1)
    assert extend(g, t, 1, 0b10, 0, 0b01) == 2  # child {2}, parent {0}
    assert extend(g, t, 1, 0b01, 0, 0b00) == NEG_INF  # disagree on node 1
    assert extend(g, t, 1, 0b11, 0, 0b10) == NEG_INF  # child subset not independent


def test_empty_graph():
    sol = solve_problem(Graph.from_edges(0, []), single_bag([]), "mis")
    assert sol.value == 0 and sol.members == []


def test_edgeless_graph_mis_is_everything():
    g = Graph.from_edges(5, [])
    sol = solve_problem(g, approx_treewidth(g)[1], "mis")
    assert sol.value == 5


@pytest.mark.parametrize("g, expected", [
    (clique(4), {"mis": 1, "vc": 3, "ds": 1, "chromatic": 4}),
    (cycle(5), {"mis": 2, "vc": 3, "ds": 2, "chromatic": 3}),
    (path(6), {"mis": 3, "vc": 3, "ds": 2, "chromatic": 2}),
    (petersen(), {"mis": 4, "vc": 6, "ds": 3, "chromatic": 3}),
])
def test_known_optima(g, expected):
    _, d = approx_treewidth(g)
    for problem, value in expected.items():
        sol = solve_problem(g, d, problem)
        assert sol.value == value
        check_witness(g, problem, sol)


@given(st.integers(0, 100_000), st.sampled_from(("mis", "vc", "ds", "chromatic")))
def test_matches_brute_force(seed, problem):
    rng = random.Random(seed)
    g = random_connected(rng.randint(2, 10), rng.choice((0.2, 0.35, 0.5)), seed)
    _, d = approx_treewidth(g)
    sol = solve_problem(g, d, problem)
    assert sol.value == oracle_bruteforce(g, problem).value
    check_witness(g, problem, sol)


@pytest.mark.parametrize("problem", ["mis", "ds", "chromatic"])
def test_certificate_decomposition(problem):
    # the generator's own clique-tree decomposition is a valid input too
    gen = partial_ktree(2, 11, 0.2, 7)
    sol = solve_problem(gen.graph, gen.certificate, problem)
    assert sol.value == oracle_bruteforce(gen.graph, problem).value


def test_large_instance_witnesses_are_valid():
    g = grid(5, 8)
    d = decompose(g, 5)
    for problem in ("mis", "vc", "ds", "chromatic"):
        check_witness(g, problem, solve_problem(g, d, problem))
    assert solve_problem(g, d, "chromatic").value == 2
    assert solve_problem(g, d, "mis").value == 20


def test_stats_are_filled():
    g = grid(3, 4)
    _, d = approx_treewidth(g)
    sol = solve_problem(g, d, "mis")
    assert sol.stats.layers >= 1 and sol.stats.sa_rounds == sol.stats.layers
    assert sol.stats.pairs_streamed >= len(d.bags) - 1


def test_invalid_decomposition_rejected():
    g = path(3)
    missing_edge = TreeDecomposition({0: {0, 1}, 1: {2}}, [(0, 1)], 0)
    with pytest.raises(ValueError, match="invalid decomposition"):
        solve_problem(g, missing_edge, "mis")


def test_unknown_problem():
    with pytest.raises(ValueError, match="unknown problem"):
        solve_problem(path(2), single_bag([0, 1]), "tsp")


def test_in_charge_outside_parent_bag():
    d = TreeDecomposition({0: {0, 1}, 1: {1, 2}}, [(0, 1)], 0, {0: 0, 1: 1}, {1: 2})
    with pytest.raises(ValueError, match="in-charge"):
        dp_upsweep(path(3), d, "mis")


def test_solution_json():
    sol = solve_problem(cycle(5), single_bag(range(5)), "chromatic")
    out = sol.to_json()
    assert out["problem"] == "chromatic" and out["size_or_colors"] == 3
    assert len(out["members_or_colors"]) == 5

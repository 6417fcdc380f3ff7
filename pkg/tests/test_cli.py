import json
import subprocess
import sys

import pytest

from twcongest.cli import run_cli
from twcongest.decomposition import TreeDecomposition
from twcongest.generators import clique, cycle, path
from twcongest.graph import write_graph

from helpers import two_triangles


@pytest.fixture
def graph_file(tmp_path):
    def make(g, name="g.txt"):
        p = tmp_path / name
        write_graph(g, p)
        return str(p)
    return make


def run(capsys, argv):
    code = run_cli(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_treewidth_path(capsys, graph_file, tmp_path):
    stats = tmp_path / "stats.json"
    code, out, _ = run(capsys, ["treewidth", graph_file(path(20)), "--k", "1", "--stats-json", str(stats)])
    assert code == 0
    obj = json.loads(out)
    assert obj["width"] <= 11 and obj["k"] == 1
    data = json.loads(stats.read_text())
    assert data["rounds"]["pa_rounds"] > 0 and data["treewidth"]["violations"] == []


def test_treewidth_verdict_with_oracle_check(capsys, graph_file):
    code, out, _ = run(capsys, ["treewidth", graph_file(clique(13)), "--k", "1", "--oracle-check"])
    assert code == 0 and json.loads(out)["verdict"] == "tw_exceeds"


def test_treewidth_approx(capsys, graph_file):
    code, out, _ = run(capsys, ["treewidth", graph_file(cycle(8)), "--approx", "--oracle-check"])
    assert code == 0 and json.loads(out)["k"] <= 2


def test_treewidth_flag_conflict(capsys, graph_file):
    code, _, err = run(capsys, ["treewidth", graph_file(path(4)), "--k", "1", "--approx"])
    assert code == 2 and "mutually exclusive" in err


def test_disjoint_paths_k5(capsys, graph_file):
    code, out, _ = run(capsys, ["disjoint-paths", graph_file(clique(5)), "--s", "0", "--t", "4", "--k", "3",
                                "--oracle-check"])
    obj = json.loads(out)
    assert code == 0 and obj["kind"] == "paths" and len(obj["paths"]) == 3


def test_disjoint_paths_cut(capsys, graph_file):
    code, out, _ = run(capsys, ["disjoint-paths", graph_file(two_triangles()), "--s", "0", "--t", "4", "--k", "2",
                                "--oracle-check"])
    obj = json.loads(out)
    assert code == 0 and obj["kind"] == "cut" and obj["cut"] == [2]


def test_disjoint_paths_bad_terminal(capsys, graph_file):
    code, _, err = run(capsys, ["disjoint-paths", graph_file(path(3)), "--s", "0", "--t", "9", "--k", "1"])
    assert code == 2 and "not a node" in err


def test_solve_with_and_without_decomposition(capsys, graph_file, tmp_path):
    g = cycle(5)
    code, out, _ = run(capsys, ["solve", graph_file(g), "--problem", "mis", "--oracle-check"])
    assert code == 0 and json.loads(out)["size_or_colors"] == 2
    d = tmp_path / "d.json"
    d.write_text(TreeDecomposition({0: {0, 1, 2, 3, 4}}, [], 0).dumps())
    code, out, _ = run(capsys, ["solve", graph_file(g), "--problem", "chromatic", "--decomp", str(d)])
    assert code == 0 and json.loads(out)["size_or_colors"] == 3


def test_solve_rejects_invalid_decomposition(capsys, graph_file, tmp_path):
    d = tmp_path / "d.json"
    d.write_text(json.dumps({"bags": {"0": [0, 1]}, "edges": [], "root": 0}))
    code, _, err = run(capsys, ["solve", graph_file(path(3)), "--problem", "ds", "--decomp", str(d)])
    assert code == 1 and "invalid decomposition" in err


def test_validate(capsys, graph_file, tmp_path):
    g = path(3)
    good = tmp_path / "good.json"
    good.write_text(json.dumps({"bags": {"0": [0, 1], "1": [1, 2]}, "edges": [[0, 1]], "root": 0}))
    code, out, _ = run(capsys, ["validate", graph_file(g), str(good), "--max-width", "1"])
    assert code == 0 and json.loads(out)["ok"]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"bags": {"0": [0, 1], "1": [2]}, "edges": [[0, 1]], "root": 0}))
    code, out, _ = run(capsys, ["validate", graph_file(g), str(bad)])
    obj = json.loads(out)
    assert code == 1 and obj["violated"] == "edge" and obj["witness"] == [1, 2]


def test_validate_malformed_json(capsys, graph_file, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = run(capsys, ["validate", graph_file(path(3)), str(bad)])
    assert code == 2 and "malformed" in err


def test_gen_is_deterministic(capsys, tmp_path):
    out_a = tmp_path / "a.txt"
    code = run_cli(["gen", "partial_ktree", "n=15", "k=2", "p=0.3", "--seed", "5", "-o", str(out_a)])
    assert code == 0
    run_cli(["gen", "partial_ktree", "n=15", "k=2", "p=0.3", "--seed", "5"])
    assert capsys.readouterr().out == out_a.read_text()


def test_gen_bad_params(capsys):
    code, _, err = run(capsys, ["gen", "path", "n"])
    assert code == 2 and "key=value" in err
    code, _, _ = run(capsys, ["gen", "grid", "rows=2"])
    assert code == 2


def test_missing_file_and_bad_graph(capsys, tmp_path):
    code, _, err = run(capsys, ["treewidth", str(tmp_path / "nope.txt")])
    assert code == 2 and "no such file" in err
    broken = tmp_path / "broken.txt"
    broken.write_text("2 1\n0 0\n")
    code, _, err = run(capsys, ["treewidth", str(broken)])
    assert code == 2 and "line 2" in err


def test_unknown_subcommand(capsys):
    assert run_cli(["frobnicate"]) == 2


def test_module_entry_point(tmp_path):
    p = tmp_path / "g.txt"
    write_graph(path(4), p)
    proc = subprocess.run([sys.executable, "-m", "twcongest", "treewidth", str(p)], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["k"] == 1

import json

import pytest

from collatz_lab.certificates import certify
from collatz_lab.collatztree import (
    CHECKS,
    StrataUnbounded,
    build_hotel,
    build_tree,
    check_strata_properties,
    children,
    export_graph,
    hotel_coords,
    in_stratum,
    max_depth_limit,
    parent,
    stratum,
)
from collatz_lab.trajectories import run_cl


def test_children_examples():
    assert children(1) == [2]
    assert children(4) == [8]  # (4-1)/3 = 1 is the root, not a child
    assert children(16) == [32, 5]
    assert children(10) == [20, 3]
    assert children(22) == [44, 7]
    assert children(28) == [56, 9]
    assert children(34) == [68, 11]
    assert children(40) == [80, 13]
    assert children(6) == [12]


def test_parent_inverts_children():
    for v in range(1, 3000):
        for c in children(v):
            assert parent(c) == v
    with pytest.raises(ValueError):
        parent(1)


def test_tree_first_levels():
    t = build_tree(8)
    assert t.levels == [[1], [2], [4], [8], [16], [5, 32], [10, 64], [3, 20, 21, 128],
                        [6, 40, 42, 256]]


def test_tree_depth_is_trajectory_length():
    t = build_tree(20)
    for v, d in t.depth.items():
        assert run_cl(v, 10**4).outcome.steps == d


def test_tree_edges_acyclic_and_connected():
    t = build_tree(20)
    nodes = set(t.depth)
    edges = t.edges()
    assert len(edges) == len(nodes) - 1
    root = {v: v for v in nodes}

    def find(v):
        while root[v] != v:
            root[v] = root[root[v]]
            v = root[v]
        return v

    for a, b in edges:
        ra, rb = find(a), find(b)
        assert ra != rb, f"edge {a}->{b} closes a cycle"
        root[ra] = rb
    assert len({find(v) for v in nodes}) == 1


def test_tree_limit(monkeypatch):
    assert max_depth_limit() == 30
    monkeypatch.setenv("COLLATZ_LAB_MAX_DEPTH", "4")
    with pytest.raises(ValueError):
        build_tree(5)
    assert build_tree(4).max_depth == 4
    monkeypatch.setenv("COLLATZ_LAB_MAX_DEPTH", "lots")
    with pytest.raises(ValueError):
        max_depth_limit()


@pytest.mark.parametrize("n, s", [(1, 0), (16, 0), (5, 1), (10, 1), (21, 1), (3, 2),
                                  (13, 2), (17, 3), (11, 4), (27, 41)])
def test_stratum_examples(n, s):
    assert stratum(n) == s
    assert in_stratum(n, s)


def test_stratum_bound():
    with pytest.raises(StrataUnbounded):
        stratum(10**30 + 7, bound=5)  # fresh value, nothing memoised
    with pytest.raises(ValueError):
        stratum(0)


def test_stratum_matches_certificate_small():
    for n in range(1, 5000):
        assert stratum(n) == certify(n).x


def test_in_stratum_exclusive():
    for n in range(1, 500):
        s = stratum(n)
        assert [x for x in range(s + 3) if in_stratum(n, x)] == [s]


def test_strata_report():
    rep = check_strata_properties(2**10)
    assert rep.ok, rep.witnesses
    assert set(rep.passed) == set(CHECKS)
    assert rep.passed["partition"] == 2**10
    assert rep.three_n_plus_one_j1 > 0


def test_hotel_coords():
    assert hotel_coords(1) == (0, 0)
    assert hotel_coords(12) == (1, 2)
    for n in range(1, 2000):
        tower, floor = hotel_coords(n)
        assert n == 2**floor * (2 * tower + 1)


def test_hotel_edges():
    g = build_hotel(20)
    assert g.out_edges(1) == []
    assert g.out_edges(8) == [(8, 4, "green")]
    assert g.out_edges(5) == [(5, 16, "red")]
    assert g.out_edges(19) == [(19, 58, "red")]
    assert all(len(g.out_edges(v)) == 1 for v in range(2, 21))


@pytest.mark.parametrize("kind, bound", [("tree", 10), ("hotel", 30)])
@pytest.mark.parametrize("fmt", ["dot", "json"])
def test_exports_deterministic(kind, bound, fmt):
    a = export_graph(kind, bound, fmt)
    assert a == export_graph(kind, bound, fmt)
    if fmt == "json":
        json.loads(a)
    else:
        assert a.startswith("digraph") and a.rstrip().endswith("}")


def test_tree_dot_colors():
    dot = export_graph("tree", 6, "dot")
    assert '"5" -> "16" [color=red];' in dot
    assert '"32" -> "16" [color=green];' in dot


def test_export_rejects_unknown():
    with pytest.raises(ValueError):
        export_graph("forest", 3, "dot")
    with pytest.raises(ValueError):
        export_graph("tree", 3, "svg")

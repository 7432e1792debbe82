import math

import networkx as nx
import numpy as np
import pytest
from conftest import snapshots, star
from hypothesis import given
from oracles import er_snapshot

from triadpos import centrality as c
from triadpos.temporal_graph import Snapshot


def to_nx(s: Snapshot) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(s.nodes)
    g.add_edges_from((s.nodes[i], s.nodes[j]) for i, j in s.edges())
    return g


def test_star_center(star3):
    rows = c.baseline_features(star3)
    r = rows["c"]
    assert r.degree == 3 and r.clustering == 0
    assert r.betweenness == 3 and r.closeness == 1.0
    assert r.efficiency == 1.0 and r.hierarchy == 0.0
    assert math.isclose(r.constraint, 1 / 3, abs_tol=1e-15)
    assert rows["x"].constraint == 1.0


def test_triangle_member_efficiency():
    s = Snapshot.from_edges("abc", [("a", "b"), ("b", "c"), ("a", "c")])
    eff, _, _ = c.burt_measures(s, "a")
    assert eff == 0.5


def test_path_pagerank():
    s = Snapshot.from_edges("abc", [("a", "b"), ("b", "c")])
    pr = c.pagerank(s)
    assert pr[1] > pr[0] and math.isclose(pr[0], pr[2], rel_tol=1e-12)
    assert math.isclose(pr.sum(), 1.0, abs_tol=1e-12)


def test_isolated_node_features():
    s = Snapshot.from_edges("abc", [("a", "b")])
    r = c.baseline_features(s)["c"]
    assert (r.degree, r.betweenness, r.closeness, r.efficiency, r.constraint) == (0, 0.0, 0.0, 0.0, 0.0)


def test_hierarchy_unequal_constraint():
    # ego a with alters b, c, d where b-c are tied: constraint terms differ
    s = Snapshot.from_edges("abcd", [("a", "b"), ("a", "c"), ("a", "d"), ("b", "c")])
    eff, con, hier = c.burt_measures(s, "a")
    p = 1 / 3
    term_b = (p + p * 0.5) ** 2
    term_d = p ** 2
    terms = [term_b, term_b, term_d]
    mean = sum(terms) / 3
    expected = sum((t / mean) * math.log(t / mean) for t in terms) / (3 * math.log(3))
    assert math.isclose(con, sum(terms), rel_tol=1e-12)
    assert math.isclose(hier, expected, rel_tol=1e-12)
    assert math.isclose(eff, (3 - 2 / 3) / 3, rel_tol=1e-12)


@pytest.mark.parametrize("seed", range(6))
def test_matches_networkx(seed):
    s = er_snapshot(25, 0.15, seed)
    g = to_nx(s)
    rows = c.baseline_features(s)
    bc = nx.betweenness_centrality(g, normalized=False)
    cl = nx.closeness_centrality(g, wf_improved=True)
    cc = nx.clustering(g)
    pr = nx.pagerank(g, alpha=0.85, tol=1e-14, max_iter=1000)
    con = nx.constraint(g)
    es = nx.effective_size(g)
    for v, r in rows.items():
        assert math.isclose(r.betweenness, bc[v], rel_tol=1e-9, abs_tol=1e-12)
        assert math.isclose(r.closeness, cl[v], rel_tol=1e-9, abs_tol=1e-12)
        assert math.isclose(r.clustering, cc[v], rel_tol=1e-12, abs_tol=1e-12)
        assert math.isclose(r.pagerank, pr[v], rel_tol=1e-8)
        if r.degree:
            assert math.isclose(r.constraint, con[v], rel_tol=1e-9)
            assert math.isclose(r.efficiency, es[v] / r.degree, rel_tol=1e-9)


@given(snapshots(min_nodes=1))
def test_pagerank_is_a_distribution(s):
    pr = c.pagerank(s)
    assert math.isclose(pr.sum(), 1.0, abs_tol=1e-9)
    assert (pr > 0).all()


@given(snapshots())
def test_clustering_definition(s):
    tri = c.triangles(s)
    cc = c.clustering(s, tri)
    for i in range(s.n):
        d = int(s.degrees[i])
        expected = tri[i] / (d * (d - 1) / 2) if d >= 2 else 0.0
        assert cc[i] == expected


@given(snapshots())
def test_triangle_total_divisible_by_three(s):
    tri = c.triangles(s)
    assert tri.sum() % 3 == 0


def test_feature_rows_written(tmp_path):
    rows = c.baseline_features(star())
    path = tmp_path / "f.csv"
    with path.open("w") as fh:
        c.write_feature_rows(rows, fh)
    lines = path.read_text().splitlines()
    assert lines[0].split(",") == ["node", *c.FEATURE_COLUMNS]
    assert len(lines) == 5
    assert np.allclose([float(x) for x in lines[1].split(",")[1:]], rows["c"].values())

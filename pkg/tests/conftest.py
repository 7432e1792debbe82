from __future__ import annotations

import sys
from itertools import combinations
from pathlib import Path

import pytest
from hypothesis import settings, strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from triadpos.temporal_graph import Snapshot, TemporalGraph  # noqa: E402

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@st.composite
def snapshots(draw, min_nodes: int = 0, max_nodes: int = 12):
    n = draw(st.integers(min_nodes, max_nodes))
    nodes = [f"n{i:02d}" for i in range(n)]
    pairs = list(combinations(nodes, 2))
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Snapshot.from_edges(nodes, [p for p, keep in zip(pairs, mask) if keep])


@st.composite
def temporal_graphs(draw, max_nodes: int = 10, max_time: int = 6, max_records: int = 40):
    n = draw(st.integers(2, max_nodes))
    nodes = [f"n{i:02d}" for i in range(n)]
    recs = draw(st.lists(
        st.tuples(st.sampled_from(nodes), st.sampled_from(nodes), st.integers(0, max_time)),
        min_size=1, max_size=max_records,
    ))
    recs = [r for r in recs if r[0] != r[1]]
    if not recs:
        recs = [(nodes[0], nodes[1], 0)]
    return TemporalGraph.from_records(recs)


def star(center="c", leaves=("x", "y", "z")) -> Snapshot:
    return Snapshot.from_edges([center, *leaves], [(center, x) for x in leaves])


@pytest.fixture
def star3() -> Snapshot:
    return star()


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n])

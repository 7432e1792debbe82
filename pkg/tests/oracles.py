"""Exhaustive reference implementations used as test oracles. Deliberately
naive: every triple, every pair, every threshold."""

from __future__ import annotations

from itertools import combinations

import numpy as np

from triadpos.temporal_graph import Snapshot


def er_snapshot(n: int, p: float, seed: int, prefix: str = "v") -> Snapshot:
    rng = np.random.default_rng(seed)
    nodes = [f"{prefix}{i:02d}" for i in range(n)]
    edges = [(nodes[i], nodes[j]) for i, j in combinations(range(n), 2) if rng.random() < p]
    return Snapshot.from_edges(nodes, edges)


def er_pair(n: int, p: float, q: float, seed: int) -> tuple[Snapshot, Snapshot]:
    """Cumulative pair: the second snapshot adds each missing edge with
    probability ``q``."""
    rng = np.random.default_rng(seed)
    nodes = [f"v{i:02d}" for i in range(n)]
    before, after = [], []
    for i, j in combinations(range(n), 2):
        if rng.random() < p:
            before.append((nodes[i], nodes[j]))
            after.append((nodes[i], nodes[j]))
        elif rng.random() < q:
            after.append((nodes[i], nodes[j]))
    return Snapshot.from_edges(nodes, before, 0), Snapshot.from_edges(nodes, after, 1)


def _edges_in(s: Snapshot, tri) -> int:
    a, b, c = tri
    return s.has_edge(a, b) + s.has_edge(a, c) + s.has_edge(b, c)


def triad_classes(s: Snapshot) -> tuple[int, int, int, int]:
    out = [0, 0, 0, 0]
    for tri in combinations(range(s.n), 3):
        out[_edges_in(s, tri)] += 1
    return tuple(out)


def positions(s: Snapshot) -> dict:
    """Position census by visiting every triple and assigning each member."""
    prof = {v: [0] * 5 for v in s.nodes}
    for tri in combinations(range(s.n), 3):
        k = _edges_in(s, tri)
        if k == 0:
            continue
        for x in tri:
            others = [y for y in tri if y != x]
            deg_in = sum(s.has_edge(x, y) for y in others)
            if k == 1:
                prof[s.nodes[x]][0 if deg_in == 1 else 1] += 1
            elif k == 2:
                prof[s.nodes[x]][3 if deg_in == 2 else 2] += 1
            else:
                prof[s.nodes[x]][4] += 1
    return {v: tuple(c) for v, c in prof.items()}


def collocation(s: Snapshot, u: int, v: int) -> tuple[int, int, int, int]:
    out = [0, 0, 0, 0]
    for w in range(s.n):
        if w in (u, v):
            continue
        a, b = s.has_edge(u, w), s.has_edge(v, w)
        out[3 if a and b else 1 if a else 2 if b else 0] += 1
    return tuple(out)


def evolution_counts(s0: Snapshot, s1: Snapshot) -> np.ndarray:
    """Transition counts by classifying every triple of ``s0``'s nodes at both times."""
    idx1 = s1.index
    m = np.zeros((4, 4), dtype=np.int64)
    for tri in combinations(range(s0.n), 3):
        k0 = _edges_in(s0, tri)
        j = [idx1[s0.nodes[x]] for x in tri]
        k1 = s1.has_edge(j[0], j[1]) + s1.has_edge(j[0], j[2]) + s1.has_edge(j[1], j[2])
        m[k0, k1] += 1
    return m


def auc_pairs(scores, labels) -> float:
    pos = [s for s, y in zip(scores, labels) if y]
    neg = [s for s, y in zip(scores, labels) if not y]
    good = sum(1.0 if p > q else 0.5 if p == q else 0.0 for p in pos for q in neg)
    return good / (len(pos) * len(neg))


def aupr_steps(scores, labels) -> float:
    """Sum over distinct thresholds, high to low, of precision times the
    recall gained by lowering the threshold to that value."""
    P = sum(labels)
    total, prev_recall = 0.0, 0.0
    for thr in sorted(set(scores), reverse=True):
        picked = [y for s, y in zip(scores, labels) if s >= thr]
        tp = sum(picked)
        recall = tp / P
        total += (recall - prev_recall) * (tp / len(picked))
        prev_recall = recall
    return total


def lt_zero_threshold_spread(s: Snapshot, seeds) -> int:
    """Size of the union of the seeds' connected components."""
    seen = set()
    stack = [s.index[v] for v in seeds]
    while stack:
        x = stack.pop()
        if x in seen:
            continue
        seen.add(x)
        stack.extend(s.neighbors[x])
    return len(seen)

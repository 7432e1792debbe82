"""Nodal baseline features: degree, betweenness, closeness, clustering,
PageRank and Burt's structural-hole measures (efficiency, constraint,
hierarchy)."""

from __future__ import annotations

import math
from dataclasses import astuple, dataclass, fields

import numba
import numpy as np

from .temporal_graph import Snapshot

PAGERANK_DAMPING = 0.85
PAGERANK_TOL = 1e-12
PAGERANK_MAX_ITER = 200


@dataclass(frozen=True)
class NodeFeatureRow:
    node: str
    degree: int
    betweenness: float
    closeness: float
    clustering: float
    pagerank: float
    efficiency: float
    constraint: float
    hierarchy: float

    def values(self) -> tuple:
        return astuple(self)[1:]


FEATURE_COLUMNS = tuple(f.name for f in fields(NodeFeatureRow))[1:]


@numba.njit(cache=True)
def _brandes(indptr, indices, n):
    """Unnormalised betweenness (each unordered pair counted once) plus
    Wasserman-Faust closeness, from one BFS per source."""
    bc = np.zeros(n)
    close = np.zeros(n)
    sigma = np.zeros(n)
    dist = np.empty(n, dtype=np.int64)
    delta = np.zeros(n)
    order = np.empty(n, dtype=np.int64)
    for s in range(n):
        for i in range(n):
            dist[i] = -1
            sigma[i] = 0.0
            delta[i] = 0.0
        dist[s] = 0
        sigma[s] = 1.0
        order[0] = s
        head = 0
        tail = 1
        total = 0
        while head < tail:
            v = order[head]
            head += 1
            total += dist[v]
            for p in range(indptr[v], indptr[v + 1]):
                w = indices[p]
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    order[tail] = w
                    tail += 1
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
        reach = tail
        if reach > 1 and n > 1:
            close[s] = ((reach - 1) / (n - 1)) * ((reach - 1) / total)
        for idx in range(tail - 1, 0, -1):
            w = order[idx]
            for p in range(indptr[w], indptr[w + 1]):
                v = indices[p]
                if dist[v] == dist[w] - 1:
                    delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w])
            bc[w] += delta[w]
    return bc / 2.0, close


def betweenness_closeness(s: Snapshot) -> tuple[np.ndarray, np.ndarray]:
    if s.n == 0:
        return np.zeros(0), np.zeros(0)
    indptr, indices = s.csr
    return _brandes(indptr, indices, s.n)


def pagerank(s: Snapshot, damping: float = PAGERANK_DAMPING, tol: float = PAGERANK_TOL,
             max_iter: int = PAGERANK_MAX_ITER) -> np.ndarray:
    """Power iteration with uniform teleport; dangling mass spread uniformly."""
    n = s.n
    if n == 0:
        return np.zeros(0)
    deg = s.degrees.astype(float)
    indptr, indices = s.csr
    src = np.repeat(np.arange(n), s.degrees)
    dangling = deg == 0
    inv = np.where(dangling, 0.0, 1.0 / np.maximum(deg, 1))
    x = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        share = x * inv
        nxt = np.bincount(indices, weights=share[src], minlength=n)
        nxt = damping * (nxt + x[dangling].sum() / n) + (1.0 - damping) / n
        err = np.abs(nxt - x).sum()
        x = nxt
        if err < tol:
            break
    return x / x.sum()


def triangles(s: Snapshot) -> np.ndarray:
    """Triangles through each node, by neighbor-set intersection."""
    sets = s.nbr_sets
    out = np.zeros(s.n, dtype=np.int64)
    for i, j in s.edges():
        a, b = sets[i], sets[j]
        if len(a) > len(b):
            a, b = b, a
        c = sum(1 for w in a if w > j and w in b)
        if c:
            # each triangle i<j<w is found once, from its lowest edge
            out[i] += c
            out[j] += c
            for w in a:
                if w > j and w in b:
                    out[w] += 1
    return out


def clustering(s: Snapshot, tri: np.ndarray | None = None) -> np.ndarray:
    tri = triangles(s) if tri is None else tri
    d = s.degrees
    pairs = d * (d - 1) / 2
    return np.divide(tri, pairs, out=np.zeros(s.n), where=pairs > 0)


def burt_measures(s: Snapshot, v) -> tuple[float, float, float]:
    """(efficiency, constraint, hierarchy) of ``v`` on its 1-hop ego network.

    Tie strength is ``p[i, j] = 1 / degree(i)`` for adjacent ``i, j``.
    Effective size is ``deg - 2 * ties_among_alters / deg``; hierarchy is the
    Coleman-Theil concentration of the per-alter constraint terms.
    """
    return _burt(s, s.index[v])


def _burt(s: Snapshot, i: int) -> tuple[float, float, float]:
    nb = s.neighbors[i]
    d = len(nb)
    if d == 0:
        return 0.0, 0.0, 0.0
    sets = s.nbr_sets
    deg = s.degrees
    p_i = 1.0 / d
    ties = 0
    local = []
    for j in nb:
        indirect = 0.0
        for q in nb:
            if q != j and j in sets[q]:
                indirect += p_i / deg[q]
                ties += 1
        local.append((p_i + indirect) ** 2)
    ties //= 2
    efficiency = (d - 2.0 * ties / d) / d
    total = sum(local)
    hierarchy = 0.0
    if d > 1 and total > 0:
        acc = 0.0
        for c in local:
            r = c / (total / d)
            if r > 0:
                acc += r * math.log(r)
        hierarchy = acc / (d * math.log(d))
    return efficiency, total, hierarchy


def baseline_features(s: Snapshot, nodes=None) -> dict[str, NodeFeatureRow]:
    """One :class:`NodeFeatureRow` per node (or per requested node)."""
    if s.n == 0:
        raise ValueError("snapshot is empty")
    bc, close = betweenness_closeness(s)
    pr = pagerank(s)
    tri = triangles(s)
    cc = clustering(s, tri)
    wanted = s.nodes if nodes is None else sorted(nodes)
    rows = {}
    for v in wanted:
        i = s.index[v]
        eff, con, hier = _burt(s, i)
        rows[v] = NodeFeatureRow(v, int(s.degrees[i]), float(bc[i]), float(close[i]), float(cc[i]),
                                 float(pr[i]), eff, con, hier)
    return rows


def write_feature_rows(rows: dict[str, NodeFeatureRow], out, sep: str = ",") -> None:
    out.write(sep.join(("node",) + FEATURE_COLUMNS) + "\n")
    for v in sorted(rows):
        r = rows[v]
        out.write(sep.join([v] + [repr(x) for x in r.values()]) + "\n")

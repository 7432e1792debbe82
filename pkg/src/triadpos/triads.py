"""Triad census on undirected snapshots.

Triad classes are indexed by their number of internal edges (0..3). Node
positions within the non-empty classes:

    pos1  endpoint of the edge in a 1-edge triad
    pos2  isolated node of a 1-edge triad
    pos3  endpoint of an open (2-edge) triad
    pos4  center of an open triad
    pos5  member of a closed triad

Positions 1 and 4 track preferential attachment (edge ends, open-triad
hubs); position 3 marks closure candidates.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from math import comb

import numpy as np

from .centrality import triangles
from .temporal_graph import Snapshot

TPP_COLUMNS = ("pos1", "pos2", "pos3", "pos4", "pos5")
TCE_COLUMNS = ("tce0", "tce1", "tce2", "tce3")
TEM_PROB_COLUMNS = ("tem_prob0", "tem_prob1", "tem_prob2", "tem_prob3")

# row i of the evolution matrix dotted with these gives the chance that a
# specific missing pair of a class-i triad gets linked
_LIKELIHOOD_WEIGHTS = np.array([
    [0.0, 1 / 3, 2 / 3, 1.0],
    [0.0, 0.0, 0.5, 1.0],
    [0.0, 0.0, 0.0, 1.0],
])


class UndefinedStatistic(ValueError):
    pass


@dataclass(frozen=True)
class TriadClassCounts:
    c0: int
    c1: int
    c2: int
    c3: int

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.c0, self.c1, self.c2, self.c3)


@dataclass(frozen=True)
class TriadPositionProfile:
    nodes: tuple
    counts: np.ndarray  # (n, 5) int64

    def __getitem__(self, v) -> tuple[int, ...]:
        return tuple(int(x) for x in self.counts[self.nodes.index(v)])

    def as_dict(self) -> dict:
        return {v: tuple(int(x) for x in row) for v, row in zip(self.nodes, self.counts)}


@dataclass
class TriadEvolutionMatrix:
    matrix: np.ndarray  # (4, 4)
    row_counts: tuple[int, int, int, int]
    transitions: np.ndarray  # (4, 4) raw counts
    unobserved: tuple[bool, bool, bool, bool]
    unchanged: bool = False
    meta: dict = field(default_factory=dict)

    def to_text(self) -> str:
        lines = ["# triad evolution matrix (rows: class at t, cols: class at t+1)"]
        for i in range(4):
            vals = " ".join(repr(float(x)) for x in self.matrix[i])
            flag = " unobserved" if self.unobserved[i] else ""
            lines.append(f"row{i} {vals} count={self.row_counts[i]}{flag}")
        lines.append(f"unchanged={str(self.unchanged).lower()}")
        for k, v in sorted(self.meta.items()):
            lines.append(f"{k}={v}")
        return "\n".join(lines) + "\n"


def _require_n3(s: Snapshot):
    if s.n < 3:
        raise ValueError(f"triad census needs at least 3 nodes, got {s.n}")


def _edge_isolates(s: Snapshot) -> dict[tuple[int, int], int]:
    """For each edge, number of third nodes adjacent to neither endpoint."""
    sets = s.nbr_sets
    n = s.n
    return {(i, j): n - len(sets[i] | sets[j]) for i, j in s.edges()}


def triad_class_counts(s: Snapshot) -> TriadClassCounts:
    _require_n3(s)
    tri = triangles(s)
    c3 = int(tri.sum()) // 3
    d = s.degrees
    c2 = int((d * (d - 1) // 2).sum()) - 3 * c3
    c1 = sum(_edge_isolates(s).values())
    c0 = comb(s.n, 3) - c1 - c2 - c3
    return TriadClassCounts(c0, c1, c2, c3)


def balance_rate(s: Snapshot) -> float:
    """3 * closed triads / connected triads (connected = 2-edge paths)."""
    c = triad_class_counts(s)
    connected = c.c2 + 3 * c.c3
    if connected == 0:
        raise UndefinedStatistic("no connected triads; balance rate undefined")
    return 3 * c.c3 / connected


def tpp(s: Snapshot) -> TriadPositionProfile:
    _require_n3(s)
    n = s.n
    d = s.degrees
    tri = triangles(s)
    nbr_deg_sum = np.array([int(d[list(nb)].sum()) if nb else 0 for nb in s.neighbors], dtype=np.int64)
    pos1 = np.zeros(n, dtype=np.int64)
    for (i, j), k in _edge_isolates(s).items():
        pos1[i] += k
        pos1[j] += k
    # edges touching the closed neighborhood of v = sum of neighbor degrees - triangles(v)
    pos2 = s.m - nbr_deg_sum + tri
    pos3 = (nbr_deg_sum - d) - 2 * tri
    pos4 = d * (d - 1) // 2 - tri
    pos5 = tri
    return TriadPositionProfile(s.nodes, np.stack([pos1, pos2, pos3, pos4, pos5], axis=1))


def position_conditionals(p: TriadPositionProfile) -> tuple[float, float]:
    """(Prob(3|4), Prob(4|3)) by presence: the share of nodes seen in
    position 4 that are also seen in position 3, and vice versa."""
    if len(p.nodes) == 0:
        raise UndefinedStatistic("empty profile")
    in3 = p.counts[:, 2] > 0
    in4 = p.counts[:, 3] > 0
    if not in4.any() or not in3.any():
        raise UndefinedStatistic("no node occupies position 3 or position 4")
    return float((in3 & in4).sum() / in4.sum()), float((in3 & in4).sum() / in3.sum())


def _restrict(s_t1: Snapshot, nodes) -> tuple[list[frozenset], dict]:
    """Neighbor sets of s_t1 mapped onto the position space of ``nodes``."""
    idx = {v: i for i, v in enumerate(nodes)}
    out = []
    for v in nodes:
        j = s_t1.index.get(v)
        if j is None:
            raise ValueError(f"node {v!r} present at t but missing at t+1")
        out.append(frozenset(idx[s_t1.nodes[k]] for k in s_t1.neighbors[j] if s_t1.nodes[k] in idx))
    return out, idx


def tem(s_t: Snapshot, s_t1: Snapshot) -> TriadEvolutionMatrix:
    """Fraction of class-i triads at ``s_t`` that are class-j at ``s_t1``.

    Only nodes present in ``s_t`` take part. Triples containing at least one
    newly added edge are enumerated explicitly (each is charged to its
    lexicographically smallest new edge); all other triples stay on the
    diagonal.
    """
    _require_n3(s_t)
    if s_t.cut_time is not None and s_t1.cut_time is not None and s_t.cut_time >= s_t1.cut_time:
        raise ValueError("s_t must precede s_t1")
    n = s_t.n
    before = s_t.nbr_sets
    after, _ = _restrict(s_t1, s_t.nodes)
    for i in range(n):
        if not before[i] <= after[i]:
            raise ValueError("snapshots are not cumulative: an edge disappeared")
    counts = triad_class_counts(s_t).as_tuple()
    new_edges = sorted((i, j) for i in range(n) for j in after[i] if j > i and j not in before[i])
    new_set = set(new_edges)
    trans = np.zeros((4, 4), dtype=np.int64)

    for (u, v) in new_edges:
        bu, bv, au, av = before[u], before[v], after[u], after[v]
        touched = (au | av) - {u, v}
        # third nodes adjacent to neither endpoint at t+1: class 0 -> 1, only new edge is (u, v)
        trans[0, 1] += n - 2 - len(touched)
        for w in touched:
            # charge the triple to its smallest new edge
            skip = False
            for a, b in ((u, w), (v, w)):
                e = (a, b) if a < b else (b, a)
                if e in new_set and e < (u, v):
                    skip = True
                    break
            if skip:
                continue
            was = (w in bu) + (w in bv)
            now = 1 + (w in au) + (w in av)
            trans[was, now] += 1
    for i in range(4):
        trans[i, i] = counts[i] - trans[i].sum() + trans[i, i]
    matrix = np.eye(4)
    unobserved = []
    for i in range(4):
        if counts[i] > 0:
            matrix[i] = trans[i] / counts[i]
            unobserved.append(False)
        else:
            unobserved.append(True)
    unchanged = not new_edges
    if unchanged:
        warnings.warn("snapshots are identical; triad evolution matrix is the identity", stacklevel=2)
    return TriadEvolutionMatrix(matrix, tuple(int(c) for c in counts), trans, tuple(unobserved), unchanged,
                                {"t": s_t.cut_time, "t1": s_t1.cut_time})


def tce(s: Snapshot, u, v) -> tuple[int, int, int, int]:
    """Configurations of third nodes w.r.t. the non-adjacent pair ``(u, v)``:
    (neither edge, only u-w, only v-w, both)."""
    i, j = s.index[u], s.index[v]
    return tce_pos(s, i, j)


def tce_pos(s: Snapshot, i: int, j: int) -> tuple[int, int, int, int]:
    if i == j:
        raise ValueError("pair must have two distinct nodes")
    a, b = s.nbr_sets[i], s.nbr_sets[j]
    if j in a:
        raise ValueError(f"pair ({s.nodes[i]!r}, {s.nodes[j]!r}) is adjacent; collocation is defined for non-edges")
    common = len(a & b)
    only_a = len(a) - common
    only_b = len(b) - common
    return (s.n - 2 - only_a - only_b - common, only_a, only_b, common)


def tce_likelihoods(m: TriadEvolutionMatrix | np.ndarray) -> tuple[float, float, float, float]:
    mat = m.matrix if isinstance(m, TriadEvolutionMatrix) else np.asarray(m, dtype=float)
    l0 = float(_LIKELIHOOD_WEIGHTS[0] @ mat[0])
    l1 = float(_LIKELIHOOD_WEIGHTS[1] @ mat[1])
    l3 = float(_LIKELIHOOD_WEIGHTS[2] @ mat[2])
    return (l0, l1, l1, l3)


def tem_prob(tce_vec, likelihoods) -> tuple[float, float, float, float]:
    return tuple(float(c) * float(l) for c, l in zip(tce_vec, likelihoods))


def write_tpp(p: TriadPositionProfile, out, sep: str = ",") -> None:
    out.write(sep.join(("node",) + TPP_COLUMNS) + "\n")
    for v, row in zip(p.nodes, p.counts):
        out.write(sep.join([str(v)] + [str(int(x)) for x in row]) + "\n")

"""Seeded temporal graphs grown by mixed preferential attachment and
triadic closure."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .temporal_graph import TemporalGraph


@dataclass(frozen=True)
class GrowthConfig:
    n_nodes: int = 2000
    steps: int = 8
    seed_nodes: int = 10
    edges_per_arrival: int = 3
    # chance that each extra edge of a newcomer goes to a neighbor of one of
    # its earlier targets rather than a degree-proportional pick
    closure_prob: float = 0.7
    # links between existing nodes per step, as a fraction of current size
    internal_rate: float = 0.6
    # share of internal links closing a 2-path; the rest are degree-proportional
    internal_closure: float = 0.8
    # "wedge": close a uniformly random open triad; "walk": u -> random
    # neighbor -> random neighbor (favours low-degree middles)
    closure_mode: str = "wedge"
    # expected repeat interactions per existing edge per step
    repeat_rate: float = 0.1
    seed: int = 0


def _pa_pick(rng: np.random.Generator, deg: np.ndarray, n: int) -> int:
    w = deg[:n] + 1.0
    return int(rng.choice(n, p=w / w.sum()))


class _Grower:
    def __init__(self, cfg: GrowthConfig):
        self.cfg = cfg
        self.rng = np.random.default_rng(cfg.seed)
        self.nbrs: list[list[int]] = []
        self.adj: list[set[int]] = []
        self.deg = np.zeros(cfg.n_nodes, dtype=float)
        self.records: list[tuple[int, int, int]] = []

    def add_node(self) -> int:
        self.nbrs.append([])
        self.adj.append(set())
        return len(self.nbrs) - 1

    def link(self, u: int, v: int, t: int) -> bool:
        if u == v or v in self.adj[u]:
            return False
        self.adj[u].add(v)
        self.adj[v].add(u)
        self.nbrs[u].append(v)
        self.nbrs[v].append(u)
        self.deg[u] += 1
        self.deg[v] += 1
        self.records.append((u, v, t))
        return True

    def random_wedge(self, n: int) -> tuple[int, int] | None:
        d = self.deg[:n]
        w = d * (d - 1)
        total = w.sum()
        if total == 0:
            return None
        mid = int(self.rng.choice(n, p=w / total))
        a, b = self.rng.choice(len(self.nbrs[mid]), size=2, replace=False)
        return self.nbrs[mid][a], self.nbrs[mid][b]

    def two_path_end(self, u: int) -> int | None:
        if not self.nbrs[u]:
            return None
        w = self.nbrs[u][self.rng.integers(len(self.nbrs[u]))]
        x = self.nbrs[w][self.rng.integers(len(self.nbrs[w]))]
        return None if x == u else x


def grow(cfg: GrowthConfig = GrowthConfig()) -> TemporalGraph:
    """Grow a network over ``cfg.steps`` ticks (tick = arrival cohort).

    Tick 0 holds a ring of ``seed_nodes``. At every later tick a batch of
    newcomers arrives; each makes one degree-proportional link and further
    links that mostly close triads through its first targets. Existing nodes
    then add internal links (mostly closing 2-paths), and some existing pairs
    interact again.
    """
    rng_nodes = cfg.n_nodes - cfg.seed_nodes
    g = _Grower(cfg)
    rng = g.rng
    for _ in range(cfg.seed_nodes):
        g.add_node()
    for i in range(cfg.seed_nodes):
        g.link(i, (i + 1) % cfg.seed_nodes, 0)
    per_step = np.full(cfg.steps - 1, rng_nodes // (cfg.steps - 1))
    per_step[: rng_nodes % (cfg.steps - 1)] += 1
    for t in range(1, cfg.steps):
        n_before = len(g.nbrs)
        # internal activity among nodes already present
        for _ in range(int(cfg.internal_rate * n_before)):
            if rng.random() < cfg.internal_closure:
                if cfg.closure_mode == "wedge":
                    pair = g.random_wedge(n_before)
                    if pair is not None:
                        g.link(pair[0], pair[1], t)
                else:
                    u = int(rng.integers(n_before))
                    x = g.two_path_end(u)
                    if x is not None:
                        g.link(u, x, t)
            else:
                u = int(rng.integers(n_before))
                g.link(u, _pa_pick(rng, g.deg, n_before), t)
        for _ in range(per_step[t - 1]):
            n_now = len(g.nbrs)
            v = g.add_node()
            targets = [_pa_pick(rng, g.deg, n_now)]
            g.link(v, targets[0], t)
            for _ in range(cfg.edges_per_arrival - 1):
                if rng.random() < cfg.closure_prob:
                    base = targets[int(rng.integers(len(targets)))]
                    cand = g.nbrs[base]
                    x = cand[int(rng.integers(len(cand)))]
                else:
                    x = _pa_pick(rng, g.deg, n_now)
                if g.link(v, x, t):
                    targets.append(x)
        # repeat interactions on existing edges
        edges = [(a, b) for a, b, tt in g.records if tt < t]
        if edges and cfg.repeat_rate > 0:
            k = rng.poisson(cfg.repeat_rate * len(edges))
            for e in rng.choice(len(edges), size=min(k, len(edges)), replace=False):
                a, b = edges[e]
                g.records.append((a, b, t))
    width = len(str(cfg.n_nodes))
    name = [f"n{i:0{width}d}" for i in range(len(g.nbrs))]
    return TemporalGraph.from_records((name[a], name[b], tt) for a, b, tt in g.records)

"""Monte Carlo spread under Linear Threshold and Weighted Cascade, and the
DegreeDiscount seed heuristic.

Each run draws all of its randomness up front (one threshold per node for
LT, one uniform per directed arc for WC) from a stream keyed on
``(master_seed, run_index)``. Runs are therefore independent of order, and
for a fixed run the activated set grows monotonically with the seed set.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .temporal_graph import Snapshot

MODELS = ("LT", "WC")
DEFAULT_RUNS = 1000
DEFAULT_DD_P = 0.01


@dataclass
class SpreadResult:
    seeds: tuple
    model: str
    runs: int
    mean: float
    std: float
    master_seed: int
    per_run: np.ndarray = field(repr=False)

    @property
    def stderr(self) -> float:
        return self.std / np.sqrt(self.runs)


def _run_lt(s: Snapshot, seeds: list[int], theta: np.ndarray) -> int:
    deg = s.degrees
    active = np.zeros(s.n, dtype=bool)
    pressure = np.zeros(s.n)
    active[seeds] = True
    frontier = deque(seeds)
    count = len(seeds)
    while frontier:
        u = frontier.popleft()
        for v in s.neighbors[u]:
            if active[v]:
                continue
            pressure[v] += 1.0 / deg[v]
            if pressure[v] >= theta[v]:
                active[v] = True
                count += 1
                frontier.append(v)
    return count


def _run_wc(s: Snapshot, seeds: list[int], coins: np.ndarray, indptr: np.ndarray) -> int:
    deg = s.degrees
    active = np.zeros(s.n, dtype=bool)
    active[seeds] = True
    frontier = deque(seeds)
    count = len(seeds)
    while frontier:
        u = frontier.popleft()
        base = indptr[u]
        for k, v in enumerate(s.neighbors[u]):
            if not active[v] and coins[base + k] < 1.0 / deg[v]:
                active[v] = True
                count += 1
                frontier.append(v)
    return count


def simulate_spread(s: Snapshot, seeds, model: str = "WC", runs: int = DEFAULT_RUNS, master_seed: int = 0,
                    thresholds: float | np.ndarray | None = None) -> SpreadResult:
    """Mean and standard deviation of the activated-set size over ``runs``.

    ``thresholds`` fixes the LT node thresholds instead of drawing them (a
    scalar applies to every node).
    """
    if model not in MODELS:
        raise ValueError(f"unknown diffusion model {model!r}")
    if runs < 1:
        raise ValueError("runs must be at least 1")
    seeds = tuple(dict.fromkeys(seeds))
    unknown = [v for v in seeds if v not in s.index]
    if unknown:
        raise KeyError(f"seed nodes not in snapshot: {unknown}")
    idx = [s.index[v] for v in seeds]
    out = np.zeros(runs)
    if idx:
        indptr = s.csr[0]
        n_arcs = int(indptr[-1])
        for r in range(runs):
            rng = np.random.default_rng([master_seed, r])
            if model == "LT":
                if thresholds is None:
                    theta = rng.random(s.n)
                else:
                    theta = np.broadcast_to(np.asarray(thresholds, dtype=float), (s.n,))
                out[r] = _run_lt(s, idx, theta)
            else:
                out[r] = _run_wc(s, idx, rng.random(n_arcs), indptr)
    return SpreadResult(seeds, model, runs, float(out.mean()), float(out.std()), master_seed, out)


def degree_discount(s: Snapshot, k: int, p: float = DEFAULT_DD_P, candidates=None) -> list:
    """Chen et al.'s DegreeDiscountIC: repeatedly take the node with the
    largest ``d - 2t - (d - t) * t * p`` (``t`` = already chosen neighbors),
    ties to the smallest id. ``candidates`` restricts which nodes may be
    chosen; discounts still use the full snapshot."""
    if not 0 < p < 1:
        raise ValueError("p must lie in (0, 1)")
    pool = list(range(s.n)) if candidates is None else sorted(s.index[v] for v in candidates)
    if not 1 <= k <= len(pool):
        raise ValueError(f"k={k} must lie in [1, {len(pool)}]")
    d = s.degrees.astype(float)
    t = np.zeros(s.n)
    chosen: list[int] = []
    taken = np.zeros(s.n, dtype=bool)
    for _ in range(k):
        dd = d - 2 * t - (d - t) * t * p
        best = max((i for i in pool if not taken[i]), key=lambda i: (dd[i], -i))
        chosen.append(best)
        taken[best] = True
        for v in s.neighbors[best]:
            if not taken[v]:
                t[v] += 1
    return [s.nodes[i] for i in chosen]


def top_k_by_score(scores: dict, k: int) -> list:
    """Highest scores first, ties to the smallest id."""
    return sorted(scores, key=lambda v: (-scores[v], v))[:k]


def prominence_seed_comparison(s_t: Snapshot, s_future: Snapshot, cohort, selector_scores: dict[str, dict],
                               ks, models=MODELS, runs: int = DEFAULT_RUNS, master_seed: int = 0,
                               dd_p: float = DEFAULT_DD_P) -> list[dict]:
    """Spread on ``s_future`` of top-k seed sets drawn from ``cohort``.

    ``selector_scores`` maps a selector name to node scores (e.g. model
    outputs); a ``DegreeDiscount`` selector on ``s_t`` is always added.
    Returns rows ``{k, selector, model, mean, std}``.
    """
    cohort = sorted(cohort)
    rows = []
    for k in ks:
        if k > len(cohort):
            raise ValueError(f"cohort of {len(cohort)} nodes is smaller than k={k}")
        seed_sets = {name: top_k_by_score({v: sc[v] for v in cohort}, k) for name, sc in selector_scores.items()}
        seed_sets["DegreeDiscount"] = degree_discount(s_t, k, dd_p, candidates=[v for v in cohort if v in s_t.index])
        for name in sorted(seed_sets):
            for model in models:
                res = simulate_spread(s_future, seed_sets[name], model, runs, master_seed)
                rows.append({"k": k, "selector": name, "model": model, "mean": res.mean, "std": res.std})
    return rows

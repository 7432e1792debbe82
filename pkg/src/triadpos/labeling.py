"""Prominence labels and the two supervised datasets (node prominence,
link formation)."""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numpy as np

from . import centrality, triads
from .influence_log import mine_link_influence, pair_link_influence_prob, prominence_features
from .temporal_graph import Snapshot, TemporalGraph

PN_SHARE_NUM, PN_SHARE_DEN = 1, 5  # top 20%
LINK_TRAIN_PREVALENCE = 0.3

PROMINENCE_FEATURE_SETS = {
    "Baseline": centrality.FEATURE_COLUMNS,
    "TPP": triads.TPP_COLUMNS,
    "TPP+": triads.TPP_COLUMNS + ("prominence_prob", "prominence_index"),
}
LINK_FEATURE_SETS = {
    "TEM-": triads.TCE_COLUMNS,
    "TEM": triads.TCE_COLUMNS + triads.TEM_PROB_COLUMNS,
    "TEM+": triads.TCE_COLUMNS + triads.TEM_PROB_COLUMNS + ("link_influence_prob",),
    "HPLP": ("degree_min", "degree_max", "pagerank_min", "pagerank_max", "cn", "aa", "pa", "shortest_path"),
}
FEATURE_SETS = {**PROMINENCE_FEATURE_SETS, **LINK_FEATURE_SETS}


class DatasetError(ValueError):
    pass


@dataclass
class ProminenceLabeling:
    measure: str
    labels: dict  # node -> True for prominent
    cut_time: int | None

    @property
    def pn(self) -> set:
        return {v for v, p in self.labels.items() if p}

    @property
    def npn(self) -> set:
        return {v for v, p in self.labels.items() if not p}


def pareto_label(s: Snapshot, measure: Callable | Mapping | Sequence | np.ndarray, name: str = "degree"
                 ) -> ProminenceLabeling:
    """Top ceil(20%) of nodes by ``measure`` (descending, ties by node id) are
    prominent. ``measure`` is a callable, a node->value mapping, or an array
    aligned with ``s.nodes``."""
    n = s.n
    if n == 0:
        raise DatasetError("cannot label an empty snapshot")
    if callable(measure):
        values = [measure(v) for v in s.nodes]
    elif isinstance(measure, Mapping):
        values = [measure[v] for v in s.nodes]
    else:
        values = list(measure)
        if len(values) != n:
            raise DatasetError("measure must have one value per node")
    order = sorted(range(n), key=lambda i: (-values[i], s.nodes[i]))
    top = -(-n * PN_SHARE_NUM // PN_SHARE_DEN)
    chosen = set(order[:top])
    return ProminenceLabeling(name, {v: i in chosen for i, v in enumerate(s.nodes)}, s.cut_time)


def degree_labels(s: Snapshot) -> ProminenceLabeling:
    return pareto_label(s, s.degrees.tolist(), "degree")


@dataclass
class LabeledDataset:
    X: np.ndarray
    y: np.ndarray
    ids: list
    columns: tuple[str, ...]
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.y)

    def select(self, rows) -> LabeledDataset:
        rows = list(rows)
        return LabeledDataset(self.X[rows], self.y[rows], [self.ids[i] for i in rows], self.columns, dict(self.meta))

    def with_columns(self, columns: Sequence[str], feature_set: str | None = None) -> LabeledDataset:
        idx = [self.columns.index(c) for c in columns]
        meta = dict(self.meta)
        if feature_set is not None:
            meta["feature_set"] = feature_set
        meta["columns"] = list(columns)
        return LabeledDataset(self.X[:, idx], self.y.copy(), list(self.ids), tuple(columns), meta)

    def column(self, name: str) -> np.ndarray:
        return self.X[:, self.columns.index(name)]


def _finish(rows: list[list[float]], labels, ids, columns, meta) -> LabeledDataset:
    X = np.asarray(rows, dtype=float).reshape(len(rows), len(columns))
    missing = ~np.isfinite(X)
    if missing.any():
        X[missing] = 0.0
    meta = dict(meta, columns=list(columns), imputed=int(missing.sum()))
    return LabeledDataset(X, np.asarray(labels, dtype=np.int64), list(ids), tuple(columns), meta)


def _check_range(g: TemporalGraph, t: int, delta_t: int):
    if delta_t <= 0:
        raise DatasetError("delta_t must be positive")
    if t < g.first_time or t + delta_t > g.last_time:
        raise DatasetError(f"t={t}, t+delta_t={t + delta_t} outside data range [{g.first_time}, {g.last_time}]")


def build_prominence_datasets(g: TemporalGraph, t: int, delta_t: int, feature_sets=tuple(PROMINENCE_FEATURE_SETS),
                              obs_window: int = 1, name: str = "") -> dict[str, LabeledDataset]:
    """Cohort of nodes arriving at ``t`` that are not prominent at ``t``;
    features observed on the snapshot at ``t + obs_window``; label 1 when the
    node is prominent (by degree) at ``t + delta_t``."""
    _check_range(g, t, delta_t)
    for fs in feature_sets:
        if fs not in PROMINENCE_FEATURE_SETS:
            raise DatasetError(f"unknown prominence feature set {fs!r}")
    if not 0 <= obs_window <= delta_t:
        raise DatasetError("observation window must lie within [0, delta_t]")
    s_t = g.snapshot_at(t)
    pn_t = degree_labels(s_t).pn
    cohort = sorted(g.arrivals_at(t) - pn_t)
    if not cohort:
        raise DatasetError(f"no non-prominent arrivals at t={t}")
    t_obs = t + obs_window
    s_obs = g.snapshot_at(t_obs)
    future = degree_labels(g.snapshot_at(t + delta_t)).labels
    labels = [int(future[v]) for v in cohort]

    table: dict[str, list] = {}
    if "Baseline" in feature_sets:
        rows = centrality.baseline_features(s_obs, cohort)
        for j, c in enumerate(centrality.FEATURE_COLUMNS):
            table[c] = [rows[v].values()[j] for v in cohort]
    if "TPP" in feature_sets or "TPP+" in feature_sets:
        prof = triads.tpp(s_obs)
        for j, c in enumerate(triads.TPP_COLUMNS):
            table[c] = [int(prof.counts[s_obs.index[v], j]) for v in cohort]
    if "TPP+" in feature_sets:
        _, stats = mine_link_influence(g.until(t_obs))
        pf = [prominence_features(stats, s_obs, v) for v in cohort]
        table["prominence_prob"] = [a for a, _ in pf]
        table["prominence_index"] = [b for _, b in pf]

    out = {}
    for fs in feature_sets:
        cols = PROMINENCE_FEATURE_SETS[fs]
        rows = [[table[c][i] for c in cols] for i in range(len(cohort))]
        meta = {"task": "prominence", "dataset": name, "t": t, "delta_t": delta_t, "obs_window": obs_window,
                "feature_set": fs, "max_time_consulted": max(t_obs, t)}
        out[fs] = _finish(rows, labels, cohort, cols, meta)
    return out


def build_prominence_dataset(g: TemporalGraph, t: int, delta_t: int, feature_set: str, obs_window: int = 1,
                             name: str = "") -> LabeledDataset:
    return build_prominence_datasets(g, t, delta_t, (feature_set,), obs_window, name)[feature_set]


def two_hop_candidates(s: Snapshot) -> list[tuple]:
    """Non-adjacent pairs with at least one common neighbor, as sorted id pairs."""
    sets = s.nbr_sets
    pos = set()
    for nb in s.neighbors:
        for a in range(len(nb)):
            i = nb[a]
            si = sets[i]
            for b in range(a + 1, len(nb)):
                j = nb[b]
                if j not in si:
                    pos.add((i, j))
    return sorted((s.nodes[i], s.nodes[j]) for i, j in pos)


def pairwise_baselines(s: Snapshot, u, v) -> tuple[int, float, int]:
    """(common neighbors, Adamic-Adar, preferential attachment)."""
    i, j = s.index[u], s.index[v]
    a, b = s.nbr_sets[i], s.nbr_sets[j]
    if j in a:
        raise ValueError(f"pair ({u!r}, {v!r}) is adjacent")
    common = a & b
    d = s.degrees
    aa = sum(1.0 / math.log(d[w]) for w in sorted(common))
    return len(common), aa, int(d[i] * d[j])


def first_link_times(g: TemporalGraph) -> dict[tuple, int]:
    return {k: ts[0] for k, ts in g.edge_log.items()}


def build_link_datasets(g: TemporalGraph, t: int, delta_t: int, feature_sets=tuple(LINK_FEATURE_SETS),
                        tem_lag: int | None = None, influence_window: int | None = None, name: str = ""
                        ) -> dict[str, LabeledDataset]:
    """Two-hop non-adjacent pairs at ``t``, label 1 when linked by ``t + delta_t``.

    The evolution matrix is fitted on the snapshot pair ``(t - tem_lag, t)``
    and link-influence statistics on interactions up to ``t``; nothing after
    ``t`` enters the features. Both lags default to ``delta_t``.
    """
    _check_range(g, t, delta_t)
    for fs in feature_sets:
        if fs not in LINK_FEATURE_SETS:
            raise DatasetError(f"unknown link feature set {fs!r}")
    tem_lag = delta_t if tem_lag is None else tem_lag
    window = delta_t if influence_window is None else influence_window
    s_t = g.snapshot_at(t)
    pairs = two_hop_candidates(s_t)
    if not pairs:
        raise DatasetError(f"no two-hop candidate pairs at t={t}")
    first = first_link_times(g)
    labels = [int(first.get(p, math.inf) <= t + delta_t) for p in pairs]
    idx = [(s_t.index[u], s_t.index[v]) for u, v in pairs]

    table: dict[str, list] = {}
    wanted = set().union(*(LINK_FEATURE_SETS[fs] for fs in feature_sets))
    if wanted & set(triads.TCE_COLUMNS + triads.TEM_PROB_COLUMNS):
        tces = [triads.tce_pos(s_t, i, j) for i, j in idx]
        for k, c in enumerate(triads.TCE_COLUMNS):
            table[c] = [x[k] for x in tces]
        if wanted & set(triads.TEM_PROB_COLUMNS):
            t_prev = max(g.first_time, t - tem_lag)
            matrix = _fit_tem(g, t_prev, t)
            lik = triads.tce_likelihoods(matrix)
            probs = [triads.tem_prob(x, lik) for x in tces]
            for k, c in enumerate(triads.TEM_PROB_COLUMNS):
                table[c] = [x[k] for x in probs]
    if "link_influence_prob" in wanted:
        g_t = g.until(t)
        _, stats = mine_link_influence(g_t)
        table["link_influence_prob"] = [pair_link_influence_prob(stats, g_t, p, t, window) for p in pairs]
    if wanted & set(LINK_FEATURE_SETS["HPLP"]):
        d = s_t.degrees
        pr = centrality.pagerank(s_t)
        sets = s_t.nbr_sets
        hp = {c: [] for c in LINK_FEATURE_SETS["HPLP"]}
        logd = np.log(np.maximum(d, 2))
        for i, j in idx:
            common = sets[i] & sets[j]
            hp["degree_min"].append(min(d[i], d[j]))
            hp["degree_max"].append(max(d[i], d[j]))
            hp["pagerank_min"].append(min(pr[i], pr[j]))
            hp["pagerank_max"].append(max(pr[i], pr[j]))
            hp["cn"].append(len(common))
            hp["aa"].append(sum(1.0 / logd[w] for w in sorted(common)))
            hp["pa"].append(int(d[i]) * int(d[j]))
            hp["shortest_path"].append(2)
        table.update(hp)

    out = {}
    for fs in feature_sets:
        cols = LINK_FEATURE_SETS[fs]
        rows = [[table[c][r] for c in cols] for r in range(len(pairs))]
        meta = {"task": "link", "dataset": name, "t": t, "delta_t": delta_t, "tem_lag": tem_lag,
                "influence_window": window, "feature_set": fs, "max_time_consulted": t}
        out[fs] = _finish(rows, labels, pairs, cols, meta)
    return out


def _fit_tem(g: TemporalGraph, t_prev: int, t: int) -> triads.TriadEvolutionMatrix:
    if t_prev >= t:
        return triads.TriadEvolutionMatrix(np.eye(4), (0, 0, 0, 0), np.zeros((4, 4), dtype=np.int64),
                                           (True,) * 4, True, {"t": t_prev, "t1": t})
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return triads.tem(g.snapshot_at(t_prev), g.snapshot_at(t))


def build_link_dataset(g: TemporalGraph, t: int, delta_t: int, feature_set: str, name: str = "", **kw
                       ) -> LabeledDataset:
    return build_link_datasets(g, t, delta_t, (feature_set,), name=name, **kw)[feature_set]


def pairwise_scores(ds: LabeledDataset, s: Snapshot) -> dict[str, np.ndarray]:
    """Unsupervised CN / AA / PA rankings for the pairs of a link dataset."""
    out = {"CN": [], "AA": [], "PA": []}
    for u, v in ds.ids:
        cn, aa, pa = pairwise_baselines(s, u, v)
        out["CN"].append(cn)
        out["AA"].append(aa)
        out["PA"].append(pa)
    return {k: np.asarray(v, dtype=float) for k, v in out.items()}


def undersample(ds: LabeledDataset, prevalence: float = LINK_TRAIN_PREVALENCE, seed: int = 0) -> LabeledDataset:
    """Keep every positive and a seeded random subset of negatives so that
    positives make up ``prevalence`` of the result. Row order is preserved."""
    pos = np.flatnonzero(ds.y == 1)
    neg = np.flatnonzero(ds.y == 0)
    want = int(round(len(pos) * (1 - prevalence) / prevalence))
    if want < len(neg):
        neg = np.sort(np.random.default_rng(seed).choice(neg, size=want, replace=False))
    keep = np.sort(np.concatenate([pos, neg]))
    out = ds.select(keep)
    out.meta.update(undersample_seed=seed, prevalence=prevalence)
    return out


def stratified_split(y, fraction: float = 0.5, seed: int = 0) -> tuple[list[int], list[int]]:
    """Seeded per-class shuffle; ``round(fraction * class size)`` rows of each
    class go to the first part. Both parts are returned in row order."""
    if not 0 < fraction < 1:
        raise DatasetError("fraction must lie in (0, 1)")
    y = np.asarray(y)
    rng = np.random.default_rng(seed)
    first: list[int] = []
    for c in np.unique(y):
        idx = np.flatnonzero(y == c)
        rng.shuffle(idx)
        first.extend(idx[: int(round(len(idx) * fraction))].tolist())
    chosen = set(first)
    return sorted(chosen), [i for i in range(len(y)) if i not in chosen]


def write_dataset(ds: LabeledDataset, path: str | Path, provenance: str | None = None) -> None:
    """Delimited rows plus a ``.meta.json`` sidecar. ``provenance`` becomes a
    leading ``#`` line."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        if provenance:
            fh.write(f"# {provenance}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id", *ds.columns, "label"])
        for rid, row, label in zip(ds.ids, ds.X, ds.y):
            key = "|".join(rid) if isinstance(rid, tuple) else rid
            w.writerow([key, *(repr(float(x)) for x in row), int(label)])
    path.with_suffix(path.suffix + ".meta.json").write_text(json.dumps(ds.meta, indent=1, sort_keys=True) + "\n")


def read_dataset(path: str | Path) -> LabeledDataset:
    path = Path(path)
    with path.open(newline="") as fh:
        r = csv.reader(line for line in fh if not line.startswith("#"))
        header = next(r)
        cols = tuple(header[1:-1])
        ids, rows, labels = [], [], []
        for rec in r:
            ids.append(tuple(rec[0].split("|")) if "|" in rec[0] else rec[0])
            rows.append([float(x) for x in rec[1:-1]])
            labels.append(int(rec[-1]))
    meta_path = path.with_suffix(path.suffix + ".meta.json")
    meta = json.loads(meta_path.read_text()) if meta_path.exists() else {}
    return LabeledDataset(np.asarray(rows, dtype=float).reshape(len(rows), len(cols)), np.asarray(labels), ids,
                          cols, meta)

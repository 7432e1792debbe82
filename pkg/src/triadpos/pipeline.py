"""End-to-end runs: datasets, training, evaluation, transfer matrices,
descriptive statistics and seed-selection spread comparisons.

Every file written here carries the config hash and seed, and nothing
depends on wall-clock time, so a rerun with the same config reproduces the
output tree byte for byte.
"""

from __future__ import annotations

import csv
import json
import warnings
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path

from . import centrality, learn, triads
from .config import PipelineConfig, load_graph
from .diffusion import prominence_seed_comparison
from .labeling import (LINK_FEATURE_SETS, PROMINENCE_FEATURE_SETS, DatasetError, LabeledDataset,
                       build_link_datasets, build_prominence_datasets, degree_labels, pairwise_scores,
                       pareto_label, stratified_split, undersample, write_dataset)
from .temporal_graph import Snapshot, TemporalGraph

TASKS = ("prominence", "link")
LINK_PAIRWISE = ("CN", "AA", "PA")


class StageError(RuntimeError):
    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"{stage}: {type(cause).__name__}: {cause}")
        self.stage = stage
        self.cause = cause


@contextmanager
def stage(name: str):
    try:
        yield
    except StageError:
        raise
    except Exception as exc:
        raise StageError(name, exc) from exc


def provenance(cfg: PipelineConfig) -> dict:
    return {"config_hash": cfg.digest(), "seed": cfg.seed}


def prov_line(cfg: PipelineConfig) -> str:
    return f"config_hash={cfg.digest()} seed={cfg.seed}"


def slug(feature_set: str) -> str:
    return feature_set.replace("+", "_plus").replace("-", "_minus")


def write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=1, sort_keys=True) + "\n")


def write_points(path: Path, cfg: PipelineConfig, header, rows) -> None:
    with path.open("w", newline="") as fh:
        fh.write(f"# {prov_line(cfg)}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(x) if isinstance(x, float) else x for x in row])


def _check_feature_sets(cfg: PipelineConfig) -> tuple[str, ...]:
    known = PROMINENCE_FEATURE_SETS if cfg.task == "prominence" else LINK_FEATURE_SETS
    bad = [fs for fs in cfg.feature_sets if fs not in known]
    if bad or not cfg.feature_sets:
        raise DatasetError(f"feature set(s) {bad} not available for task {cfg.task!r}; choose from {list(known)}")
    return cfg.feature_sets


@dataclass
class TaskSplits:
    train: dict[str, LabeledDataset]
    test: dict[str, LabeledDataset]
    # snapshot used for the unsupervised pairwise rankings (link task)
    reference: Snapshot | None = None


def _default_t_train(cfg: PipelineConfig) -> int:
    if cfg.t_train is not None:
        return cfg.t_train
    return cfg.t - (1 if cfg.task == "prominence" else cfg.delta_t)


def build_splits(cfg: PipelineConfig, g: TemporalGraph) -> TaskSplits:
    """Training and test datasets for every configured feature set.

    Prominence with ``split=cohort``: one arrival cohort at ``t`` split
    per class, ``train_fraction`` for training. Otherwise training instances
    come from the earlier time ``t_train`` (defaults: ``t - 1`` for
    prominence, ``t - delta_t`` for link, so training labels never reach past
    ``t``). Link training sets are undersampled to 30% positives; test sets
    keep their natural prevalence.
    """
    fsets = _check_feature_sets(cfg)
    name = cfg.dataset_name
    if cfg.task == "prominence":
        test = build_prominence_datasets(g, cfg.t, cfg.delta_t, fsets, cfg.obs_window, name)
        if cfg.split == "cohort":
            first = next(iter(test.values()))
            tr, te = stratified_split(first.y, cfg.train_fraction, cfg.seed)
            if not tr or not te:
                raise DatasetError("cohort too small to split")
            train = {fs: _tag(ds.select(tr), "train") for fs, ds in test.items()}
            test = {fs: _tag(ds.select(te), "test") for fs, ds in test.items()}
        else:
            train = build_prominence_datasets(g, _default_t_train(cfg), cfg.delta_t, fsets, cfg.obs_window, name)
            train = {fs: _tag(ds, "train") for fs, ds in train.items()}
            test = {fs: _tag(ds, "test") for fs, ds in test.items()}
        return TaskSplits(train, test)
    t_train = _default_t_train(cfg)
    test = build_link_datasets(g, cfg.t, cfg.delta_t, fsets, cfg.tem_lag, cfg.influence_window, name)
    train = build_link_datasets(g, t_train, cfg.delta_t, fsets, cfg.tem_lag, cfg.influence_window, name)
    train = {fs: _tag(undersample(ds, seed=cfg.seed), "train") for fs, ds in train.items()}
    test = {fs: _tag(ds, "test") for fs, ds in test.items()}
    return TaskSplits(train, test, g.snapshot_at(cfg.t))


def _tag(ds: LabeledDataset, part: str) -> LabeledDataset:
    ds.meta.update(part=part, rows=len(ds), positives=int(ds.y.sum()))
    return ds


@dataclass
class TaskResult:
    config: PipelineConfig
    reports: dict[str, learn.EvaluationReport]
    models: dict[str, learn.BaggedLogisticModel]
    baselines: dict[str, learn.EvaluationReport] = field(default_factory=dict)
    splits: TaskSplits | None = None

    def aupr(self, feature_set: str) -> float:
        return self.reports[feature_set].aupr


def run_task(cfg: PipelineConfig, g: TemporalGraph | None = None, out: str | Path | None = None) -> TaskResult:
    """Ingest, build datasets, train one bagged model per feature set,
    evaluate on the test split. Writes results under ``out`` (default
    ``cfg.out``); pass ``out=False`` to skip writing."""
    if g is None:
        with stage("ingest"):
            g = load_graph(cfg)
    with stage("features"):
        splits = build_splits(cfg, g)
    models, reports = {}, {}
    for fs in cfg.feature_sets:
        with stage("train"):
            models[fs] = learn.train(splits.train[fs], bags=cfg.bags, seed=cfg.seed)
        with stage("evaluate"):
            ds = splits.test[fs]
            reports[fs] = learn.evaluate(learn.predict(models[fs], ds), ds.y, cfg.k, ds.ids)
    baselines = {}
    if cfg.task == "link":
        with stage("evaluate"):
            ds = next(iter(splits.test.values()))
            for name, sc in pairwise_scores(ds, splits.reference).items():
                baselines[name] = learn.evaluate(sc, ds.y, cfg.k, ds.ids)
    res = TaskResult(cfg, reports, models, baselines, splits)
    if out is not False:
        with stage("write"):
            write_task(res, Path(cfg.out if out is None else out))
    return res


def _model_json(m: learn.BaggedLogisticModel, cfg: PipelineConfig, feature_set: str) -> str:
    d = json.loads(m.to_json())
    d["provenance"] = provenance(cfg)
    d["feature_set"] = feature_set
    return json.dumps(d, indent=1, sort_keys=True) + "\n"


def _write_curves(root: Path, cfg: PipelineConfig, rep: learn.EvaluationReport) -> None:
    write_points(root / "roc.csv", cfg, ["fpr", "tpr"], rep.roc)
    write_points(root / "pr.csv", cfg, ["recall", "precision"], rep.pr)


def _id_text(rid) -> str:
    return "|".join(rid) if isinstance(rid, tuple) else str(rid)


def write_task(res: TaskResult, out: Path) -> None:
    cfg = res.config
    out.mkdir(parents=True, exist_ok=True)
    report = {"task": cfg.task, "dataset": cfg.dataset_name, "config": cfg.as_dict(with_out=False), **provenance(cfg),
              "results": {}, "baselines": {}}
    for fs, rep in res.reports.items():
        sub = out / slug(fs)
        sub.mkdir(exist_ok=True)
        tr, te = res.splits.train[fs], res.splits.test[fs]
        report["results"][fs] = {**rep.summary(), "columns": list(te.columns),
                                 "train": _meta(tr, cfg), "test": _meta(te, cfg)}
        (sub / "model.json").write_text(_model_json(res.models[fs], cfg, fs))
        _write_curves(sub, cfg, rep)
        write_points(sub / "scores.csv", cfg, ["id", "score", "label"],
                     [(_id_text(i), float(s), int(y)) for i, s, y in zip(rep.ids, rep.scores, rep.labels)])
        write_json(sub / "dataset.json", {"train": _meta(tr, cfg), "test": _meta(te, cfg)})
    for name, rep in res.baselines.items():
        sub = out / name
        sub.mkdir(exist_ok=True)
        report["baselines"][name] = rep.summary()
        _write_curves(sub, cfg, rep)
    write_json(out / "report.json", report)


def _meta(ds: LabeledDataset, cfg: PipelineConfig) -> dict:
    return {**ds.meta, **provenance(cfg)}


def export_dataset(ds: LabeledDataset, cfg: PipelineConfig, path: Path) -> None:
    ds.meta.update(provenance(cfg))
    write_dataset(ds, path, prov_line(cfg))


# transfer -------------------------------------------------------------------

@dataclass
class TransferMatrix:
    """AUPR of the model trained on row dataset ``i`` and evaluated on the
    test split of column dataset ``j``. A failed cell holds an error string."""
    names: list[str]
    feature_set: str
    cells: list[list[float | str]]

    def diagonal(self) -> list[float | str]:
        return [self.cells[i][i] for i in range(len(self.names))]

    def to_rows(self) -> list[list]:
        rows = [["train\\test", *self.names]]
        for name, row in zip(self.names, self.cells):
            rows.append([name, *row])
        return rows


def _unique_names(cfgs) -> list[str]:
    names, seen = [], {}
    for c in cfgs:
        base = c.dataset_name
        seen[base] = seen.get(base, 0) + 1
        names.append(base if seen[base] == 1 else f"{base}#{seen[base]}")
    return names


def run_transfer(configs, task: str, feature_set: str, graphs=None, out: str | Path | None = None
                 ) -> TransferMatrix:
    """Train on each dataset's training split; apply that model, with its own
    standardisation, to every dataset's test split."""
    if len(configs) < 2:
        raise ValueError("transfer needs at least two dataset configs")
    if task not in TASKS:
        raise ValueError(f"unknown task {task!r}")
    configs = [c.override(task=task, feature_sets=(feature_set,)) for c in configs]
    graphs = list(graphs) if graphs is not None else [None] * len(configs)
    names = _unique_names(configs)
    models: list[learn.BaggedLogisticModel | str] = []
    tests: list[LabeledDataset | str] = []
    for cfg, g in zip(configs, graphs):
        model = test = None
        marker = ""
        try:
            if g is None:
                with stage("ingest"):
                    g = load_graph(cfg)
            with stage("features"):
                sp = build_splits(cfg, g)
            test = sp.test[feature_set]
            with stage("train"):
                model = learn.train(sp.train[feature_set], bags=cfg.bags, seed=cfg.seed)
        except StageError as exc:
            marker = f"error: {exc}"
        models.append(model if model is not None else marker)
        tests.append(test if test is not None else marker)
    cells = []
    for i, cfg in enumerate(configs):
        row = []
        for j in range(len(configs)):
            m, ds = models[i], tests[j]
            if isinstance(m, str):
                row.append(m)
            elif isinstance(ds, str):
                row.append(ds)
            else:
                try:
                    row.append(learn.evaluate(learn.predict(m, ds), ds.y, cfg.k, ds.ids).aupr)
                except (learn.LearnError, ValueError) as exc:
                    row.append(f"error: {exc}")
        cells.append(row)
    tm = TransferMatrix(names, feature_set, cells)
    if out is not None:
        out = Path(out)
        out.mkdir(parents=True, exist_ok=True)
        ref = configs[0]
        write_points(out / f"transfer_{slug(feature_set)}.csv", ref, tm.to_rows()[0], tm.to_rows()[1:])
        write_json(out / f"transfer_{slug(feature_set)}.json",
                    {"task": task, "feature_set": feature_set, "names": names, "cells": cells,
                     "configs": {n: {"config_hash": c.digest(), "seed": c.seed} for n, c in zip(names, configs)},
                     **provenance(ref)})
    return tm


# descriptive statistics -------------------------------------------------------

def cumulative_share(values, ids) -> list[tuple[int, str, float, float]]:
    """(rank, node, value, cumulative share of the total) by descending value,
    ties to the smallest id."""
    order = sorted(range(len(values)), key=lambda i: (-values[i], ids[i]))
    total = float(sum(values))
    acc, rows = 0.0, []
    for r, i in enumerate(order, start=1):
        acc += float(values[i])
        rows.append((r, ids[i], float(values[i]), acc / total if total else 0.0))
    return rows


def _rate(s: Snapshot) -> float:
    try:
        return triads.balance_rate(s) if s.n >= 3 else float("nan")
    except triads.UndefinedStatistic:
        return float("nan")


def group_balance_rates(s: Snapshot, prominent: set) -> tuple[float, float]:
    """Balance rate of the PN-induced and of the NPN-induced subgraph (nan when
    undefined)."""
    return _rate(s.subgraph(prominent)), _rate(s.subgraph(set(s.nodes) - prominent))


def stats_report(cfg: PipelineConfig, g: TemporalGraph | None = None, out: str | Path | None = None) -> dict:
    """Pareto curves (degree, PageRank) at ``t + delta_t``; PN/NPN balance
    rates at ``t`` and ``t + delta_t`` (prominence by degree at each time);
    triad evolution ratios from ``t`` to ``t + delta_t``; position
    conditionals at both times."""
    if g is None:
        with stage("ingest"):
            g = load_graph(cfg)
    out = Path(cfg.out if out is None else out)
    with stage("snapshot"):
        times = (cfg.t, cfg.t + cfg.delta_t)
        for t in times:
            if not g.first_time <= t <= g.last_time:
                raise DatasetError(f"time {t} outside data range [{g.first_time}, {g.last_time}]")
        snaps = {t: g.snapshot_at(t) for t in times}
    summary: dict = {"dataset": cfg.dataset_name, **provenance(cfg)}
    with stage("stats"):
        s_end = snaps[times[1]]
        deg = s_end.degrees.tolist()
        pr = centrality.pagerank(s_end).tolist()
        curves = {"degree": cumulative_share(deg, s_end.nodes), "pagerank": cumulative_share(pr, s_end.nodes)}
        top = -(-s_end.n // 5)
        summary["top20_share"] = {k: v[top - 1][3] for k, v in curves.items()}
        balance = []
        for t, s in snaps.items():
            pn = degree_labels(s).pn
            rp, rn = group_balance_rates(s, pn)
            balance.append((t, "PN", len(pn), rp))
            balance.append((t, "NPN", s.n - len(pn), rn))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            m = triads.tem(snaps[times[0]], snaps[times[1]])
        tem_rows = [(i, j, float(m.matrix[i, j]), int(m.transitions[i, j]), m.row_counts[i])
                    for i in range(4) for j in range(4)]
        cond = []
        for t, s in snaps.items():
            try:
                p34, p43 = triads.position_conditionals(triads.tpp(s))
            except triads.UndefinedStatistic:
                p34 = p43 = float("nan")
            cond.append((t, p34, p43))
        summary["balance"] = [list(r) for r in balance]
        summary["prob_3_given_4"] = {str(t): a for t, a, _ in cond}
        summary["prob_4_given_3"] = {str(t): b for t, _, b in cond}
        summary["tem"] = m.matrix.tolist()
    with stage("write"):
        out.mkdir(parents=True, exist_ok=True)
        for k, rows in curves.items():
            write_points(out / f"pareto_{k}.csv", cfg, ["rank", "node", k, "cumulative_share"], rows)
        write_points(out / "balance.csv", cfg, ["time", "group", "nodes", "balance_rate"], balance)
        write_points(out / "tem.csv", cfg, ["from_class", "to_class", "ratio", "transitions", "row_total"],
                     tem_rows)
        write_points(out / "conditionals.csv", cfg, ["time", "prob_3_given_4", "prob_4_given_3"], cond)
        write_json(out / "stats.json", summary)
    return summary


# seed selection ---------------------------------------------------------------

def spread_comparison(cfg: PipelineConfig, g: TemporalGraph | None = None, out: str | Path | None = None
                      ) -> list[dict]:
    """Seeds picked from the prominence test cohort by each configured
    model (top-k scores) and by DegreeDiscount on the snapshot at ``t``;
    spread measured on the snapshot at ``t + delta_t``."""
    cfg = cfg.override(task="prominence")
    if g is None:
        with stage("ingest"):
            g = load_graph(cfg)
    res = run_task(cfg, g, out=False)
    cohort = res.splits.test[cfg.feature_sets[0]].ids
    scores = {fs: dict(zip(rep.ids, rep.scores)) for fs, rep in res.reports.items()}
    with stage("simulate"):
        s_future = g.snapshot_at(cfg.t + cfg.delta_t)
        rows = prominence_seed_comparison(g.snapshot_at(cfg.t), s_future, cohort, scores, cfg.ks, runs=cfg.runs,
                                          master_seed=cfg.seed, dd_p=cfg.dd_p)
    if out is not False:
        with stage("write"):
            path = Path(cfg.out if out is None else out)
            path.mkdir(parents=True, exist_ok=True)
            write_points(path / "spread.csv", cfg, ["k", "selector", "model", "mean", "std"],
                          [(r["k"], r["selector"], r["model"], r["mean"], r["std"]) for r in rows])
    return rows


def label_table(s: Snapshot) -> list[tuple[str, int, int]]:
    lab = pareto_label(s, s.degrees.tolist())
    return [(v, int(d), int(lab.labels[v])) for v, d in zip(s.nodes, s.degrees)]


__all__ = ["StageError", "TaskResult", "TaskSplits", "TransferMatrix", "build_splits", "run_task", "run_transfer",
           "stats_report", "spread_comparison", "cumulative_share", "group_balance_rates", "export_dataset",
           "label_table", "provenance"]

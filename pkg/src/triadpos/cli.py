"""``triadpos`` command line.

Each subcommand reads a flat config file (``--config``), applies flag
overrides, writes its artefacts under ``--out`` and prints a JSON summary on
stdout. Failures print one JSON record ``{"error", "stage", "config"}`` on
stderr and exit with status 1.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import centrality, learn, triads
from .config import ConfigError, PipelineConfig, load_config, load_graph
from .labeling import FEATURE_SETS, build_link_datasets, build_prominence_datasets
from .pipeline import (StageError, build_splits, export_dataset, label_table, prov_line, provenance, run_task,
                       run_transfer, slug, spread_comparison, stage, stats_report, write_json, write_points)


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="triadpos", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", action="append", default=[], help="config file (repeat for transfer)")
    common.add_argument("--data", help="dataset path or synthetic:key=value,...")
    common.add_argument("--seed", type=int)
    common.add_argument("--task", choices=("prominence", "link"))
    common.add_argument("--feature-set", help="comma-separated feature-set names")
    common.add_argument("--t", type=int)
    common.add_argument("--delta-t", type=int)
    common.add_argument("--k", type=int)
    common.add_argument("--out")
    sub = p.add_subparsers(dest="command", required=True)
    for name, text in [
        ("ingest", "parse the edge list and write it in canonical form"),
        ("snapshot", "write the snapshot at --t with triad statistics"),
        ("stats", "Pareto curves, balance rates, triad evolution ratios"),
        ("features", "write feature tables for the configured task at --t"),
        ("label", "write degree-based prominence labels at --t"),
        ("train", "train one model per feature set"),
        ("evaluate", "train and evaluate (full pipeline)"),
        ("predict", "score the test split with a saved model"),
        ("transfer", "cross-dataset AUPR matrix (two or more --config)"),
        ("simulate", "spread of model-selected vs DegreeDiscount seed sets"),
    ]:
        sp = sub.add_parser(name, parents=[common], help=text)
        if name == "predict":
            sp.add_argument("--model", required=True, help="model.json written by train/evaluate")
    return p


def _config_from(args, path: str | None) -> PipelineConfig:
    cfg = load_config(path) if path else PipelineConfig()
    return cfg.override(data=args.data, seed=args.seed, task=args.task, feature_sets=args.feature_set, t=args.t,
                        delta_t=args.delta_t, k=args.k, out=args.out)


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, sort_keys=True) + "\n")


def cmd_ingest(cfg: PipelineConfig, args) -> dict:
    with stage("ingest"):
        g = load_graph(cfg)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    with (out / "graph.csv").open("w") as fh:
        fh.write(f"# {prov_line(cfg)}\n")
        g.dump(fh)
    return {"nodes": len(g.nodes), "pairs": len(g.edge_log), "first_time": g.first_time, "last_time": g.last_time,
            "skipped_self_loops": g.skipped_self_loops, **provenance(cfg)}


def cmd_snapshot(cfg: PipelineConfig, args) -> dict:
    with stage("ingest"):
        g = load_graph(cfg)
    with stage("snapshot"):
        s = g.snapshot_at(cfg.t)
        counts = triads.triad_class_counts(s).as_tuple() if s.n >= 3 else None
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    write_points(out / f"snapshot_{cfg.t}.csv", cfg, ["u", "v"], [(s.nodes[i], s.nodes[j]) for i, j in s.edges()])
    return {"t": cfg.t, "n": s.n, "m": s.m, "triad_classes": counts, **provenance(cfg)}


def cmd_stats(cfg: PipelineConfig, args) -> dict:
    return stats_report(cfg)


def cmd_features(cfg: PipelineConfig, args) -> dict:
    """Full (unsplit) feature tables at ``t``; node-level TPP and baseline
    centralities for the whole snapshot are written too."""
    with stage("ingest"):
        g = load_graph(cfg)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    with stage("features"):
        if cfg.task == "prominence":
            sets = build_prominence_datasets(g, cfg.t, cfg.delta_t, cfg.feature_sets, cfg.obs_window, cfg.dataset_name)
            s = g.snapshot_at(cfg.t)
            with (out / f"tpp_{cfg.t}.csv").open("w") as fh:
                fh.write(f"# {prov_line(cfg)}\n")
                triads.write_tpp(triads.tpp(s), fh)
            with (out / f"centrality_{cfg.t}.csv").open("w") as fh:
                fh.write(f"# {prov_line(cfg)}\n")
                centrality.write_feature_rows(centrality.baseline_features(s), fh)
        else:
            sets = build_link_datasets(g, cfg.t, cfg.delta_t, cfg.feature_sets, cfg.tem_lag, cfg.influence_window,
                                       cfg.dataset_name)
    for fs, ds in sets.items():
        export_dataset(ds, cfg, out / f"features_{slug(fs)}.csv")
    return {fs: {"rows": len(ds), "columns": list(ds.columns), "positives": int(ds.y.sum())}
            for fs, ds in sets.items()}


def cmd_label(cfg: PipelineConfig, args) -> dict:
    with stage("ingest"):
        g = load_graph(cfg)
    with stage("label"):
        rows = label_table(g.snapshot_at(cfg.t))
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    write_points(out / f"labels_{cfg.t}.csv", cfg, ["node", "degree", "prominent"], rows)
    return {"t": cfg.t, "nodes": len(rows), "prominent": sum(r[2] for r in rows), **provenance(cfg)}


def cmd_train(cfg: PipelineConfig, args) -> dict:
    with stage("ingest"):
        g = load_graph(cfg)
    with stage("features"):
        splits = build_splits(cfg, g)
    out = Path(cfg.out)
    summary = {}
    for fs in cfg.feature_sets:
        with stage("train"):
            m = learn.train(splits.train[fs], bags=cfg.bags, seed=cfg.seed)
        sub = out / slug(fs)
        sub.mkdir(parents=True, exist_ok=True)
        d = json.loads(m.to_json())
        d.update(provenance=provenance(cfg), feature_set=fs)
        write_json(sub / "model.json", d)
        summary[fs] = {"rows": len(splits.train[fs]), "columns": list(m.columns)}
    return summary


def cmd_evaluate(cfg: PipelineConfig, args) -> dict:
    res = run_task(cfg)
    return {"results": {fs: r.summary() for fs, r in res.reports.items()},
            "baselines": {k: r.summary() for k, r in res.baselines.items()}, **provenance(cfg)}


def cmd_predict(cfg: PipelineConfig, args) -> dict:
    with stage("ingest"):
        g = load_graph(cfg)
    with stage("predict"):
        model = learn.BaggedLogisticModel.from_json(Path(args.model).read_text())
        fs = next((name for name, cols in FEATURE_SETS.items() if tuple(cols) == model.columns), None)
        if fs is None:
            raise learn.LearnError(f"model columns {list(model.columns)} match no known feature set")
        ds = build_splits(cfg.override(feature_sets=(fs,)), g).test[fs]
        scores = learn.predict(model, ds)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    ids = ["|".join(i) if isinstance(i, tuple) else i for i in ds.ids]
    write_points(out / f"predictions_{slug(fs)}.csv", cfg, ["id", "score", "label"],
                 [(i, float(s), int(y)) for i, s, y in zip(ids, scores, ds.y)])
    return {"feature_set": fs, "rows": len(ds), **provenance(cfg)}


def cmd_transfer(cfg: PipelineConfig, args) -> dict:
    if len(args.config) < 2:
        raise ConfigError("transfer needs at least two --config files")
    configs = [_config_from(args, p) for p in args.config]
    fs = cfg.feature_sets[0]
    tm = run_transfer(configs, cfg.task, fs, out=cfg.out)
    return {"feature_set": fs, "names": tm.names, "cells": tm.cells}


def cmd_simulate(cfg: PipelineConfig, args) -> dict:
    rows = spread_comparison(cfg)
    return {"rows": rows, **provenance(cfg)}


COMMANDS = {name[4:]: fn for name, fn in globals().items() if name.startswith("cmd_")}


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    cfg = None
    try:
        with stage("config"):
            cfg = _config_from(args, args.config[0] if args.config else None)
        _emit(COMMANDS[args.command](cfg, args))
        return 0
    except StageError as exc:
        record = {"error": f"{type(exc.cause).__name__}: {exc.cause}", "stage": exc.stage,
                  "config": cfg.as_dict() if cfg is not None else None}
    except (ConfigError, OSError, ValueError) as exc:
        record = {"error": f"{type(exc).__name__}: {exc}", "stage": args.command,
                  "config": cfg.as_dict() if cfg is not None else None}
    sys.stderr.write(json.dumps(record, sort_keys=True, default=list) + "\n")
    return 1


if __name__ == "__main__":
    sys.exit(main())

"""Spread of seed sets picked by prominence models versus DegreeDiscount,
under LT and WC, on a synthetic graph or a config file."""

import argparse

from triadpos.config import PipelineConfig, load_config
from triadpos.pipeline import spread_comparison


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--config")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--runs", type=int, default=1000)
    p.add_argument("--ks", type=int, nargs="+", default=[5, 10, 20])
    p.add_argument("--out")
    a = p.parse_args()
    base = load_config(a.config) if a.config else PipelineConfig(
        data=f"synthetic:seed={a.seed}", feature_sets=("Baseline", "TPP", "TPP+"), t=3, delta_t=4)
    cfg = base.override(seed=a.seed, runs=a.runs, ks=tuple(a.ks), out=a.out)
    rows = spread_comparison(cfg, out=a.out)
    print(f"{'k':>3} {'selector':>15} {'model':>5} {'mean':>9} {'std':>7}")
    for r in rows:
        print(f"{r['k']:>3} {r['selector']:>15} {r['model']:>5} {r['mean']:9.2f} {r['std']:7.2f}")


if __name__ == "__main__":
    main()

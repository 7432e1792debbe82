"""Transfer matrix over synthetic datasets from the same generator."""

import argparse

from triadpos.config import PipelineConfig
from triadpos.pipeline import run_transfer
from triadpos.synthetic import GrowthConfig, grow


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--seeds", type=int, nargs="+", default=[11, 12, 13])
    p.add_argument("--task", choices=("prominence", "link"), default="prominence")
    p.add_argument("--feature-set", default="TPP")
    p.add_argument("--out")
    a = p.parse_args()
    t, dt = (3, 4) if a.task == "prominence" else (5, 2)
    configs = [PipelineConfig(data=f"synthetic:seed={s}", name=f"syn{s}", task=a.task, feature_sets=(a.feature_set,),
                              t=t, delta_t=dt) for s in a.seeds]
    tm = run_transfer(configs, a.task, a.feature_set, graphs=[grow(GrowthConfig(seed=s)) for s in a.seeds],
                      out=a.out)
    width = max(len(n) for n in tm.names)
    print(" " * width + "  " + "  ".join(f"{n:>8}" for n in tm.names))
    for name, row in zip(tm.names, tm.cells):
        cells = [f"{x:8.4f}" if isinstance(x, float) else f"{'error':>8}" for x in row]
        print(f"{name:>{width}}  " + "  ".join(cells))


if __name__ == "__main__":
    main()

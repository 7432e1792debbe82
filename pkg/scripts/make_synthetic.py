"""Write a synthetic temporal edge list (u,v,t) for use as a --data file."""

import argparse
import dataclasses

from triadpos.synthetic import GrowthConfig, grow


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("out")
    for f in dataclasses.fields(GrowthConfig):
        p.add_argument(f"--{f.name.replace('_', '-')}", type=type(f.default), default=f.default)
    args = vars(p.parse_args())
    out = args.pop("out")
    g = grow(GrowthConfig(**args))
    with open(out, "w") as fh:
        g.dump(fh)
    print(f"{out}: {len(g.nodes)} nodes, {len(g.edge_log)} pairs, ticks {g.first_time}..{g.last_time}")


if __name__ == "__main__":
    main()

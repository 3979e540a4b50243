#!/usr/bin/env python3
"""Run the whole experiment pipeline into one output directory.

Stages: label a dataset, fit the policy network, score it against the
oracle and all baselines, then re-train across the depth and rain grids.
Every stage goes through the satedge command line, so the artifacts are
byte-identical to what the individual commands produce.

    python3 scripts/reproduce_results.py --out runs/repro
    python3 scripts/reproduce_results.py --fast   # small budgets, ~1 min

The default budgets match the shipped configuration (50k episodes,
full training); expect a few minutes of wall time.
"""

import argparse
import sys
import time
from pathlib import Path

from satedge.cli import main as satedge

FAST_CONFIG = """\
# reduced budgets for a quick end-to-end pass
dataset_episodes = 2000
compare_episodes = 400
sweep_episodes = 800
sweep_epochs = 8
sweep_patience = 3
max_epochs = 30
patience = 6
"""


def stage(title, argv):
    print(f"\n=== {title} ===")
    print("satedge " + " ".join(argv))
    t0 = time.perf_counter()
    rc = satedge(argv)
    print(f"[{title}: {'ok' if rc == 0 else f'exit {rc}'}, "
          f"{time.perf_counter() - t0:.1f}s]")
    return rc


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="runs/repro", help="output root")
    ap.add_argument("--fast", action="store_true",
                    help="shrink every budget for a quick smoke pass")
    ap.add_argument("--config", default=None,
                    help="config file forwarded to every stage "
                         "(overrides --fast)")
    args = ap.parse_args(argv)

    root = Path(args.out)
    root.mkdir(parents=True, exist_ok=True)
    config = args.config
    if config is None and args.fast:
        fast = root / "fast_config.txt"
        fast.write_text(FAST_CONFIG)
        config = str(fast)
    common = ["--config", config] if config else []

    dataset = root / "dataset" / "dataset.txt"
    model = root / "fit" / "model.txt"
    plan = [
        ("label dataset",
         ["gen-dataset", *common, "--out", str(root / "dataset")]),
        ("fit policy",
         ["train", *common, "--dataset", str(dataset),
          "--out", str(root / "fit")]),
        ("score against oracle and baselines",
         ["compare", *common, "--model", str(model),
          "--out", str(root / "compare")]),
        ("depth sweep",
         ["sweep", *common, "--kind", "hidden-layers",
          "--out", str(root / "sweep_depth")]),
        ("rain sweep",
         ["sweep", *common, "--kind", "rain",
          "--out", str(root / "sweep_rain")]),
    ]

    t0 = time.perf_counter()
    for title, argv_stage in plan:
        rc = stage(title, argv_stage)
        if rc != 0:
            print(f"stopping: stage {title!r} failed", file=sys.stderr)
            return rc
    print(f"\nall stages done in {time.perf_counter() - t0:.1f}s; "
          f"artifacts under {root}/")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

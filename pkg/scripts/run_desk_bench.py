#!/usr/bin/env python3
"""Run the desk-scale benchmark over whatever datasets are present in data/.

Defaults mirror the full protocol: 5 repetitions, 4-fold CV, the 2^d lambda
grid with d = -14..5, per-repetition 50/50 train/test splits. Writes
desk_bench.csv / desk_bench.txt next to the data directory.

Example:
    python scripts/fetch_datasets.py            # needs network for 4 of 6
    python scripts/run_desk_bench.py --models H-2,H-4,logistic --jobs 4
"""

import argparse
import sys
import time
from pathlib import Path

from logitron import bench, dataio, modelsel
from logitron.optim import SolverSettings

DESK = ["iris", "wine", "seeds", "acute-inflammation", "heart-hungarian",
        "breast-cancer-wisc"]


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--data-dir", default="data")
    ap.add_argument("--models", default="H-2,H-4,H+2,logistic,hinge0")
    ap.add_argument("--reps", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", default="desk_bench")
    args = ap.parse_args()

    data_dir = Path(args.data_dir)
    tasks = []
    for name in DESK:
        path = data_dir / f"{name}.csv"
        if not path.exists():
            print(f"skipping {name}: {path} not found "
                  "(run scripts/fetch_datasets.py)", file=sys.stderr)
            continue
        ds = dataio.load_csv(path, label_col="label", name=name)
        tasks.append(bench.BenchTask(name=name, full=ds, fraction=0.5))
    if not tasks:
        print("no datasets found; nothing to do", file=sys.stderr)
        return 1

    models = [
        bench.ModelEntry(tag, modelsel.submodel_grid(tag))
        for tag in args.models.split(",")
    ]
    t0 = time.time()
    report = bench.run_benchmark(
        tasks, models, repetitions=args.reps, seed=args.seed,
        settings=SolverSettings(), jobs=args.jobs,
        reference=bench.DESK_DWN_REFERENCE,
    )
    print(report.format_text())
    report.write_csv(f"{args.out}.csv")
    Path(f"{args.out}.txt").write_text(report.format_text(), encoding="utf-8")
    print(f"done in {time.time() - t0:.1f}s; wrote {args.out}.csv/.txt")
    return 0


if __name__ == "__main__":
    sys.exit(main())

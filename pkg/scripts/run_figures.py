#!/usr/bin/env python3
"""Run every sweep config under configs/ and write CSV + SVG into results/.

    python scripts/run_figures.py                  # all six, 50 trials each
    python scripts/run_figures.py fig4b --trials 500 --workers 8
"""

import argparse
import time
from pathlib import Path

from uavbs.harness import emit_csv, emit_svg, load_config, run_experiment

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("only", nargs="*", help="substring filter on config names")
    ap.add_argument("--trials", type=int)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", type=Path, default=ROOT / "results")
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    for path in sorted((ROOT / "configs").glob("*.ini")):
        if args.only and not any(s in path.stem for s in args.only):
            continue
        cfg = load_config(path)
        cfg.workers = args.workers
        if args.trials:
            cfg.trials = args.trials
        cfg.validate()
        t0 = time.perf_counter()
        res = run_experiment(cfg)
        emit_csv(res, args.out / f"{path.stem}.csv")
        emit_svg(res, args.out / f"{path.stem}.svg")
        print(f"{path.stem}: {len(res.rows)} rows, {cfg.trials} trials, {time.perf_counter() - t0:.1f} s")


if __name__ == "__main__":
    main()

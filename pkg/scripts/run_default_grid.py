#!/usr/bin/env python3
"""Run (or resume) the full default grid and emit the CSV reports.

Equivalent to ``lrvqe sweep --config configs/default_grid.json --out-dir results/default_grid --resume``
followed by ``lrvqe report``; kept as a script so it can be launched with nohup.
"""
import argparse
import logging
import os
from pathlib import Path

from lrvqe.config import parse_config
from lrvqe.report import emit_reports
from lrvqe.sweep import ResultStore, run_grid

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", type=Path, default=ROOT / "configs" / "default_grid.json")
    ap.add_argument("--out-dir", type=Path, default=ROOT / "results" / "default_grid")
    ap.add_argument("--jobs", type=int, default=int(os.environ.get("LRVQE_JOBS", "1")))
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")

    cfg = parse_config(args.config)
    store = ResultStore(args.out_dir)
    run_grid(cfg, store, jobs=args.jobs)
    for path in emit_reports(store):
        print(path)


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Tabulate p*-vs-N slopes and R_C quadratic coefficients from fits.csv."""
import argparse
import csv
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--in", dest="src", type=Path, default=ROOT / "results" / "default_grid")
    args = ap.parse_args()
    with open(args.src / "fits.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))

    def table(quantity, model, col, title):
        print(title)
        print(f"{'alpha':>6} {'lambda':>6} {'nn':>10} {'nnn':>10} {'nnnn':>10}")
        sel = {(r["alpha"], r["lambda"], r["ansatz"]): r[col] for r in rows if r["quantity"] == quantity and r["model"] == model}
        for a, lam in sorted({k[:2] for k in sel}, key=lambda k: (float(k[0]), float(k[1]))):
            vals = [sel.get((a, lam, k), "NA") for k in ("nn", "nnn", "nnnn")]
            print(f"{a:>6} {lam:>6} " + " ".join(f"{float(v):10.4g}" if v != "NA" else f"{'NA':>10}" for v in vals))
        print()

    table("p_star", "linear", "c1", "p* slope (layers per qubit)")
    table("rc", "quadratic", "c2", "R_C quadratic coefficient")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Print exact vs variational negativity profiles for one cell, layer by layer.

Reads the stored runs (best restart per p) and recomputes nothing except the
exact profile. Default cell: N=8, alpha=0.5, lambda=0.5, NN ansatz.
"""
import argparse
from pathlib import Path

import numpy as np

from lrvqe.entanglement import NegativityProfile, entanglement_error, negativity_profile
from lrvqe.exact import dense_matrix, ground_state
from lrvqe.model import ModelParams, build_hamiltonian
from lrvqe.sweep import ResultStore

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--store", type=Path, default=ROOT / "results" / "default_grid")
    ap.add_argument("--n", type=int, default=8)
    ap.add_argument("--alpha", type=float, default=0.5)
    ap.add_argument("--lambda", dest="lam", type=float, default=0.5)
    ap.add_argument("--ansatz", default="nn")
    ap.add_argument("--strategy", default="average")
    args = ap.parse_args()

    ed = ground_state(dense_matrix(build_hamiltonian(ModelParams(args.n, args.alpha, args.lam))))
    exact = negativity_profile(ed.state, args.strategy)
    print("r      " + " ".join(f"{r:>8d}" for r in range(1, args.n)))
    print("exact  " + " ".join(f"{v:8.5f}" for v in exact.values))

    best = {}
    for doc in ResultStore(args.store).documents():
        if (doc["alpha"], doc["lambda"], doc["n"], doc["ansatz"]) != (args.alpha, args.lam, args.n, args.ansatz):
            continue
        if doc["p"] not in best or doc["energy"] < best[doc["p"]]["energy"]:
            best[doc["p"]] = doc
    if not best:
        raise SystemExit(f"no runs for this cell under {args.store}")
    for p in sorted(best):
        prof = NegativityProfile(tuple(best[p]["profile"]), args.strategy)
        err = entanglement_error(prof, exact)
        print(f"p={p:<4d} " + " ".join(f"{v:8.5f}" for v in prof.values) + f"   E(p)={err:.3e}")
    print(f"max |exact| = {np.max(exact.values):.4f}")


if __name__ == "__main__":
    main()

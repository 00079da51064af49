"""``lrvqe`` command-line front end.

Exit codes: 0 success, 2 config error, 3 capacity error, 4 optimization
failure, 5 I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import report
from .circuit import AnsatzKind, build_ansatz, initial_state
from .config import ConfigError, SweepConfig, parse_config
from .entanglement import STRATEGIES, entanglement_error, negativity_profile
from .errors import CapacityError, InvalidParameterError, OptimizationFailure
from .exact import dense_matrix, dispersion, ground_state
from .model import ModelParams, build_hamiltonian, critical_fields
from .sweep import ResultStore, StoreError, run_grid
from .vqe import OptimizerConfig, minimize

log = logging.getLogger("lrvqe")

EXIT_CONFIG, EXIT_CAPACITY, EXIT_OPTIMIZATION, EXIT_IO = 2, 3, 4, 5


def _write_json(path, doc):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _params_doc(p: ModelParams) -> dict:
    return {"n": p.n_sites, "alpha": p.alpha, "lambda": p.lam, "h": p.h, "J": p.J}


def cmd_exact(args) -> int:
    params = ModelParams(args.n, args.alpha, args.lam)
    ham = build_hamiltonian(params)
    gs = ground_state(dense_matrix(ham))
    ks = np.linspace(0.0, math.pi, args.k_samples) if args.k_samples > 1 else np.array([0.0])
    hc0, hcpi = critical_fields(params)
    doc = {
        "params": _params_doc(params),
        "E0": gs.energy,
        "gap": gs.gap,
        "degeneracy": gs.degeneracy,
        "critical_fields": {"k0": hc0, "kpi": hcpi},
        "negativity_profile": {"strategy": args.strategy, "values": list(negativity_profile(gs.state, args.strategy).values)},
        "dispersion": [vars(dispersion(params, float(k))) for k in ks],
    }
    _write_json(args.out, doc)
    log.info("E0 = %.12f, gap = %.6g -> %s", gs.energy, gs.gap, args.out)
    return 0


def cmd_vqe(args) -> int:
    params = ModelParams(args.n, args.alpha, args.lam)
    ham = build_hamiltonian(params)
    gs = ground_state(dense_matrix(ham))
    spec = build_ansatz(args.ansatz, args.n, args.layers)
    cfg = OptimizerConfig(restarts=args.restarts, max_iters=args.max_iters, seed=args.seed)
    res = minimize(spec, ham, cfg, gs)
    prof_ed = negativity_profile(gs.state, args.strategy)
    prof = negativity_profile(res.state, args.strategy)
    doc = {
        "params": _params_doc(params),
        "ansatz": spec.kind.value,
        "layers": spec.layers,
        "optimizer": cfg.to_dict(),
        "energy": res.energy,
        "exact_energy": gs.energy,
        "fidelity": res.fidelity,
        "ent_error": entanglement_error(prof, prof_ed),
        "negativity_profile": {"strategy": args.strategy, "vqe": list(prof.values), "exact": list(prof_ed.values)},
        "n_iters": res.n_iters,
        "n_iters_mean": res.mean_iters,
        "total_iters": res.total_iters,
        "converged": res.converged,
        "best_restart": res.best_restart,
        "cnots": spec.count("CNOT"),
        "best_params": [float(x) for x in res.best_params],
    }
    _write_json(args.out, doc)
    log.info("E = %.12f (E0 = %.12f), fidelity %.8f, E(p) = %.3e", res.energy, gs.energy, res.fidelity, doc["ent_error"])
    return 0


def cmd_sweep(args) -> int:
    cfg = parse_config(args.config)
    if args.seed is not None:
        cfg = replace(cfg, base_seed=args.seed)
    store = ResultStore(args.out_dir)
    if not store.is_empty() and not args.resume:
        raise StoreError(f"{args.out_dir} already holds runs; pass --resume to continue it")
    run_grid(cfg, store, jobs=args.jobs)
    for path in report.emit_reports(store):
        log.info("wrote %s", path)
    return 0


def cmd_fit(args) -> int:
    store = ResultStore(args.in_dir)
    cfg, _, scal, fits = report.analyse(store)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    report._write_csv(out, report.SCALING_HEADER, report.scaling_rows(scal, cfg.precision))
    report._write_csv(out.with_name("fits.csv"), report.FITS_HEADER, report.fit_rows(fits, cfg.precision))
    log.info("wrote %s and %s", out, out.with_name("fits.csv"))
    return 0


def cmd_report(args) -> int:
    for path in report.emit_reports(ResultStore(args.in_dir), args.out_dir):
        log.info("wrote %s", path)
    return 0


def _default_jobs() -> int:
    try:
        return int(os.environ.get("LRVQE_JOBS", "1"))
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    def global_flags(defaults: bool) -> argparse.ArgumentParser:
        # subcommands repeat the flags with suppressed defaults so a value
        # given before the subcommand is not overwritten
        g = argparse.ArgumentParser(add_help=False)
        d = (lambda v: v) if defaults else (lambda v: argparse.SUPPRESS)
        g.add_argument("--seed", type=int, default=d(None), help="base seed (overrides config)")
        g.add_argument("--jobs", type=int, default=d(_default_jobs()), help="worker processes [$LRVQE_JOBS or 1]")
        g.add_argument("--quiet", action="store_true", default=d(False), help="only report warnings and errors")
        return g

    common = global_flags(False)
    parser = argparse.ArgumentParser(prog="lrvqe", description=__doc__.splitlines()[0], parents=[global_flags(True)])
    sub = parser.add_subparsers(dest="command", required=True)

    def model_args(p):
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--alpha", type=float, required=True)
        p.add_argument("--lambda", dest="lam", type=float, required=True)
        p.add_argument("--strategy", choices=STRATEGIES, default="average")

    p = sub.add_parser("exact", parents=[common], help="exact ground state, negativity profile and dispersion")
    model_args(p)
    p.add_argument("--k-samples", type=int, default=65)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("vqe", parents=[common], help="single VQE optimization")
    model_args(p)
    p.add_argument("--ansatz", choices=[k.value for k in AnsatzKind], required=True)
    p.add_argument("--layers", type=int, required=True)
    p.add_argument("--restarts", type=int, default=5)
    p.add_argument("--max-iters", type=int, default=2000)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_vqe)

    p = sub.add_parser("sweep", parents=[common], help="run the (alpha, lambda, N, ansatz, p) grid")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--resume", action="store_true")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("fit", parents=[common], help="p*, resource costs and scaling fits from a store")
    p.add_argument("--in", dest="in_dir", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("report", parents=[common], help="emit CSV and plot-data files for a store")
    p.add_argument("--in", dest="in_dir", required=True)
    p.add_argument("--out-dir", default=None)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "vqe" and args.seed is None:
        args.seed = 0
    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    except CapacityError as exc:
        log.error("capacity error: %s", exc)
        return EXIT_CAPACITY
    except InvalidParameterError as exc:
        log.error("invalid parameter: %s", exc)
        return EXIT_CONFIG
    except OptimizationFailure as exc:
        log.error("optimization failed: %s %s", exc, exc.diagnostics)
        return EXIT_OPTIMIZATION
    except OSError as exc:
        log.error("I/O error: %s", exc)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

"""CSV and plot-data emission from a completed result store."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

from .circuit import AnsatzKind
from .config import SweepConfig, config_from_dict
from .sweep import (
    FitRow,
    ResultStore,
    RunRecord,
    ScalingRecord,
    StoreError,
    cell_key,
    load_records,
    scaling_fits,
    scaling_records,
    _fmt,
)

SCALING_HEADER = [
    "alpha", "lambda", "n", "ansatz", "p_star", "extrapolated", "fit_a", "fit_b", "fit_r2",
    "rq_total", "params_per_layer", "n_iter_avg", "rc_total",
]
RECORDS_HEADER = [
    "alpha", "lambda", "n", "ansatz", "p", "seed", "energy", "exact_energy", "min_energy_seen",
    "fidelity", "ent_error", "n_iters_best", "n_iters_mean", "best_restart", "strategy",
]
FITS_HEADER = ["alpha", "lambda", "ansatz", "quantity", "model", "c2", "c1", "c0", "r2"]


class NoRunsError(StoreError):
    pass


def num(x, digits: int = 10) -> str:
    if x is None:
        return "NA"
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    if math.isnan(x):
        return "NA"
    return f"{x:.{digits}g}"


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def scaling_rows(scal: list[ScalingRecord], digits: int = 10):
    for s in scal:
        yield [
            num(s.alpha, digits), num(s.lam, digits), s.n, s.kind,
            num(s.p_star), num(s.extrapolated),
            num(s.fit_a, digits), num(s.fit_b, digits), num(s.fit_r2, digits),
            num(s.rq_total), s.params_per_layer, num(s.n_iter_avg, digits), num(s.rc_total, digits),
        ]


def record_rows(records: list[RunRecord], digits: int = 10):
    # energies keep full precision: the variational audit works at 1e-9
    for r in records:
        yield [
            num(r.alpha, digits), num(r.lam, digits), r.n, r.kind, r.p, r.seed,
            num(r.energy, 17), num(r.exact_energy, 17), num(r.min_energy_seen, 17),
            num(r.fidelity, 17), num(r.ent_error, digits), r.n_iters_best, num(r.n_iters_mean, digits),
            r.best_restart, r.strategy,
        ]


def fit_rows(fits: list[FitRow], digits: int = 10):
    for f in fits:
        yield [
            num(f.alpha, digits), num(f.lam, digits), f.kind, f.quantity, f.model,
            num(f.c2, digits), num(f.c1, digits), num(f.c0, digits), num(f.r2, digits),
        ]


def all_fits(scal: list[ScalingRecord]) -> list[FitRow]:
    return [
        row
        for quantity in ("p_star", "rq", "rc")
        for model in ("linear", "quadratic")
        for row in scaling_fits(scal, quantity, model)
    ]


def store_config(store: ResultStore) -> SweepConfig:
    path = store.root / "resolved-config.json"
    if not path.exists():
        return SweepConfig()
    return config_from_dict(json.loads(path.read_text()))


def analyse(store: ResultStore):
    cfg = store_config(store)
    records = load_records(store)
    if not records:
        raise NoRunsError(f"no runs in {store.root}")
    scal = scaling_records(records, cfg.threshold)
    return cfg, records, scal, all_fits(scal)


def _write_dat(path: Path, pairs, digits):
    with open(path, "w") as fh:
        for x, y in pairs:
            fh.write(f"{num(x, digits)} {num(y, digits)}\n")


def write_plotdata(out_dir: Path, records: list[RunRecord], scal: list[ScalingRecord], digits: int = 10):
    out = Path(out_dir) / "plotdata"
    out.mkdir(parents=True, exist_ok=True)
    cells: dict = {}
    for r in records:
        cells.setdefault(r.cell, []).append((r.p, r.ent_error))
    for cell, pairs in sorted(cells.items()):
        _write_dat(out / f"error_{cell_key(*cell)}.dat", sorted(pairs), digits)
    groups: dict = {}
    for s in scal:
        groups.setdefault((s.alpha, s.lam, s.kind), []).append(s)
    for (alpha, lam, kind), items in sorted(groups.items()):
        items = sorted(items, key=lambda s: s.n)
        tag = f"{_fmt(alpha)}_{_fmt(lam)}_{AnsatzKind.parse(kind).value}"
        _write_dat(out / f"pstar_{tag}.dat", [(s.n, s.p_star) for s in items], digits)
        _write_dat(out / f"rq_{tag}.dat", [(s.n, s.rq_total) for s in items], digits)
        _write_dat(out / f"rc_{tag}.dat", [(s.n, s.rc_total) for s in items], digits)


def emit_reports(store: ResultStore, out_dir=None, scaling_path=None) -> list[Path]:
    """Write scaling.csv, fits.csv, records.csv and (if enabled) plotdata/."""
    cfg, records, scal, fits = analyse(store)
    out_dir = Path(out_dir or store.root)
    out_dir.mkdir(parents=True, exist_ok=True)
    digits = cfg.precision
    scaling_path = Path(scaling_path) if scaling_path else out_dir / "scaling.csv"
    fits_path = scaling_path.with_name("fits.csv")
    _write_csv(scaling_path, SCALING_HEADER, scaling_rows(scal, digits))
    _write_csv(fits_path, FITS_HEADER, fit_rows(fits, digits))
    records_path = out_dir / "records.csv"
    _write_csv(records_path, RECORDS_HEADER, record_rows(records, digits))
    written = [scaling_path, fits_path, records_path]
    if cfg.plot_data:
        write_plotdata(out_dir, records, scal, digits)
        written.append(out_dir / "plotdata")
    return written

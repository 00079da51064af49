"""Grid driver, p* determination and resource-scaling fits.

The store is a directory with one JSON document per (cell, p, restart) under
``runs/``. Documents are written atomically and never rewritten, so an
interrupted sweep resumes exactly where it stopped.
"""

from __future__ import annotations

import json
import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .circuit import AnsatzKind, build_ansatz, cnot_count, params_per_layer
from .config import ConfigError, SweepConfig, dumps, write_resolved
from .entanglement import entanglement_error, negativity_profile
from .errors import InsufficientDataError, InvalidParameterError, OptimizationFailure
from .exact import dense_matrix, ground_state
from .model import ModelParams, build_hamiltonian
from .circuit import apply_circuit, initial_state
from .vqe import derive_seed, fidelity, run_restart

log = logging.getLogger(__name__)

FIT_FLOOR = 1e-12


class StoreError(OSError):
    """Result store cannot be read or written."""


def _fmt(x: float) -> str:
    return f"{x:g}"


def cell_key(alpha, lam, n, kind) -> str:
    return f"{_fmt(alpha)}_{_fmt(lam)}_{n}_{AnsatzKind.parse(kind).value}"


def cell_seed(base_seed, alpha, lam, n, kind, p) -> int:
    return derive_seed(int(base_seed), float(alpha), float(lam), int(n), AnsatzKind.parse(kind).value, int(p))


class ResultStore:
    def __init__(self, root):
        self.root = Path(root)
        self.runs = self.root / "runs"

    def run_path(self, alpha, lam, n, kind, p, restart) -> Path:
        return self.runs / f"{cell_key(alpha, lam, n, kind)}_p{p}_s{restart}.json"

    def has(self, *key) -> bool:
        return self.run_path(*key).exists()

    def load(self, *key) -> dict:
        path = self.run_path(*key)
        try:
            return json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise StoreError(f"cannot read {path}: {exc}") from exc

    def save(self, doc: dict) -> Path:
        key = (doc["alpha"], doc["lambda"], doc["n"], doc["ansatz"], doc["p"], doc["restart"])
        path = self.run_path(*key)
        if path.exists():
            return path
        try:
            self.runs.mkdir(parents=True, exist_ok=True)
            tmp = path.with_suffix(".tmp")
            tmp.write_text(json.dumps(doc, sort_keys=True) + "\n")
            os.replace(tmp, path)
        except OSError as exc:
            raise StoreError(f"cannot write {path}: {exc}") from exc
        return path

    def documents(self) -> list[dict]:
        if not self.runs.is_dir():
            return []
        docs = []
        for path in sorted(self.runs.glob("*.json")):
            try:
                docs.append(json.loads(path.read_text()))
            except (OSError, json.JSONDecodeError) as exc:
                raise StoreError(f"cannot read {path}: {exc}") from exc
        return docs

    def is_empty(self) -> bool:
        return not self.runs.is_dir() or not any(self.runs.glob("*.json"))


@dataclass(frozen=True)
class RunRecord:
    alpha: float
    lam: float
    n: int
    kind: str
    p: int
    seed: int
    energy: float
    exact_energy: float
    fidelity: float
    ent_error: float
    n_iters_best: int
    n_iters_mean: float
    wall_time_s: float
    best_restart: int = 0
    strategy: str = "average"
    min_energy_seen: float = math.nan

    @property
    def cell(self):
        return (self.alpha, self.lam, self.n, self.kind)


# --- grid execution ---------------------------------------------------------


def _run_one(cfg: SweepConfig, ctx, p: int, restart: int) -> dict:
    alpha, lam, n, kind, ham, ed, profile_ed = ctx
    seed = cell_seed(cfg.base_seed, alpha, lam, n, kind, p)
    spec = build_ansatz(kind, n, p)
    opt = replace(cfg.optimizer, seed=seed)
    t0 = time.perf_counter()
    res = run_restart(spec, ham, opt, restart)
    doc = {
        "alpha": float(alpha),
        "lambda": float(lam),
        "n": int(n),
        "ansatz": kind.value,
        "p": int(p),
        "restart": int(restart),
        "cell_seed": seed,
        "seed": res.seed,
        "exact_energy": ed.energy,
        "n_iters": res.n_iters,
        "n_evals": res.n_evals,
        "converged": res.converged,
        "failed": res.failed,
        "message": res.message,
        "min_energy_seen": res.min_energy_seen if math.isfinite(res.min_energy_seen) else None,
        "strategy": cfg.strategy,
        "params": [float(x) for x in res.params],
    }
    if res.failed:
        doc.update(energy=None, fidelity=None, ent_error=None, profile=None)
    else:
        state = apply_circuit(spec, res.params, initial_state(n))
        prof = negativity_profile(state, cfg.strategy)
        doc.update(
            energy=res.energy,
            fidelity=fidelity(state, ed.ground_space),
            ent_error=entanglement_error(prof, profile_ed),
            profile=list(prof.values),
        )
    doc["wall_time_s"] = time.perf_counter() - t0
    return doc


def aggregate(docs: list[dict]) -> RunRecord:
    """Reduce the restart documents of one (cell, p) to a RunRecord."""
    ok = [d for d in docs if not d.get("failed") and d.get("energy") is not None]
    if not ok:
        raise OptimizationFailure("all restarts failed", [d.get("message") for d in docs])
    best = min(ok, key=lambda d: (d["energy"], d["restart"]))
    return RunRecord(
        alpha=best["alpha"],
        lam=best["lambda"],
        n=best["n"],
        kind=best["ansatz"],
        p=best["p"],
        seed=best["cell_seed"],
        energy=best["energy"],
        exact_energy=best["exact_energy"],
        fidelity=best["fidelity"],
        ent_error=best["ent_error"],
        n_iters_best=best["n_iters"],
        n_iters_mean=float(np.mean([d["n_iters"] for d in ok])),
        wall_time_s=float(sum(d.get("wall_time_s", 0.0) for d in docs)),
        best_restart=best["restart"],
        strategy=best["strategy"],
        min_energy_seen=min(d["min_energy_seen"] for d in ok),
    )


def _stop(errors: list[float], threshold: float) -> bool:
    return len(errors) >= 2 and errors[-1] <= threshold and errors[-2] <= threshold


def run_cell(cfg: SweepConfig, store: ResultStore, alpha, lam, n, kind) -> tuple[list[RunRecord], int]:
    """Ascend p for one cell. Returns the records and the number of new VQE runs."""
    kind = AnsatzKind.parse(kind)
    ham = build_hamiltonian(ModelParams(n, alpha, lam))
    ed = ground_state(dense_matrix(ham))
    ctx = (alpha, lam, n, kind, ham, ed, negativity_profile(ed.state, cfg.strategy))
    records: list[RunRecord] = []
    new_runs = 0
    for p in range(1, cfg.p_max + 1):
        docs = []
        for k in range(cfg.optimizer.restarts):
            if store.has(alpha, lam, n, kind, p, k):
                docs.append(store.load(alpha, lam, n, kind, p, k))
            else:
                doc = _run_one(cfg, ctx, p, k)
                store.save(doc)
                new_runs += 1
                docs.append(doc)
        records.append(aggregate(docs))
        log.info("%s p=%d E(p)=%.3e fid=%.6f", cell_key(alpha, lam, n, kind), p, records[-1].ent_error, records[-1].fidelity)
        if _stop([r.ent_error for r in records], cfg.threshold):
            break
    return records, new_runs


def _cell_job(args):
    cfg, root, cell = args
    return run_cell(cfg, ResultStore(root), *cell)


def run_grid(cfg: SweepConfig, store: ResultStore, jobs: int = 1) -> list[RunRecord]:
    """Run every cell; already-persisted runs are reused, not recomputed."""
    resolved = store.root / "resolved-config.json"
    if resolved.exists() and resolved.read_text() != dumps(cfg):
        raise ConfigError(f"{store.root} was created with a different configuration; use a fresh directory")
    write_resolved(cfg, store.root)
    cells = list(cfg.cells())
    tasks = [(cfg, str(store.root), c) for c in cells]
    if jobs <= 1:
        outs = [_cell_job(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outs = list(pool.map(_cell_job, tasks))
    log.info("grid done: %d cells, %d new VQE runs", len(cells), sum(o[1] for o in outs))
    return [r for recs, _ in outs for r in recs]


def load_records(store: ResultStore) -> list[RunRecord]:
    """Aggregate every (cell, p) present in the store, sorted by key."""
    groups: dict = {}
    for doc in store.documents():
        key = (doc["alpha"], doc["lambda"], doc["n"], doc["ansatz"], doc["p"])
        groups.setdefault(key, []).append(doc)
    return [aggregate(groups[k]) for k in sorted(groups)]


# --- analysis -----------------------------------------------------------------


@dataclass(frozen=True)
class PStar:
    value: int | None  # None: no crossing measured and no decaying fit
    extrapolated: bool = False


def loglinear_fit(points) -> tuple[float, float, float]:
    """Least squares of ln E on p; returns (slope, intercept, r^2)."""
    pts = [(float(p), float(e)) for p, e in points if e > FIT_FLOOR]
    if len(pts) < 3:
        raise InsufficientDataError(f"need >= 3 points above {FIT_FLOOR}, got {len(pts)}")
    p = np.array([q for q, _ in pts])
    y = np.log([e for _, e in pts])
    return _linfit(p, y)


def _linfit(x, y) -> tuple[float, float, float]:
    a, b = np.polyfit(x, y, 1)
    return float(a), float(b), _r2(y, a * x + b)


def _r2(y, yhat) -> float:
    ss_res = float(np.sum((y - yhat) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    if ss_tot <= 1e-24 * max(1.0, float(np.sum(y**2))):
        return 1.0 if ss_res <= 1e-24 * max(1.0, float(np.sum(y**2))) else 0.0
    return 1.0 - ss_res / ss_tot


def find_pstar(records, threshold: float = 1e-3) -> PStar:
    """Smallest p with E(p) <= threshold confirmed by its successor when measured.

    ``records`` are RunRecords of one cell or ``(p, E)`` pairs. Without a
    measured crossing, a decaying log-linear fit is extrapolated instead.
    """
    pts = sorted((r.p, r.ent_error) if isinstance(r, RunRecord) else (int(r[0]), float(r[1])) for r in records)
    if not pts:
        raise InvalidParameterError("no records")
    errs = dict(pts)
    for p, e in pts:
        nxt = errs.get(p + 1)
        if e <= threshold and (nxt is None or nxt <= threshold):
            return PStar(p)
    try:
        a, b, _ = loglinear_fit(pts)
    except InsufficientDataError:
        return PStar(None)
    if a >= 0:
        return PStar(None)
    return PStar(max(int(math.ceil((math.log(threshold) - b) / a)), pts[-1][0] + 1), True)


def resource_quantum(kind, n: int, p_star: int) -> int:
    return cnot_count(kind, n, p_star)


def resource_classical(p_star, params_per_layer, n_iter_avg) -> float:
    return p_star * params_per_layer * n_iter_avg


@dataclass(frozen=True)
class ScalingRecord:
    alpha: float
    lam: float
    n: int
    kind: str
    p_star: int | None
    extrapolated: bool
    fit_a: float
    fit_b: float
    fit_r2: float
    rq_total: int | None
    params_per_layer: int
    n_iter_avg: float
    rc_total: float | None


def scaling_records(records: list[RunRecord], threshold: float = 1e-3) -> list[ScalingRecord]:
    cells: dict = {}
    for r in records:
        cells.setdefault(r.cell, []).append(r)
    out = []
    for cell in sorted(cells):
        alpha, lam, n, kind = cell
        recs = sorted(cells[cell], key=lambda r: r.p)
        ps = find_pstar(recs, threshold)
        try:
            a, b, r2 = loglinear_fit([(r.p, r.ent_error) for r in recs])
        except InsufficientDataError:
            a = b = r2 = math.nan
        if a == a and r2 < 0.8:
            log.warning("cell %s: log-linear fit r^2 = %.3f below 0.8", cell_key(*cell), r2)
        L = params_per_layer(kind, n)
        by_p = {r.p: r for r in recs}
        # mean restart iterations at p*, or at the last measured p when extrapolated
        ref = by_p.get(ps.value) if ps.value is not None else None
        if ref is None:
            ref = recs[-1]
        n_avg = ref.n_iters_mean
        if ps.value is None:
            rq = rc = None
        else:
            rq = resource_quantum(kind, n, ps.value)
            rc = resource_classical(ps.value, L, n_avg)
        out.append(ScalingRecord(alpha, lam, n, kind, ps.value, ps.extrapolated, a, b, r2, rq, L, n_avg, rc))
    return out


@dataclass(frozen=True)
class FitRow:
    alpha: float
    lam: float
    kind: str
    quantity: str
    model: str
    c2: float
    c1: float
    c0: float
    r2: float
    n_points: int


QUANTITIES = {"p_star": "p_star", "rq": "rq_total", "rc": "rc_total"}


def fit_vs_n(ns, values, model: str = "linear") -> tuple[float, float, float, float]:
    """Least-squares polynomial fit of value vs N; returns (c2, c1, c0, r^2)."""
    x = np.asarray(ns, dtype=float)
    y = np.asarray(values, dtype=float)
    deg = {"linear": 1, "quadratic": 2}.get(model)
    if deg is None:
        raise InvalidParameterError(f"unknown model {model!r}")
    if len(x) < 3:
        raise InsufficientDataError(f"need >= 3 points, got {len(x)}")
    coef = np.polyfit(x, y, deg)
    r2 = _r2(y, np.polyval(coef, x))
    if deg == 1:
        return 0.0, float(coef[0]), float(coef[1]), r2
    return float(coef[0]), float(coef[1]), float(coef[2]), r2


def scaling_fits(records: list[ScalingRecord], quantity: str, model: str) -> list[FitRow]:
    """Fit ``quantity`` against N for every (alpha, lambda, kind) group.

    Extrapolated and missing p* values are left out. Groups with fewer than
    three usable points come back with NaN coefficients.
    """
    if quantity not in QUANTITIES:
        raise InvalidParameterError(f"unknown quantity {quantity!r}")
    attr = QUANTITIES[quantity]
    groups: dict = {}
    for r in records:
        groups.setdefault((r.alpha, r.lam, r.kind), []).append(r)
    out = []
    for key in sorted(groups):
        pts = [(r.n, getattr(r, attr)) for r in groups[key] if r.p_star is not None and not r.extrapolated]
        try:
            c2, c1, c0, r2 = fit_vs_n([p[0] for p in pts], [p[1] for p in pts], model)
        except InsufficientDataError:
            c2 = c1 = c0 = r2 = math.nan
        out.append(FitRow(*key, quantity, model, c2, c1, c0, r2, len(pts)))
    return out

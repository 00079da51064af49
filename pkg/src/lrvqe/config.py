"""Sweep configuration: JSON ingestion, validation and resolved copies."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from .circuit import AnsatzKind
from .entanglement import STRATEGIES
from .errors import InvalidParameterError
from .vqe import OptimizerConfig


class ConfigError(InvalidParameterError):
    """Bad configuration document; the message names the offending key path."""


@dataclass(frozen=True)
class SweepConfig:
    alphas: tuple[float, ...] = (0.5, 1.5, 10.0)
    lambdas: tuple[float, ...] = (0.5, 1.0, 2.0)
    sizes: tuple[int, ...] = (4, 5, 6, 7, 8, 9)
    kinds: tuple[AnsatzKind, ...] = (AnsatzKind.NN, AnsatzKind.NNN, AnsatzKind.NNNN)
    p_max: int = 60
    threshold: float = 1e-3
    strategy: str = "average"
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    base_seed: int = 2024
    precision: int = 10
    plot_data: bool = True

    def __post_init__(self):
        _validate(self)

    def cells(self):
        """Grid cells in canonical order."""
        for a in self.alphas:
            for lam in self.lambdas:
                for n in self.sizes:
                    for k in self.kinds:
                        yield a, lam, n, k

    def to_dict(self) -> dict:
        d = asdict(self)
        d["alphas"] = list(self.alphas)
        d["lambdas"] = list(self.lambdas)
        d["sizes"] = list(self.sizes)
        d["kinds"] = [k.value for k in self.kinds]
        opt = d["optimizer"]
        opt.pop("seed")  # per-run seeds derive from base_seed
        return d


def _fail(path, msg):
    raise ConfigError(f"{path}: {msg}")


def _validate(cfg: SweepConfig):
    for name in ("alphas", "lambdas", "sizes", "kinds"):
        if not getattr(cfg, name):
            _fail(name, "must be a non-empty list")
    for i, a in enumerate(cfg.alphas):
        if not (math.isfinite(a) and a >= 0):
            _fail(f"alphas[{i}]", f"must be finite and >= 0, got {a!r}")
    for i, lam in enumerate(cfg.lambdas):
        if not (math.isfinite(lam) and lam >= 0):
            _fail(f"lambdas[{i}]", f"must be finite and >= 0, got {lam!r}")
    for i, n in enumerate(cfg.sizes):
        if not 2 <= n <= 12:
            _fail(f"sizes[{i}]", f"must lie in [2, 12], got {n!r}")
        for k in cfg.kinds:
            if n < k.max_arity:
                _fail(f"sizes[{i}]", f"N={n} too small for the {k.value} ansatz")
    if not cfg.p_max >= 1:
        _fail("p_max", f"must be >= 1, got {cfg.p_max!r}")
    if not (math.isfinite(cfg.threshold) and cfg.threshold > 0):
        _fail("threshold", f"must be > 0, got {cfg.threshold!r}")
    if cfg.strategy not in STRATEGIES:
        _fail("strategy", f"must be one of {STRATEGIES}, got {cfg.strategy!r}")
    if not 1 <= cfg.precision <= 17:
        _fail("precision", f"must lie in [1, 17], got {cfg.precision!r}")


_NUMBER = (int, float)


def _expect(path, value, types, what):
    if isinstance(value, bool) or not isinstance(value, types):
        _fail(path, f"expected {what}, got {type(value).__name__}")
    return value


def _list_of(path, value, types, what):
    if not isinstance(value, list):
        _fail(path, f"expected a list of {what}")
    return tuple(_expect(f"{path}[{i}]", v, types, what) for i, v in enumerate(value))


_OPT_KEYS = {f.name for f in fields(OptimizerConfig)} - {"seed"}


def _optimizer(doc) -> OptimizerConfig:
    if not isinstance(doc, dict):
        _fail("optimizer", "expected an object")
    for key in doc:
        if key not in _OPT_KEYS:
            _fail(f"optimizer.{key}", "unknown key")
    kw = {}
    for key in ("max_iters", "restarts", "history"):
        if key in doc:
            kw[key] = _expect(f"optimizer.{key}", doc[key], int, "an integer")
    for key in ("grad_tol", "f_tol", "init_scale"):
        if key in doc:
            kw[key] = float(_expect(f"optimizer.{key}", doc[key], _NUMBER, "a number"))
    try:
        return OptimizerConfig(**kw)
    except InvalidParameterError as exc:
        raise ConfigError(f"optimizer: {exc}") from None


def config_from_dict(doc: dict) -> SweepConfig:
    if not isinstance(doc, dict):
        raise ConfigError("<root>: expected a JSON object")
    known = {f.name for f in fields(SweepConfig)}
    for key in doc:
        if key not in known:
            _fail(key, "unknown key")
    kw = {}
    if "alphas" in doc:
        kw["alphas"] = tuple(float(v) for v in _list_of("alphas", doc["alphas"], _NUMBER, "numbers"))
    if "lambdas" in doc:
        kw["lambdas"] = tuple(float(v) for v in _list_of("lambdas", doc["lambdas"], _NUMBER, "numbers"))
    if "sizes" in doc:
        kw["sizes"] = _list_of("sizes", doc["sizes"], int, "integers")
    if "kinds" in doc:
        names = _list_of("kinds", doc["kinds"], str, "strings")
        try:
            kw["kinds"] = tuple(AnsatzKind.parse(s) for s in names)
        except InvalidParameterError as exc:
            raise ConfigError(f"kinds: {exc}") from None
    if "p_max" in doc:
        kw["p_max"] = _expect("p_max", doc["p_max"], int, "an integer")
    if "threshold" in doc:
        kw["threshold"] = float(_expect("threshold", doc["threshold"], _NUMBER, "a number"))
    if "strategy" in doc:
        kw["strategy"] = _expect("strategy", doc["strategy"], str, "a string")
    if "optimizer" in doc:
        kw["optimizer"] = _optimizer(doc["optimizer"])
    if "base_seed" in doc:
        kw["base_seed"] = _expect("base_seed", doc["base_seed"], int, "an integer")
    if "precision" in doc:
        kw["precision"] = _expect("precision", doc["precision"], int, "an integer")
    if "plot_data" in doc:
        if not isinstance(doc["plot_data"], bool):
            _fail("plot_data", "expected true or false")
        kw["plot_data"] = doc["plot_data"]
    return SweepConfig(**kw)


def parse_config(path) -> SweepConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except FileNotFoundError:
        raise ConfigError(f"{path}: no such config file") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: malformed JSON ({exc})") from None
    return config_from_dict(doc)


def dumps(cfg: SweepConfig) -> str:
    return json.dumps(cfg.to_dict(), indent=2, sort_keys=True) + "\n"


def write_resolved(cfg: SweepConfig, out_dir) -> Path:
    path = Path(out_dir) / "resolved-config.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(cfg))
    return path

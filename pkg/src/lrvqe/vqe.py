"""VQE loop: exact energies, analytic gradients and L-BFGS-B with restarts."""

from __future__ import annotations

import hashlib
import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import minimize as _scipy_minimize

from . import _kernels
from .circuit import AnsatzSpec, apply_circuit, initial_state, rotation_arrays
from .errors import InvalidParameterError, OptimizationFailure
from .exact import GroundSolution
from .model import SpinHamiltonian
from .pauli import apply_pauli, sparse_hamiltonian

BOUND = 2 * math.pi


@dataclass(frozen=True)
class OptimizerConfig:
    max_iters: int = 2000
    grad_tol: float = 1e-9
    f_tol: float = 1e-12
    restarts: int = 5
    init_scale: float = 0.1
    seed: int = 0
    history: int = 10

    def __post_init__(self):
        if self.restarts < 1:
            raise InvalidParameterError("restarts must be >= 1")
        if self.max_iters < 1:
            raise InvalidParameterError("max_iters must be >= 1")
        if not (self.grad_tol > 0 and self.f_tol > 0):
            raise InvalidParameterError("tolerances must be positive")
        if self.init_scale < 0:
            raise InvalidParameterError("init_scale must be >= 0")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class RestartResult:
    index: int
    seed: int
    params: np.ndarray
    energy: float
    n_iters: int
    n_evals: int
    converged: bool
    message: str
    min_energy_seen: float
    failed: bool = False


@dataclass
class VqeResult:
    best_params: np.ndarray
    energy: float
    n_iters: int
    total_iters: int
    fidelity: float
    state: np.ndarray
    converged: bool
    best_restart: int
    restarts: list[RestartResult] = field(repr=False, default_factory=list)

    @property
    def mean_iters(self) -> float:
        ok = [r.n_iters for r in self.restarts if not r.failed]
        return float(np.mean(ok)) if ok else float("nan")


def derive_seed(*parts) -> int:
    """Stable 63-bit seed from arbitrary printable parts."""
    digest = hashlib.blake2b(repr(parts).encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little") >> 1


def energy(psi: np.ndarray, ham: SpinHamiltonian) -> float:
    """<psi|H|psi>, accumulated term by term from Pauli actions."""
    psi = np.asarray(psi)
    if psi.shape != (1 << ham.n_sites,):
        raise InvalidParameterError(f"state of shape {psi.shape} does not match N={ham.n_sites}")
    total = 0.0
    for term in ham.terms:
        total += term.coeff * np.vdot(psi, apply_pauli(term.letters, psi)).real
    return float(total)


class Objective:
    """Energy and adjoint-mode gradient of one (ansatz, Hamiltonian) pair."""

    def __init__(self, spec: AnsatzSpec, ham: SpinHamiltonian, init=None):
        if spec.n_qubits != ham.n_sites:
            raise InvalidParameterError(f"ansatz has {spec.n_qubits} qubits, Hamiltonian {ham.n_sites} sites")
        self.spec = spec
        self.hmat = sparse_hamiltonian(ham)
        self.init = initial_state(spec.n_qubits) if init is None else np.asarray(init, dtype=complex)
        self.arrays = rotation_arrays(spec)
        self.n_evals = 0
        self.min_seen = math.inf

    def state(self, theta) -> np.ndarray:
        psi = self.init.copy()
        _kernels.forward(psi, *self.arrays, np.asarray(theta, dtype=float))
        return psi

    def value(self, theta) -> float:
        psi = self.state(theta)
        e = float(np.vdot(psi, self.hmat @ psi).real)
        self._track(e)
        return e

    def value_and_grad(self, theta) -> tuple[float, np.ndarray]:
        theta = np.asarray(theta, dtype=float)
        psi = self.state(theta)
        lam = self.hmat @ psi
        e = float(np.vdot(psi, lam).real)
        self._track(e)
        grad = np.zeros_like(theta)
        _kernels.adjoint_gradient(psi, np.ascontiguousarray(lam, dtype=complex), *self.arrays, theta, grad)
        return e, grad

    def _track(self, e):
        self.n_evals += 1
        if not math.isfinite(e):
            raise FloatingPointError("non-finite energy")
        self.min_seen = min(self.min_seen, e)


def _shift_gradient(spec: AnsatzSpec, theta, ham, init) -> np.ndarray:
    xs, zs, slots, coefs = rotation_arrays(spec)
    hmat = sparse_hamiltonian(ham)
    base = coefs * theta[slots]
    grad = np.zeros_like(theta)

    def e_at(angles):
        psi = np.array(init, dtype=complex)
        _kernels.forward_angles(psi, xs, zs, angles)
        return np.vdot(psi, hmat @ psi).real

    # each op is exp(-i phi P) with P^2 = I: dE/dphi = E(phi + pi/4) - E(phi - pi/4)
    for k in range(len(xs)):
        plus = base.copy()
        plus[k] += math.pi / 4
        minus = base.copy()
        minus[k] -= math.pi / 4
        grad[slots[k]] += coefs[k] * (e_at(plus) - e_at(minus))
    return grad


def gradient(spec: AnsatzSpec, theta, ham: SpinHamiltonian, init=None, method: str = "shift") -> np.ndarray:
    """Exact energy gradient; ``method`` is "shift" (parameter-shift) or "adjoint"."""
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (spec.total_params,):
        raise InvalidParameterError(f"expected {spec.total_params} parameters, got shape {theta.shape}")
    init = initial_state(spec.n_qubits) if init is None else np.asarray(init, dtype=complex)
    if method == "shift":
        return _shift_gradient(spec, theta, ham, init)
    if method == "adjoint":
        return Objective(spec, ham, init).value_and_grad(theta)[1]
    raise InvalidParameterError(f"unknown gradient method {method!r}")


def fidelity(psi: np.ndarray, ground_space) -> float:
    """Sum of squared overlaps with an orthonormal set of states."""
    psi = np.asarray(psi)
    g = np.asarray(ground_space)
    if g.ndim == 1:
        g = g[:, None]
    elif isinstance(ground_space, (list, tuple)):
        g = np.stack([np.asarray(v) for v in ground_space], axis=1)
    if g.shape[0] != psi.shape[0]:
        raise InvalidParameterError(f"dimension mismatch: {psi.shape[0]} vs {g.shape[0]}")
    return float(np.sum(np.abs(g.conj().T @ psi) ** 2))


def restart_seed(seed: int, index: int) -> int:
    return derive_seed(int(seed), int(index))


def run_restart(spec: AnsatzSpec, ham: SpinHamiltonian, cfg: OptimizerConfig, index: int) -> RestartResult:
    """One seeded L-BFGS-B run; failures are reported, not raised."""
    seed = restart_seed(cfg.seed, index)
    rng = np.random.default_rng(seed)
    x0 = rng.uniform(-cfg.init_scale, cfg.init_scale, spec.total_params)
    obj = Objective(spec, ham)
    try:
        res = _scipy_minimize(
            obj.value_and_grad,
            x0,
            jac=True,
            method="L-BFGS-B",
            bounds=[(-BOUND, BOUND)] * spec.total_params,
            options={
                "maxcor": cfg.history,
                "maxiter": cfg.max_iters,
                "maxfun": 5 * cfg.max_iters,
                "gtol": cfg.grad_tol,
                "ftol": cfg.f_tol,
            },
        )
    except FloatingPointError as exc:
        return RestartResult(index, seed, x0, math.nan, 0, obj.n_evals, False, str(exc), obj.min_seen, failed=True)
    return RestartResult(
        index,
        seed,
        np.asarray(res.x),
        float(res.fun),
        int(res.nit),
        obj.n_evals,
        bool(res.success),
        str(res.message),
        obj.min_seen,
    )


def select_best(results: list[RestartResult]) -> RestartResult:
    ok = [r for r in results if not r.failed and math.isfinite(r.energy)]
    if not ok:
        raise OptimizationFailure("all restarts failed", [r.message for r in results])
    return min(ok, key=lambda r: (r.energy, r.index))


def minimize(spec: AnsatzSpec, ham: SpinHamiltonian, cfg: OptimizerConfig, ed: GroundSolution) -> VqeResult:
    results = [run_restart(spec, ham, cfg, k) for k in range(cfg.restarts)]
    best = select_best(results)
    state = apply_circuit(spec, best.params, initial_state(spec.n_qubits))
    return VqeResult(
        best_params=best.params,
        energy=best.energy,
        n_iters=best.n_iters,
        total_iters=sum(r.n_iters for r in results),
        fidelity=fidelity(state, ed.ground_space),
        state=state,
        converged=best.converged,
        best_restart=best.index,
        restarts=results,
    )

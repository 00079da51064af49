import math

import numpy as np
import pytest

from lrvqe.circuit import AnsatzKind, build_ansatz
from lrvqe.errors import InvalidParameterError, OptimizationFailure
from lrvqe.exact import dense_matrix, ground_state
from lrvqe.model import ModelParams, build_hamiltonian
from lrvqe.vqe import (
    Objective,
    OptimizerConfig,
    RestartResult,
    energy,
    fidelity,
    gradient,
    minimize,
    select_best,
)

from .conftest import random_state


def _problem(n, alpha=0.5, lam=0.5):
    ham = build_hamiltonian(ModelParams(n, alpha, lam))
    return ham, ground_state(dense_matrix(ham))


def test_energy_on_all_zeros():
    p = ModelParams(5, 1.5, 2.0)
    psi = np.zeros(32, dtype=complex)
    psi[0] = 1
    assert energy(psi, build_hamiltonian(p)) == pytest.approx(5 * p.h, rel=1e-14)


def test_energy_of_ground_state():
    ham, gs = _problem(6)
    assert energy(gs.state, ham) == pytest.approx(gs.energy, abs=1e-10)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_energy_matches_dense_quadratic_form(rng, n):
    ham = build_hamiltonian(ModelParams(n, 0.8, 1.7))
    m = dense_matrix(ham)
    for _ in range(5):
        psi = random_state(rng, n)
        assert energy(psi, ham) == pytest.approx(np.vdot(psi, m @ psi).real, abs=1e-10)


def test_energy_dimension_mismatch():
    ham, _ = _problem(4)
    with pytest.raises(InvalidParameterError):
        energy(np.ones(8) / math.sqrt(8), ham)


def _finite_difference(obj, theta, step=1e-5):
    g = np.empty_like(theta)
    for m in range(len(theta)):
        e = np.zeros_like(theta)
        e[m] = step
        g[m] = (obj.value(theta + e) - obj.value(theta - e)) / (2 * step)
    return g


def test_gradient_matches_finite_differences_n4_p2(rng):
    ham, _ = _problem(4, 1.5, 1.0)
    spec = build_ansatz("nn", 4, 2)
    theta = rng.uniform(-np.pi, np.pi, spec.total_params)
    fd = _finite_difference(Objective(spec, ham), theta)
    np.testing.assert_allclose(gradient(spec, theta, ham), fd, atol=1e-6)


def test_gradient_routes_agree_on_many_instances():
    rng = np.random.default_rng(50)
    worst_fd = worst_adj = 0.0
    for i in range(50):
        kind = list(AnsatzKind)[i % 3]
        n = int(rng.integers(4, 7))
        p = int(rng.integers(1, 3))
        ham = build_hamiltonian(ModelParams(n, float(rng.uniform(0, 3)), float(rng.uniform(0, 3))))
        spec = build_ansatz(kind, n, p)
        theta = rng.uniform(-np.pi, np.pi, spec.total_params)
        shift = gradient(spec, theta, ham, method="shift")
        adj = gradient(spec, theta, ham, method="adjoint")
        fd = _finite_difference(Objective(spec, ham), theta)
        worst_fd = max(worst_fd, np.abs(shift - fd).max())
        worst_adj = max(worst_adj, np.abs(shift - adj).max())
    assert worst_fd <= 1e-6
    assert worst_adj <= 1e-10


def test_final_rz_gradient_vanishes_at_zero():
    ham, _ = _problem(4)
    spec = build_ansatz("nnn", 4, 2)
    g = gradient(spec, np.zeros(spec.total_params), ham)
    np.testing.assert_allclose(g[-4:], 0.0, atol=1e-12)


def test_gradient_length_mismatch():
    ham, _ = _problem(4)
    with pytest.raises(InvalidParameterError):
        gradient(build_ansatz("nn", 4, 1), np.zeros(3), ham)


def test_fidelity_cases(rng):
    g = random_state(rng, 3)
    assert fidelity(g, [g]) == pytest.approx(1.0, abs=1e-12)
    other = random_state(rng, 3)
    other -= np.vdot(g, other) * g
    other /= np.linalg.norm(other)
    assert fidelity(other, [g]) == pytest.approx(0.0, abs=1e-12)
    psi = random_state(rng, 3)
    direct = abs(sum(np.conj(a) * b for a, b in zip(g, psi))) ** 2
    assert fidelity(psi, [g]) == pytest.approx(direct, abs=1e-12)
    # two-dimensional span containing psi
    assert fidelity(psi, np.stack([g, other], axis=1)) <= 1 + 1e-12


def test_fidelity_dimension_mismatch():
    with pytest.raises(InvalidParameterError):
        fidelity(np.ones(4) / 2, [np.ones(8) / math.sqrt(8)])


def test_two_site_exactly_solved():
    ham, gs = _problem(2, 0.0, 0.5)
    assert gs.energy == pytest.approx(-math.sqrt(4.25), abs=1e-12)
    res = minimize(build_ansatz("nn", 2, 1), ham, OptimizerConfig(seed=7), gs)
    assert res.energy - gs.energy <= 1e-8
    assert res.fidelity >= 1 - 1e-8
    assert res.energy >= gs.energy - 1e-9


@pytest.mark.parametrize("kind", list(AnsatzKind))
def test_pure_field_respects_bound(kind):
    ham, gs = _problem(5, 1.0, 0.0)
    res = minimize(build_ansatz(kind, 5, 1), ham, OptimizerConfig(seed=1, restarts=2), gs)
    assert res.energy >= gs.energy - 1e-9
    # odd N starts in |1...1>, already the ground state
    assert res.energy == pytest.approx(gs.energy, abs=1e-8)


def test_seed_determinism():
    ham, gs = _problem(5, 0.5, 1.0)
    spec = build_ansatz("nnn", 5, 2)
    cfg = OptimizerConfig(seed=99, restarts=3, max_iters=300)
    a = minimize(spec, ham, cfg, gs)
    b = minimize(spec, ham, cfg, gs)
    np.testing.assert_array_equal(a.best_params, b.best_params)
    assert (a.energy, a.n_iters, a.total_iters, a.fidelity) == (b.energy, b.n_iters, b.total_iters, b.fidelity)
    c = minimize(spec, ham, OptimizerConfig(seed=100, restarts=3, max_iters=300), gs)
    assert not np.array_equal(a.best_params, c.best_params)


def test_variational_bound_over_every_evaluation():
    ham, gs = _problem(6, 0.5, 1.0)
    for kind in AnsatzKind:
        res = minimize(build_ansatz(kind, 6, 2), ham, OptimizerConfig(seed=3, restarts=2), gs)
        for r in res.restarts:
            assert r.min_energy_seen >= gs.energy - 1e-9
        assert 0 <= res.fidelity <= 1 + 1e-12


def test_monotone_best_so_far():
    ham, _ = _problem(5, 0.5, 0.5)
    spec = build_ansatz("nn", 5, 3)
    obj = Objective(spec, ham)
    seen = []
    from scipy.optimize import minimize as sp_min

    x0 = np.random.default_rng(0).uniform(-0.1, 0.1, spec.total_params)
    sp_min(obj.value_and_grad, x0, jac=True, method="L-BFGS-B",
           callback=lambda xk: seen.append(obj.value(xk)), options={"maxcor": 10, "maxiter": 200})
    assert np.all(np.diff(seen) <= 1e-12)


def test_converged_run_has_small_gradient():
    ham, gs = _problem(4, 10.0, 2.0)
    spec = build_ansatz("nnn", 4, 2)
    res = minimize(spec, ham, OptimizerConfig(seed=5, restarts=1, max_iters=5000), gs)
    g = gradient(spec, res.best_params, ham, method="adjoint")
    msg = res.restarts[0].message
    # L-BFGS-B stops on either the projected-gradient or the relative-reduction test
    if "PROJ" in msg:
        assert np.abs(g).max() <= 1e-9
    else:
        assert np.abs(g).max() <= 1e-4


def test_all_restarts_failing():
    bad = [RestartResult(k, k, np.zeros(1), math.nan, 0, 0, False, "boom", math.inf, failed=True) for k in range(3)]
    with pytest.raises(OptimizationFailure) as info:
        select_best(bad)
    assert info.value.diagnostics == ["boom"] * 3


def test_nonfinite_energy_aborts_restart(monkeypatch):
    from lrvqe import vqe

    ham, gs = _problem(4)
    monkeypatch.setattr(vqe.Objective, "value_and_grad", lambda self, th: (self._track(math.nan), None))
    with pytest.raises(OptimizationFailure):
        minimize(build_ansatz("nn", 4, 1), ham, OptimizerConfig(restarts=2), gs)


def test_optimizer_config_validation():
    with pytest.raises(InvalidParameterError):
        OptimizerConfig(restarts=0)
    with pytest.raises(InvalidParameterError):
        OptimizerConfig(grad_tol=0)


def test_objective_matches_term_energy(rng):
    ham, _ = _problem(6, 1.5, 2.0)
    spec = build_ansatz("nnn", 6, 2)
    obj = Objective(spec, ham)
    for _ in range(5):
        theta = rng.uniform(-np.pi, np.pi, spec.total_params)
        assert obj.value(theta) == pytest.approx(energy(obj.state(theta), ham), abs=1e-11)

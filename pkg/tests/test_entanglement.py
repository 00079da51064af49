import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lrvqe.entanglement import (
    NegativityProfile,
    entanglement_error,
    log_negativity,
    negativity_profile,
    reduced_density_two,
)
from lrvqe.errors import ContractViolation, InvalidParameterError
from lrvqe.exact import dense_matrix, ground_state
from lrvqe.model import ModelParams, build_hamiltonian

from .conftest import random_state

BELL = np.array([1, 0, 0, 1]) / math.sqrt(2)


def rdm_oracle(psi, i, j):
    """Partial trace by explicit summation over the full projector."""
    n = psi.size.bit_length() - 1
    full = np.outer(psi, psi.conj())
    rho = np.zeros((4, 4), dtype=complex)
    for a in range(1 << n):
        for b in range(1 << n):
            rest_a = a & ~((1 << i) | (1 << j))
            rest_b = b & ~((1 << i) | (1 << j))
            if rest_a != rest_b:
                continue
            ra = 2 * ((a >> i) & 1) + ((a >> j) & 1)
            rb = 2 * ((b >> i) & 1) + ((b >> j) & 1)
            rho[ra, rb] += full[a, b]
    return rho


def ghz(n):
    psi = np.zeros(1 << n, dtype=complex)
    psi[0] = psi[-1] = 1 / math.sqrt(2)
    return psi


def test_product_state_rdm():
    psi = np.zeros(8)
    psi[0] = 1
    np.testing.assert_array_equal(reduced_density_two(psi, 0, 1), np.diag([1, 0, 0, 0]))


def test_bell_with_spectator():
    # Bell pair on qubits (0, 1), qubit 2 in |0>
    psi = np.zeros(8, dtype=complex)
    psi[0] = psi[3] = 1 / math.sqrt(2)
    rho = reduced_density_two(psi, 0, 2)
    np.testing.assert_allclose(rho, np.diag([0.5, 0, 0.5, 0]), atol=1e-15)
    assert log_negativity(rho) == 0.0


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_rdm_oracle_equivalence(rng, n):
    psi = random_state(rng, n)
    for i in range(n):
        for j in range(n):
            if i != j:
                np.testing.assert_allclose(reduced_density_two(psi, i, j), rdm_oracle(psi, i, j), atol=1e-12)


@settings(max_examples=30)
@given(st.integers(2, 8), st.integers(0, 2**32 - 1))
def test_rdm_is_a_state(n, seed):
    rng = np.random.default_rng(seed)
    psi = random_state(rng, n)
    i, j = rng.choice(n, 2, replace=False)
    rho = reduced_density_two(psi, int(i), int(j))
    assert np.max(np.abs(rho - rho.conj().T)) <= 1e-12
    assert np.trace(rho).real == pytest.approx(1.0, abs=1e-12)
    assert np.linalg.eigvalsh(rho).min() >= -1e-10
    en = log_negativity(rho)
    assert 0.0 <= en <= 1.0 + 1e-12


def test_same_site_rejected():
    with pytest.raises(InvalidParameterError):
        reduced_density_two(np.ones(4) / 2, 1, 1)


def test_bell_negativity():
    assert log_negativity(np.outer(BELL, BELL)) == pytest.approx(1.0, abs=1e-12)


def test_product_negativity():
    assert log_negativity(np.diag([0.25, 0.25, 0.25, 0.25])) == 0.0


def test_werner_negativity():
    p = 2 / 3
    rho = p * np.outer(BELL, BELL) + (1 - p) * np.eye(4) / 4
    # partial-transpose spectrum: (1+p)/4 three times and (1-3p)/4
    spectrum = [(1 + p) / 4] * 3 + [(1 - 3 * p) / 4]
    expected = math.log2(sum(abs(x) for x in spectrum))
    assert expected == pytest.approx(math.log2(1.5), abs=1e-15)
    assert log_negativity(rho) == pytest.approx(expected, abs=1e-12)


def test_non_hermitian_rejected():
    rho = np.zeros((4, 4))
    rho[0, 1] = 1
    with pytest.raises(ContractViolation):
        log_negativity(rho)


@settings(max_examples=30)
@given(st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_swap_symmetry(n, seed):
    rng = np.random.default_rng(seed)
    psi = random_state(rng, n)
    a = log_negativity(reduced_density_two(psi, 0, n - 1))
    b = log_negativity(reduced_density_two(psi, n - 1, 0))
    assert a == pytest.approx(b, abs=1e-12)


def _random_unitary(rng):
    q, r = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))
    return q * (np.diag(r) / abs(np.diag(r)))


@settings(max_examples=30)
@given(st.integers(0, 2**32 - 1))
def test_local_unitary_invariance(seed):
    rng = np.random.default_rng(seed)
    n = 4
    psi = random_state(rng, n)
    i, j = 1, 3
    before = log_negativity(reduced_density_two(psi, i, j))
    t = psi.reshape((2,) * n)
    for q in (i, j):
        t = np.moveaxis(np.tensordot(_random_unitary(rng), t, axes=([1], [n - 1 - q])), 0, n - 1 - q)
    after = log_negativity(reduced_density_two(t.reshape(-1), i, j))
    assert after == pytest.approx(before, abs=1e-10)


@pytest.mark.parametrize("strategy", ["average", "central", "first-pair"])
@pytest.mark.parametrize("n", [3, 5, 8])
def test_ghz_profile_is_zero(n, strategy):
    prof = negativity_profile(ghz(n), strategy)
    assert prof.values == (0.0,) * (n - 1)


def test_central_pair_choice():
    # N=8 (0-based centre 3.5): r=1 -> (3,4); r=2 -> (2,4) by lower-i tie-break; r=7 -> (0,7)
    from lrvqe.entanglement import _pair_start

    assert _pair_start(8, 1, "central") == [3]
    assert _pair_start(8, 2, "central") == [2]
    assert _pair_start(8, 7, "central") == [0]
    assert _pair_start(8, 3, "first-pair") == [0]
    assert _pair_start(8, 3, "average") == list(range(5))


def test_ground_state_profile():
    gs = ground_state(dense_matrix(build_hamiltonian(ModelParams(8, 0.5, 0.5))))
    a = negativity_profile(gs.state)
    b = negativity_profile(gs.state)
    assert a == b
    vals = np.array(a.values)
    assert len(vals) == 7 and np.all(vals > 0)
    # decays with distance
    assert np.all(np.diff(vals) < 0)


def test_entanglement_error_values():
    ed = NegativityProfile((0.5, 0.2))
    vqe = NegativityProfile((0.4, 0.25))
    assert entanglement_error(vqe, ed) == pytest.approx(0.15, abs=1e-15)
    assert entanglement_error(ed, ed) == 0


def test_entanglement_error_mismatch():
    with pytest.raises(InvalidParameterError):
        entanglement_error(NegativityProfile((0.1,)), NegativityProfile((0.1, 0.2)))
    with pytest.raises(InvalidParameterError):
        entanglement_error(NegativityProfile((0.1,), "central"), NegativityProfile((0.1,), "average"))


profiles = st.lists(st.floats(0, 1), min_size=3, max_size=3).map(lambda v: NegativityProfile(tuple(v)))


@given(profiles, profiles, profiles)
def test_triangle_inequality(a, b, c):
    assert entanglement_error(a, c) <= entanglement_error(a, b) + entanglement_error(b, c) + 1e-12

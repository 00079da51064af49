"""Exact benchmarks: dense diagonalization and the free-fermion dispersion."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, ContractViolation
from .model import MAX_SITES, ModelParams, SpinHamiltonian, couplings
from .pauli import pauli_action

DEGENERACY_TOL = 1e-10
SYMMETRY_TOL = 1e-14


@dataclass(frozen=True)
class GroundSolution:
    energy: float
    state: np.ndarray
    gap: float
    # orthonormal columns spanning every eigenvector within DEGENERACY_TOL of E0
    ground_space: np.ndarray

    @property
    def degeneracy(self) -> int:
        return self.ground_space.shape[1]


@dataclass(frozen=True)
class DispersionPoint:
    k: float
    eps: float
    delta: float
    energy: float


def dense_matrix(ham: SpinHamiltonian) -> np.ndarray:
    """Dense ``2^N x 2^N`` matrix of ``ham`` (little-endian basis)."""
    n = ham.n_sites
    if n > MAX_SITES:
        raise CapacityError(f"dense treatment limited to N <= {MAX_SITES}, got {n}")
    dim = 1 << n
    mat = np.zeros((dim, dim), dtype=complex)
    rows = np.arange(dim)
    for term in ham.terms:
        src, phase = pauli_action(term.letters)
        mat[rows, src] += term.coeff * phase
    if np.any(mat.imag):
        return mat
    return np.ascontiguousarray(mat.real)


def _fix_phase(vec: np.ndarray) -> np.ndarray:
    """Make the first non-negligible amplitude real and positive."""
    k = int(np.argmax(np.abs(vec) > 1e-12 * np.abs(vec).max()))
    return vec * (abs(vec[k]) / vec[k])


def ground_state(op: np.ndarray) -> GroundSolution:
    op = np.asarray(op)
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        raise ContractViolation(f"expected a square matrix, got shape {op.shape}")
    if np.max(np.abs(op - op.conj().T), initial=0.0) > SYMMETRY_TOL * max(1.0, np.abs(op).max()):
        raise ContractViolation("matrix is not symmetric/Hermitian")
    evals, evecs = np.linalg.eigh(op)
    e0 = float(evals[0])
    deg = int(np.sum(evals - e0 <= DEGENERACY_TOL))
    space = evecs[:, :deg]
    if deg == 1:
        state = _fix_phase(space[:, 0])
    else:
        # basis-independent pick: normalized projection of the lowest
        # basis vector the ground space touches
        weight = np.sum(np.abs(space) ** 2, axis=1)
        i0 = int(np.argmax(weight > 1e-12))
        state = space @ space[i0].conj()
        state = state / np.linalg.norm(state)
        state = _fix_phase(state)
    if np.isrealobj(op):
        state = state.real
    gap = float(evals[deg] - e0) if deg < len(evals) else 0.0
    return GroundSolution(e0, state, gap, space)


def dispersion(params: ModelParams, k: float) -> DispersionPoint:
    j = couplings(params)
    r = np.arange(1, params.n_sites)
    eps = params.h - math.fsum(j * np.cos(k * r))
    delta = math.fsum(j * np.sin(k * r))
    return DispersionPoint(float(k), eps, delta, math.sqrt(eps * eps + delta * delta))

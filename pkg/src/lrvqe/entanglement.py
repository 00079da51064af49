"""Pairwise logarithmic negativity and distance-resolved profiles."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation, InvalidParameterError

STRATEGIES = ("average", "central", "first-pair")
CLAMP = 1e-12


@dataclass(frozen=True)
class NegativityProfile:
    values: tuple[float, ...]  # values[r-1] is the negativity at distance r
    strategy: str = "average"

    def __len__(self):
        return len(self.values)

    def as_array(self) -> np.ndarray:
        return np.array(self.values)


def _n_qubits(psi: np.ndarray) -> int:
    n = psi.size.bit_length() - 1
    if psi.ndim != 1 or psi.size != 1 << n:
        raise InvalidParameterError(f"statevector length {psi.size} is not a power of two")
    return n


def reduced_density_two(psi: np.ndarray, i: int, j: int) -> np.ndarray:
    """4x4 reduced state of qubits (i, j), basis index ``2*q_i + q_j``."""
    psi = np.asarray(psi)
    n = _n_qubits(psi)
    if i == j:
        raise InvalidParameterError("pair sites must differ")
    if not (0 <= i < n and 0 <= j < n):
        raise InvalidParameterError(f"sites ({i}, {j}) out of range for N={n}")
    # C-order reshape puts qubit q on axis n-1-q
    t = psi.reshape((2,) * n)
    m = np.moveaxis(t, (n - 1 - i, n - 1 - j), (0, 1)).reshape(4, -1)
    return m @ m.conj().T


def log_negativity(rho: np.ndarray) -> float:
    """log2 of the trace norm of the partial transpose over the first qubit."""
    rho = np.asarray(rho)
    if rho.shape != (4, 4):
        raise InvalidParameterError(f"expected a 4x4 density matrix, got {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > 1e-10:
        raise ContractViolation("density matrix is not Hermitian")
    pt = rho.reshape(2, 2, 2, 2).transpose(2, 1, 0, 3).reshape(4, 4)
    norm = np.sum(np.abs(np.linalg.eigvalsh(pt)))
    en = math.log2(norm)
    return 0.0 if en < CLAMP else en


def _pair_start(n: int, r: int, strategy: str) -> list[int]:
    if strategy == "average":
        return list(range(n - r))
    if strategy == "first-pair":
        return [0]
    if strategy == "central":
        centre = (n - 1) / 2
        return [min(range(n - r), key=lambda i: (abs(i + r / 2 - centre), i))]
    raise InvalidParameterError(f"unknown strategy {strategy!r}; choose from {STRATEGIES}")


def negativity_profile(psi: np.ndarray, strategy: str = "average") -> NegativityProfile:
    psi = np.asarray(psi)
    n = _n_qubits(psi)
    if n < 2:
        raise InvalidParameterError("profile needs at least two qubits")
    values = []
    for r in range(1, n):
        starts = _pair_start(n, r, strategy)
        vals = [log_negativity(reduced_density_two(psi, i, i + r)) for i in starts]
        values.append(math.fsum(vals) / len(vals))
    return NegativityProfile(tuple(values), strategy)


def entanglement_error(profile_vqe: NegativityProfile, profile_ed: NegativityProfile) -> float:
    """Sum over distances of |E_ED(r) - E_VQE(r)|."""
    if len(profile_vqe) != len(profile_ed):
        raise InvalidParameterError(f"profile lengths differ: {len(profile_vqe)} vs {len(profile_ed)}")
    if profile_vqe.strategy != profile_ed.strategy:
        raise InvalidParameterError(f"strategies differ: {profile_vqe.strategy} vs {profile_ed.strategy}")
    return math.fsum(abs(a - b) for a, b in zip(profile_ed.values, profile_vqe.values))

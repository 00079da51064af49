"""Action of Pauli strings on little-endian computational basis states.

Qubit ``q`` is bit ``q`` of the basis index. For a string ``P``,
``P|b> = phase(b) |b ^ flip>``, so ``(P psi)[a] = phase(a ^ flip) psi[a ^ flip]``.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .model import PauliTerm, SpinHamiltonian


def masks(letters: str) -> tuple[int, int, int]:
    """(x-mask, z-mask, y-mask) bitmasks of a letter string."""
    x = z = y = 0
    for q, c in enumerate(letters):
        if c == "X":
            x |= 1 << q
        elif c == "Z":
            z |= 1 << q
        elif c == "Y":
            y |= 1 << q
    return x, z, y


def _parity(values: np.ndarray) -> np.ndarray:
    v = values.copy()
    par = np.zeros_like(v)
    while np.any(v):
        par ^= v & 1
        v >>= 1
    return par


@lru_cache(maxsize=4096)
def _action(letters: str) -> tuple[np.ndarray, np.ndarray]:
    n = len(letters)
    x, z, y = masks(letters)
    idx = np.arange(1 << n, dtype=np.int64)
    src = idx ^ (x | y)
    # phase of P acting on |src>, landing on |idx>
    par = _parity(src & (z | y))
    phase = (1j ** bin(y).count("1")) * (1.0 - 2.0 * par)
    if not y:
        phase = phase.real
    src.setflags(write=False)
    phase.setflags(write=False)
    return src, phase


def pauli_action(letters: str) -> tuple[np.ndarray, np.ndarray]:
    """Index map and phases with ``(P psi) = phase * psi[src]``."""
    return _action(letters)


def apply_pauli(letters: str, psi: np.ndarray) -> np.ndarray:
    src, phase = _action(letters)
    return phase * psi[src]


def term_matrix(term: PauliTerm) -> sp.csr_matrix:
    src, phase = _action(term.letters)
    dim = len(src)
    rows = np.arange(dim)
    return sp.csr_matrix((term.coeff * phase, (rows, src)), shape=(dim, dim))


@lru_cache(maxsize=256)
def sparse_hamiltonian(ham: SpinHamiltonian) -> sp.csr_matrix:
    """Sparse operator of ``ham``, summed from per-term Pauli actions."""
    dim = 1 << ham.n_sites
    out = sp.csr_matrix((dim, dim), dtype=float)
    for term in ham.terms:
        out = out + term_matrix(term)
    out.sum_duplicates()
    return out

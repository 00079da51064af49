"""Long-range extended Ising chain with Kac-normalized string couplings.

Site ``n`` of the chain (0-based here) is qubit ``n``. The Hamiltonian is

    H = h * sum_n Z_n - sum_{n, r} J_r X_n Z_{n+1} ... Z_{n+r-1} X_{n+r}

on an open chain (only pairs with ``n + r < N``), with ``J_r = (J / A) r^-alpha``,
``A = sum_{r=1}^{N-1} r^-alpha``, ``h = A`` and ``J = lam * h``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError

MAX_SITES = 12


@dataclass(frozen=True)
class ModelParams:
    n_sites: int
    alpha: float
    lam: float

    def __post_init__(self):
        if int(self.n_sites) != self.n_sites or self.n_sites < 2:
            raise InvalidParameterError(f"n_sites must be an integer >= 2, got {self.n_sites!r}")
        if not (math.isfinite(self.alpha) and self.alpha >= 0):
            raise InvalidParameterError(f"alpha must be finite and >= 0, got {self.alpha!r}")
        if not (math.isfinite(self.lam) and self.lam >= 0):
            raise InvalidParameterError(f"lam must be finite and >= 0, got {self.lam!r}")

    @property
    def h(self) -> float:
        """Transverse field; pinned to the Kac normalization."""
        return kac_norm(self.n_sites, self.alpha)

    @property
    def J(self) -> float:
        return self.lam * self.h


@dataclass(frozen=True)
class PauliTerm:
    coeff: float
    letters: str

    def __post_init__(self):
        if set(self.letters) - set("IXYZ"):
            raise InvalidParameterError(f"bad Pauli letters {self.letters!r}")


@dataclass(frozen=True)
class SpinHamiltonian:
    n_sites: int
    terms: tuple[PauliTerm, ...]

    def __len__(self):
        return len(self.terms)


def kac_norm(n_sites: int, alpha: float) -> float:
    """A = sum_{r=1}^{N-1} r^-alpha."""
    if n_sites < 2:
        raise InvalidParameterError(f"n_sites must be >= 2, got {n_sites}")
    r = np.arange(1, n_sites, dtype=float)
    return math.fsum(r ** -float(alpha))


def couplings(params: ModelParams) -> np.ndarray:
    """Return ``j`` with ``j[r-1] = J_r`` for r = 1..N-1."""
    a = params.h
    r = np.arange(1, params.n_sites, dtype=float)
    j = (params.J / a) * r ** -float(params.alpha)
    j.setflags(write=False)
    return j


def string_letters(n_sites: int, start: int, dist: int) -> str:
    """Letters of X_start Z...Z X_{start+dist} on an ``n_sites`` chain."""
    letters = ["I"] * n_sites
    letters[start] = "X"
    for l in range(start + 1, start + dist):
        letters[l] = "Z"
    letters[start + dist] = "X"
    return "".join(letters)


def build_hamiltonian(params: ModelParams) -> SpinHamiltonian:
    n = params.n_sites
    h = params.h
    j = couplings(params)
    terms = []
    for site in range(n):
        letters = ["I"] * n
        letters[site] = "Z"
        terms.append(PauliTerm(h, "".join(letters)))
    for site in range(n):
        for r in range(1, n - site):
            terms.append(PauliTerm(-float(j[r - 1]), string_letters(n, site, r)))
    return SpinHamiltonian(n, tuple(terms))


def critical_fields(params: ModelParams) -> tuple[float, float]:
    """Fields at which the k = 0 and k = pi gaps close."""
    j = couplings(params)
    r = np.arange(1, params.n_sites)
    return math.fsum(j), math.fsum(((-1.0) ** r) * j)

"""Structure-aware ansatz circuits and a statevector engine.

Each layer holds, in order: XX blocks on (j, j+1), XZX blocks on (j, j+1, j+2)
(NNN and NNNN), XZZX blocks on (j, ..., j+3) (NNNN only), then an RZ on every
qubit. A block ``exp(-i theta X Z..Z X)`` decomposes into H on its end qubits,
a CNOT staircase down to the last qubit, ``RZ(2 theta)`` there, the staircase
back up and H on the end qubits again.

Conventions: ``RZ(phi) = diag(exp(-i phi/2), exp(i phi/2))``; qubit ``q`` is
bit ``q`` of the basis index.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import _kernels
from .errors import InvalidParameterError
from .model import MAX_SITES


class AnsatzKind(str, enum.Enum):
    NN = "nn"
    NNN = "nnn"
    NNNN = "nnnn"

    @property
    def max_arity(self) -> int:
        return {"nn": 2, "nnn": 3, "nnnn": 4}[self.value]

    @classmethod
    def parse(cls, value) -> "AnsatzKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise InvalidParameterError(f"unknown ansatz kind {value!r}") from None


BLOCK_LETTERS = {2: "XX", 3: "XZX", 4: "XZZX"}


class Gate(NamedTuple):
    name: str  # "H", "X", "CNOT" or "RZ"
    qubits: tuple[int, ...]
    slot: int | None = None
    mult: float = 1.0


class PauliRotation(NamedTuple):
    """``exp(-i * coef * theta[slot] * P)``, P given by x/z bitmasks."""

    xmask: int
    zmask: int
    slot: int
    coef: float


def _block_gates(first: int, arity: int, slot: int) -> list[Gate]:
    qs = list(range(first, first + arity))
    ends = (qs[0], qs[-1])
    gates = [Gate("H", (q,)) for q in ends]
    gates += [Gate("CNOT", (a, b)) for a, b in zip(qs[:-1], qs[1:])]
    gates.append(Gate("RZ", (qs[-1],), slot, 2.0))
    gates += [Gate("CNOT", (a, b)) for a, b in reversed(list(zip(qs[:-1], qs[1:])))]
    gates += [Gate("H", (q,)) for q in ends]
    return gates


def _check_size(kind: AnsatzKind, n_qubits: int, layers: int) -> None:
    if n_qubits < kind.max_arity:
        raise InvalidParameterError(f"{kind.name} ansatz needs at least {kind.max_arity} qubits, got {n_qubits}")
    if n_qubits > MAX_SITES:
        raise InvalidParameterError(f"at most {MAX_SITES} qubits supported, got {n_qubits}")
    if int(layers) != layers or layers < 1:
        raise InvalidParameterError(f"layers must be a positive integer, got {layers!r}")


def params_per_layer(kind, n_qubits: int) -> int:
    kind = AnsatzKind.parse(kind)
    return {"nn": 2 * n_qubits - 1, "nnn": 3 * (n_qubits - 1), "nnnn": 2 * (2 * n_qubits - 3)}[kind.value]


def cnots_per_layer(kind, n_qubits: int) -> int:
    kind = AnsatzKind.parse(kind)
    return {"nn": 2 * (n_qubits - 1), "nnn": 2 * (3 * n_qubits - 5), "nnnn": 4 * (3 * n_qubits - 7)}[kind.value]


def param_count(kind, n_qubits: int, layers: int) -> int:
    kind = AnsatzKind.parse(kind)
    _check_size(kind, n_qubits, layers)
    return layers * params_per_layer(kind, n_qubits)


def cnot_count(kind, n_qubits: int, layers: int) -> int:
    kind = AnsatzKind.parse(kind)
    _check_size(kind, n_qubits, layers)
    return layers * cnots_per_layer(kind, n_qubits)


@dataclass(frozen=True)
class AnsatzSpec:
    kind: AnsatzKind
    n_qubits: int
    layers: int
    params_per_layer: int
    gate_template: tuple[Gate, ...] = field(repr=False)
    rotations: tuple[PauliRotation, ...] = field(repr=False)

    @property
    def total_params(self) -> int:
        return self.layers * self.params_per_layer

    def count(self, name: str) -> int:
        return sum(g.name == name for g in self.gate_template)


def build_ansatz(kind, n_qubits: int, layers: int) -> AnsatzSpec:
    kind = AnsatzKind.parse(kind)
    _check_size(kind, n_qubits, layers)
    gates: list[Gate] = []
    rots: list[PauliRotation] = []
    slot = 0
    for _ in range(layers):
        for arity in range(2, kind.max_arity + 1):
            for j in range(n_qubits - arity + 1):
                gates += _block_gates(j, arity, slot)
                xmask = (1 << j) | (1 << (j + arity - 1))
                zmask = sum(1 << q for q in range(j + 1, j + arity - 1))
                rots.append(PauliRotation(xmask, zmask, slot, 1.0))
                slot += 1
        for q in range(n_qubits):
            gates.append(Gate("RZ", (q,), slot, 1.0))
            rots.append(PauliRotation(0, 1 << q, slot, 0.5))
            slot += 1
    spec = AnsatzSpec(kind, n_qubits, layers, params_per_layer(kind, n_qubits), tuple(gates), tuple(rots))
    assert slot == spec.total_params
    return spec


def initial_state(n_qubits: int) -> np.ndarray:
    """|0...0> for even N, |1...1> for odd N (parity sector of the ground state)."""
    if n_qubits < 1:
        raise InvalidParameterError(f"n_qubits must be >= 1, got {n_qubits}")
    psi = np.zeros(1 << n_qubits, dtype=complex)
    psi[0 if n_qubits % 2 == 0 else -1] = 1.0
    return psi


# --- primitive gates -------------------------------------------------------

_H = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)
_X = np.array([[0.0, 1.0], [1.0, 0.0]])


def rz_matrix(phi: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * phi), np.exp(0.5j * phi)])


def apply_1q(psi: np.ndarray, mat: np.ndarray, q: int) -> np.ndarray:
    n = psi.size.bit_length() - 1
    t = psi.reshape(1 << (n - 1 - q), 2, 1 << q)
    return np.einsum("ab,ibj->iaj", mat, t).reshape(-1)


def apply_cnot(psi: np.ndarray, control: int, target: int) -> np.ndarray:
    if control == target:
        raise InvalidParameterError("CNOT control and target must differ")
    idx = np.arange(psi.size)
    src = np.where((idx >> control) & 1, idx ^ (1 << target), idx)
    return psi[src]


def apply_gate(psi: np.ndarray, gate: Gate, theta=None) -> np.ndarray:
    if gate.name == "H":
        return apply_1q(psi, _H, gate.qubits[0])
    if gate.name == "X":
        return apply_1q(psi, _X, gate.qubits[0])
    if gate.name == "CNOT":
        return apply_cnot(psi, *gate.qubits)
    if gate.name == "RZ":
        return apply_1q(psi, rz_matrix(gate.mult * theta[gate.slot]), gate.qubits[0])
    raise InvalidParameterError(f"unknown gate {gate.name!r}")


# --- circuit application ---------------------------------------------------


def _rotation_arrays(spec: AnsatzSpec):
    r = spec.rotations
    return (
        np.array([g.xmask for g in r], dtype=np.int64),
        np.array([g.zmask for g in r], dtype=np.int64),
        np.array([g.slot for g in r], dtype=np.int64),
        np.array([g.coef for g in r], dtype=float),
    )


_ARRAY_CACHE: dict = {}


def rotation_arrays(spec: AnsatzSpec):
    key = (spec.kind, spec.n_qubits, spec.layers)
    arrs = _ARRAY_CACHE.get(key)
    if arrs is None:
        if len(_ARRAY_CACHE) > 512:
            _ARRAY_CACHE.clear()
        arrs = _ARRAY_CACHE[key] = _rotation_arrays(spec)
    return arrs


def _check_inputs(spec: AnsatzSpec, theta, init) -> tuple[np.ndarray, np.ndarray]:
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (spec.total_params,):
        raise InvalidParameterError(f"expected {spec.total_params} parameters, got shape {theta.shape}")
    init = np.asarray(init)
    if init.shape != (1 << spec.n_qubits,):
        raise InvalidParameterError(f"initial state has shape {init.shape}, expected ({1 << spec.n_qubits},)")
    return theta, init


def apply_circuit(spec: AnsatzSpec, theta, init, method: str = "blocks") -> np.ndarray:
    """Prepare ``U(theta)|init>``.

    ``method="blocks"`` applies each block as one Pauli rotation (fast path);
    ``method="gates"`` runs the primitive H/CNOT/RZ template gate by gate.
    Both give the same state exactly (the decomposition carries no global phase).
    """
    theta, init = _check_inputs(spec, theta, init)
    if method == "gates":
        psi = init.astype(complex)
        for gate in spec.gate_template:
            psi = apply_gate(psi, gate, theta)
        return psi
    if method != "blocks":
        raise InvalidParameterError(f"unknown method {method!r}")
    psi = np.array(init, dtype=complex)
    _kernels.forward(psi, *rotation_arrays(spec), theta)
    return psi


def block_unitary(block: str, theta: float) -> np.ndarray:
    """``cos(theta) I - i sin(theta) P`` for P in {XX, XZX, XZZX}."""
    if block not in BLOCK_LETTERS.values():
        raise InvalidParameterError(f"unknown block {block!r}")
    from .pauli import pauli_action

    src, phase = pauli_action(block)
    dim = len(src)
    p = np.zeros((dim, dim))
    p[np.arange(dim), src] = phase
    return np.cos(theta) * np.eye(dim) - 1j * np.sin(theta) * p


def block_circuit_unitary(block: str, theta: float) -> np.ndarray:
    """Dense matrix of the primitive-gate decomposition of one block."""
    arity = len(block)
    gates = _block_gates(0, arity, 0)
    dim = 1 << arity
    cols = []
    for b in range(dim):
        psi = np.zeros(dim, dtype=complex)
        psi[b] = 1.0
        for g in gates:
            psi = apply_gate(psi, g, [theta])
        cols.append(psi)
    return np.stack(cols, axis=1)

"""VQE resource scaling for the long-range extended Ising chain."""

from .circuit import AnsatzKind, build_ansatz, cnot_count, param_count
from .model import ModelParams, build_hamiltonian

__version__ = "0.1.0"
__all__ = ["AnsatzKind", "ModelParams", "build_ansatz", "build_hamiltonian", "cnot_count", "param_count"]

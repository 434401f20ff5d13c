"""Small seeded statevector simulator with trajectory noise."""

from .circuit import Circuit
from .gates import CNOT, GATE_KINDS, H, PAULIS, Gate, cnot, h, is_unitary, u2, u2_matrix, unitary, x
from .noise import NOISELESS, PRESETS, NoiseModel, apply_noise_trajectory, preset
from .sampling import BLOCK, Counts, iter_blocks, run_shots, stream_generator
from .state import QuantumState, apply_gate, expectation, measure_qubit_z

__all__ = [
    "BLOCK",
    "CNOT",
    "Circuit",
    "Counts",
    "GATE_KINDS",
    "Gate",
    "H",
    "NOISELESS",
    "NoiseModel",
    "PAULIS",
    "PRESETS",
    "QuantumState",
    "apply_gate",
    "apply_noise_trajectory",
    "cnot",
    "expectation",
    "h",
    "is_unitary",
    "iter_blocks",
    "measure_qubit_z",
    "preset",
    "run_shots",
    "stream_generator",
    "u2",
    "u2_matrix",
    "unitary",
    "x",
]

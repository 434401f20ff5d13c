"""Statevector type and the basic operations on it."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .gates import Gate

NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12
MAX_QUBITS = 5


@dataclass(frozen=True, eq=False)
class QuantumState:
    """Normalized pure state of ``n_qubits`` qubits.

    Amplitudes are indexed big-endian: qubit 0 is the most significant bit.
    Instances are treated as values; operations return new states.
    """

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        if self.n_qubits < 1 or self.n_qubits > MAX_QUBITS:
            raise ValueError(f"n_qubits must be in 1..{MAX_QUBITS}, got {self.n_qubits}")
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.shape[0] != 2**self.n_qubits:
            raise ValueError(
                f"expected {2**self.n_qubits} amplitudes, got {amps.shape[0]}"
            )
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized (norm^2 = {norm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_amplitudes(cls, amplitudes: Sequence[complex] | np.ndarray) -> QuantumState:
        """Build a state from unnormalized amplitudes."""
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        n = int(round(np.log2(amps.shape[0]))) if amps.shape[0] else 0
        if amps.shape[0] != 2**n:
            raise ValueError(f"amplitude count {amps.shape[0]} is not a power of two")
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise ValueError("zero vector cannot be normalized")
        return cls(n, amps / norm)

    @classmethod
    def basis(cls, bits: str) -> QuantumState:
        """Computational basis state, e.g. ``QuantumState.basis("10")``."""
        if not bits or set(bits) - {"0", "1"}:
            raise ValueError(f"invalid bitstring {bits!r}")
        amps = np.zeros(2 ** len(bits), dtype=complex)
        amps[int(bits, 2)] = 1.0
        return cls(len(bits), amps)

    @classmethod
    def zeros(cls, n_qubits: int) -> QuantumState:
        return cls.basis("0" * n_qubits)

    def tensor(self, other: QuantumState) -> QuantumState:
        """``self`` on the leading qubits, ``other`` on the trailing ones."""
        return QuantumState.from_amplitudes(np.kron(self.amplitudes, other.amplitudes))

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def __repr__(self) -> str:
        return f"QuantumState(n_qubits={self.n_qubits}, amplitudes={self.amplitudes!r})"


def _apply_matrix(
    amps: np.ndarray, n_qubits: int, matrix: np.ndarray, targets: Sequence[int]
) -> np.ndarray:
    """Contract ``matrix`` into the target axes of a flat amplitude vector."""
    k = len(targets)
    psi = amps.reshape((2,) * n_qubits)
    op = matrix.reshape((2,) * (2 * k))
    out = np.tensordot(op, psi, axes=(list(range(k, 2 * k)), list(targets)))
    out = np.moveaxis(out, list(range(k)), list(targets))
    return out.reshape(-1)


def _check_targets(n_qubits: int, targets: Sequence[int]) -> None:
    for t in targets:
        if not 0 <= t < n_qubits:
            raise IndexError(f"qubit {t} out of range for {n_qubits}-qubit state")


def apply_gate(state: QuantumState, gate: Gate) -> QuantumState:
    """Apply ``gate`` and return the new state."""
    _check_targets(state.n_qubits, gate.targets)
    out = _apply_matrix(state.amplitudes, state.n_qubits, gate.matrix, gate.targets)
    # unitaries preserve the norm up to rounding; renormalize to keep 1e-12
    return QuantumState(state.n_qubits, out / np.linalg.norm(out))


def bit_masks(n_qubits: int, qubit: int) -> np.ndarray:
    """Boolean mask of basis indices where ``qubit`` is 1."""
    idx = np.arange(2**n_qubits)
    return ((idx >> (n_qubits - 1 - qubit)) & 1).astype(bool)


def prob_zero(amps: np.ndarray, n_qubits: int, qubit: int) -> float:
    ones = bit_masks(n_qubits, qubit)
    return float(np.sum(np.abs(amps[~ones]) ** 2))


def _collapse(amps: np.ndarray, n_qubits: int, qubit: int, bit: int) -> np.ndarray:
    ones = bit_masks(n_qubits, qubit)
    out = amps.copy()
    out[ones if bit == 0 else ~ones] = 0.0
    return out / np.linalg.norm(out)


def measure_qubit_z(
    state: QuantumState, qubit: int, rng: np.random.Generator
) -> tuple[int, QuantumState]:
    """Projective z measurement of one qubit.

    Returns the outcome as +1 (bit 0) or -1 (bit 1) and the collapsed state.
    Consumes exactly one uniform draw from ``rng``.
    """
    _check_targets(state.n_qubits, [qubit])
    p0 = prob_zero(state.amplitudes, state.n_qubits, qubit)
    bit = 0 if rng.random() < p0 else 1
    collapsed = _collapse(state.amplitudes, state.n_qubits, qubit, bit)
    return (1 if bit == 0 else -1), QuantumState(state.n_qubits, collapsed)


def expectation(state: QuantumState, observable: np.ndarray) -> float:
    """``<psi|A|psi>`` for a Hermitian ``A`` on the full state space."""
    a = np.asarray(observable, dtype=complex)
    dim = state.amplitudes.shape[0]
    if a.shape != (dim, dim):
        raise ValueError(f"observable shape {a.shape} does not match state dimension {dim}")
    if np.max(np.abs(a - a.conj().T)) > HERMITIAN_TOL:
        raise ValueError("observable is not Hermitian")
    value = np.vdot(state.amplitudes, a @ state.amplitudes)
    if abs(value.imag) > 1e-10:
        raise ArithmeticError(f"expectation has imaginary part {value.imag:.3e}")
    return float(value.real)

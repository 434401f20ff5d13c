"""Stochastic-trajectory noise channels.

Channels act after each gate on the qubits that gate touched. Depolarizing
noise picks a uniformly random non-identity Pauli on the touched qubits;
amplitude damping is unravelled into a jump (decay to ``|0>``) or the
no-jump back-action ``diag(1, sqrt(1 - gamma))``, renormalized.

Channels with a zero parameter consume no random draws, which keeps an
all-zero model bit-identical to the noiseless engine under the same seed.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .gates import PAULIS, Gate
from .state import QuantumState, _apply_matrix, bit_masks

_PAULI_ORDER = ("I", "X", "Y", "Z")


@dataclass(frozen=True)
class NoiseModel:
    """Per-gate noise parameters plus classical readout error.

    ``readout_flip`` is either one probability for every qubit or a
    per-qubit sequence indexed by qubit.
    """

    p1_depol: float = 0.0
    p2_depol: float = 0.0
    gamma_ad: float = 0.0
    readout_flip: float | tuple[float, ...] = 0.0

    def __post_init__(self) -> None:
        flips = self.readout_flip
        if isinstance(flips, (list, tuple, np.ndarray)):
            flips = tuple(float(f) for f in flips)
            object.__setattr__(self, "readout_flip", flips)
            values = flips
        else:
            object.__setattr__(self, "readout_flip", float(flips))
            values = (float(flips),)
        for name, value in (
            ("p1_depol", self.p1_depol),
            ("p2_depol", self.p2_depol),
            ("gamma_ad", self.gamma_ad),
        ):
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")
        for f in values:
            if not 0.0 <= f <= 1.0:
                raise ValueError(f"readout_flip must lie in [0, 1], got {f}")

    def flip_probability(self, qubit: int) -> float:
        if isinstance(self.readout_flip, tuple):
            if qubit >= len(self.readout_flip):
                return 0.0
            return self.readout_flip[qubit]
        return self.readout_flip

    @property
    def has_gate_noise(self) -> bool:
        return self.p1_depol > 0 or self.p2_depol > 0 or self.gamma_ad > 0

    @property
    def is_noiseless(self) -> bool:
        flips = self.readout_flip if isinstance(self.readout_flip, tuple) else (self.readout_flip,)
        return not self.has_gate_noise and not any(flips)

    def with_readout(self, readout_flip: float | Sequence[float]) -> NoiseModel:
        return NoiseModel(self.p1_depol, self.p2_depol, self.gamma_ad, readout_flip)

    def to_dict(self) -> dict:
        flips = self.readout_flip
        return {
            "p1_depol": self.p1_depol,
            "p2_depol": self.p2_depol,
            "gamma_ad": self.gamma_ad,
            "readout_flip": list(flips) if isinstance(flips, tuple) else flips,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> NoiseModel:
        unknown = set(data) - {"p1_depol", "p2_depol", "gamma_ad", "readout_flip"}
        if unknown:
            raise ValueError(f"unknown noise parameters: {sorted(unknown)}")
        return cls(**dict(data))


NOISELESS = NoiseModel()

# Illustrative values inside the ibmqx4 calibration ranges, not a fit.
PRESETS: dict[str, NoiseModel] = {
    "noiseless": NOISELESS,
    "ibmqx4-like": NoiseModel(p1_depol=0.002, p2_depol=0.05, gamma_ad=0.01, readout_flip=0.05),
}


def preset(name: str) -> NoiseModel:
    try:
        return PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown noise preset {name!r}; known: {sorted(PRESETS)}") from None


@lru_cache(maxsize=256)
def _pauli_strings(n_qubits: int, targets: tuple[int, ...]) -> tuple[np.ndarray, ...]:
    """Full-space matrices of the non-identity Pauli strings on ``targets``.

    Entry ``code - 1`` holds the string whose base-4 digits (I, X, Y, Z)
    are ``code``, most significant digit on the first target.
    """
    k = len(targets)
    out = []
    for code in range(1, 4**k):
        mat = np.eye(2**n_qubits, dtype=complex)
        for pos, q in enumerate(targets):
            letter = _PAULI_ORDER[(code >> (2 * (k - 1 - pos))) & 3]
            if letter != "I":
                mat = _full_operator(n_qubits, PAULIS[letter], (q,)) @ mat
        out.append(mat)
    return tuple(out)


def _full_operator(n_qubits: int, matrix: np.ndarray, targets: tuple[int, ...]) -> np.ndarray:
    dim = 2**n_qubits
    eye = np.eye(dim, dtype=complex)
    return np.stack([_apply_matrix(eye[:, i], n_qubits, matrix, targets) for i in range(dim)], axis=1)


@lru_cache(maxsize=64)
def _damping_indices(n_qubits: int, qubit: int) -> tuple[np.ndarray, np.ndarray]:
    ones = bit_masks(n_qubits, qubit)
    return np.flatnonzero(ones), np.flatnonzero(~ones)


class GateNoise:
    """Precomputed post-gate channel for one gate of an ``n_qubits`` register.

    Draw order per call: one uniform for the depolarizing decision and, on
    a hit, one integer for the Pauli string (only if the depolarizing
    probability is non-zero); then one uniform per touched qubit for
    amplitude damping (only if ``gamma_ad`` is non-zero).
    """

    def __init__(self, n_qubits: int, gate: Gate, model: NoiseModel):
        self.p = model.p1_depol if gate.n_targets == 1 else model.p2_depol
        self.n_strings = 4**gate.n_targets
        self.paulis = _pauli_strings(n_qubits, gate.targets) if self.p > 0 else ()
        self.gamma = model.gamma_ad
        self.keep = np.sqrt(1.0 - self.gamma)
        self.damp = (
            [_damping_indices(n_qubits, q) for q in gate.targets] if self.gamma > 0 else []
        )

    def __call__(self, amps: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        if self.p > 0 and rng.random() < self.p:
            amps = self.paulis[int(rng.integers(1, self.n_strings)) - 1] @ amps
        for ones, zeros in self.damp:
            excited = amps[ones]
            p_excited = float(np.vdot(excited, excited).real)
            if rng.random() < self.gamma * p_excited:
                # jump: sigma_minus maps |..1..> onto |..0..>
                out = np.zeros_like(amps)
                out[zeros] = excited / np.sqrt(p_excited)
            else:
                out = amps.copy()
                out[ones] *= self.keep
                out /= np.sqrt(1.0 - self.gamma * p_excited)
            amps = out
        return amps


def apply_noise_trajectory(
    state: QuantumState, gate: Gate, model: NoiseModel, rng: np.random.Generator
) -> QuantumState:
    """Sample one trajectory of the post-gate noise for ``gate``.

    The gate itself is not applied; call this right after applying it.
    """
    if not model.has_gate_noise:
        return state
    for t in gate.targets:
        if t >= state.n_qubits:
            raise IndexError(f"qubit {t} out of range for {state.n_qubits}-qubit state")
    amps = GateNoise(state.n_qubits, gate, model)(state.amplitudes, rng)
    return QuantumState(state.n_qubits, amps / np.linalg.norm(amps))

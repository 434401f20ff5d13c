"""Gate definitions for the statevector simulator.

Qubit 0 is the most significant bit of a basis-state index, so ``|10>`` on
two qubits means qubit 0 in ``|1>`` and qubit 1 in ``|0>``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

UNITARITY_TOL = 1e-12

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)

PAULIS = {"I": I2, "X": X, "Y": Y, "Z": Z}

GATE_KINDS = ("H", "X", "U2", "CNOT", "U1Q", "U2Q")


def u2_matrix(phi: float, lam: float) -> np.ndarray:
    """Single-qubit ``u2`` rotation.

    ``u2(phi, lam) = [[1, -e^{i lam}], [e^{i phi}, e^{i (phi + lam)}]] / sqrt(2)``,
    so ``u2(0, pi)`` is the Hadamard gate.
    """
    return np.array(
        [
            [1.0, -np.exp(1j * lam)],
            [np.exp(1j * phi), np.exp(1j * (phi + lam))],
        ],
        dtype=complex,
    ) / np.sqrt(2)


def unitarity_error(matrix: np.ndarray) -> float:
    """Max-norm of ``U^dagger U - I``."""
    m = np.asarray(matrix, dtype=complex)
    return float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))))


def is_unitary(matrix: np.ndarray, tol: float = UNITARITY_TOL) -> bool:
    m = np.asarray(matrix)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return unitarity_error(m) < tol


@dataclass(frozen=True)
class Gate:
    """A gate acting on one or two qubits.

    Attributes:
        kind: One of ``GATE_KINDS``. ``U1Q``/``U2Q`` carry an explicit matrix.
        targets: Qubit indices. For ``CNOT`` the order is (control, target).
        params: Angles in radians, used by ``U2`` as ``(phi, lam)``.
        label: Optional display label, e.g. for merged basis changes.
    """

    kind: str
    targets: tuple[int, ...]
    params: tuple[float, ...] = ()
    custom: np.ndarray | None = field(default=None, compare=False, repr=False)
    label: str = ""

    def __post_init__(self) -> None:
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        targets = tuple(int(t) for t in self.targets)
        object.__setattr__(self, "targets", targets)
        arity = 2 if self.kind in ("CNOT", "U2Q") else 1
        if len(targets) != arity:
            raise ValueError(f"{self.kind} expects {arity} target(s), got {targets}")
        if len(set(targets)) != len(targets):
            raise ValueError(f"gate targets must be distinct, got {targets}")
        if any(t < 0 for t in targets):
            raise ValueError(f"negative qubit index in {targets}")
        if self.kind == "U2" and len(self.params) != 2:
            raise ValueError("U2 needs params (phi, lam)")
        if self.kind in ("U1Q", "U2Q"):
            if self.custom is None:
                raise ValueError(f"{self.kind} needs an explicit matrix")
            m = np.array(self.custom, dtype=complex)
            if m.shape != (2**arity, 2**arity):
                raise ValueError(f"{self.kind} matrix must be {2**arity}x{2**arity}")
            if not is_unitary(m):
                raise ValueError(
                    f"custom matrix is not unitary (error {unitarity_error(m):.3e})"
                )
            m.setflags(write=False)
            object.__setattr__(self, "custom", m)

    @property
    def n_targets(self) -> int:
        return len(self.targets)

    @property
    def matrix(self) -> np.ndarray:
        if self.kind == "H":
            return H
        if self.kind == "X":
            return X
        if self.kind == "U2":
            return u2_matrix(*self.params)
        if self.kind == "CNOT":
            return CNOT
        return self.custom

    def __str__(self) -> str:
        name = self.label or self.kind
        if self.kind == "U2" and not self.label:
            name = "U2({:.4g},{:.4g})".format(*self.params)
        return f"{name}{list(self.targets)}"


def h(q: int) -> Gate:
    return Gate("H", (q,))


def x(q: int) -> Gate:
    return Gate("X", (q,))


def u2(phi: float, lam: float, q: int) -> Gate:
    return Gate("U2", (q,), (float(phi), float(lam)))


def cnot(control: int, target: int) -> Gate:
    return Gate("CNOT", (control, target))


def unitary(matrix: np.ndarray, *targets: int, label: str = "") -> Gate:
    kind = "U1Q" if len(targets) == 1 else "U2Q"
    return Gate(kind, tuple(targets), custom=np.asarray(matrix), label=label)

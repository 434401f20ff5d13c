from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass, field

from .gates import Gate
from .state import QuantumState, apply_gate


@dataclass
class Circuit:
    """Ordered gate list plus the qubits read out at the end.

    ``measured_qubits[i]`` is written to classical bit ``i``; outcome
    bitstrings list the bits in that order.
    """

    n_qubits: int
    gates: list[Gate] = field(default_factory=list)
    measured_qubits: tuple[int, ...] = ()
    name: str = ""

    def __post_init__(self) -> None:
        if self.n_qubits < 1:
            raise ValueError("a circuit needs at least one qubit")
        gates, self.gates = list(self.gates), []
        self.extend(gates)
        self.measure(*self.measured_qubits)

    def append(self, gate: Gate) -> Circuit:
        for t in gate.targets:
            if t >= self.n_qubits:
                raise IndexError(f"{gate} targets qubit {t} of a {self.n_qubits}-qubit circuit")
        self.gates.append(gate)
        return self

    def extend(self, gates: Iterable[Gate]) -> Circuit:
        for g in gates:
            self.append(g)
        return self

    def measure(self, *qubits: int) -> Circuit:
        for q in qubits:
            if not 0 <= q < self.n_qubits:
                raise IndexError(f"cannot measure qubit {q} of a {self.n_qubits}-qubit circuit")
        if len(set(qubits)) != len(qubits):
            raise ValueError("measured qubits must be distinct")
        self.measured_qubits = tuple(qubits)
        return self

    def __len__(self) -> int:
        return len(self.gates)

    def count(self, kind: str) -> int:
        return sum(1 for g in self.gates if g.kind == kind)

    @property
    def two_qubit_gate_count(self) -> int:
        return sum(1 for g in self.gates if g.n_targets == 2)

    def evolve(self, state: QuantumState) -> QuantumState:
        """Noiseless evolution of ``state`` through every gate."""
        if state.n_qubits != self.n_qubits:
            raise ValueError(
                f"state has {state.n_qubits} qubits, circuit has {self.n_qubits}"
            )
        for g in self.gates:
            state = apply_gate(state, g)
        return state

    def describe(self) -> list[str]:
        return [str(g) for g in self.gates] + [f"Mz{list(self.measured_qubits)}"]


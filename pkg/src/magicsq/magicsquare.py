"""The Mermin-Peres square of two-qubit Pauli observables and its circuits.

Qubits 0 and 1 carry the two-qubit system, qubit 2 is the ancilla that
accumulates the parity of the measured observables through CNOTs and is
read out in the z basis (bit 0 means product +1).
"""

from __future__ import annotations

import itertools
from collections.abc import Sequence
from dataclasses import dataclass, field, replace
from typing import Literal

import numpy as np

from .qsim import Circuit, Counts, QuantumState, cnot, h, u2, unitary
from .qsim.gates import H, PAULIS, u2_matrix
from .qsim.sampling import iter_blocks

ANCILLA = 2
PI = np.pi

LineKind = Literal["row", "column"]


@dataclass(frozen=True)
class PauliObservable:
    """``sign * left (x) right`` with ``left``/``right`` in ``{I, X, Y, Z}``."""

    left: str
    right: str
    sign: int = 1

    def __post_init__(self) -> None:
        for p in (self.left, self.right):
            if p not in PAULIS:
                raise ValueError(f"unknown Pauli {p!r}")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")

    @classmethod
    def parse(cls, text: str) -> PauliObservable:
        """Parse ``"XY"``, ``"-ZZ"`` or ``"+IX"``."""
        t = text.strip().upper()
        sign = -1 if t.startswith("-") else 1
        t = t.lstrip("+-")
        if len(t) != 2:
            raise ValueError(f"cannot parse Pauli observable {text!r}")
        return cls(t[0], t[1], sign)

    @property
    def matrix(self) -> np.ndarray:
        return self.sign * np.kron(PAULIS[self.left], PAULIS[self.right])

    @property
    def factors(self) -> tuple[str, str]:
        return self.left, self.right

    def negated(self) -> PauliObservable:
        return replace(self, sign=-self.sign)

    def __str__(self) -> str:
        def name(p: str) -> str:
            return "1" if p == "I" else f"s{p.lower()}"

        prefix = "-" if self.sign < 0 else ""
        return f"{prefix}{name(self.left)}(x){name(self.right)}"


@dataclass(frozen=True)
class LineId:
    kind: LineKind
    index: int

    def __post_init__(self) -> None:
        if self.kind not in ("row", "column"):
            raise ValueError(f"line kind must be 'row' or 'column', got {self.kind!r}")
        if self.index not in (1, 2, 3):
            raise ValueError(f"line index must be 1..3, got {self.index}")

    @classmethod
    def parse(cls, label: str) -> LineId:
        """Accept ``row1``..``row3`` and ``col1``/``column1``..."""
        t = label.strip().lower()
        for prefix, kind in (("column", "column"), ("col", "column"), ("row", "row")):
            if t.startswith(prefix) and t[len(prefix):].isdigit():
                return cls(kind, int(t[len(prefix):]))
        raise ValueError(f"unknown line label {label!r}")

    @property
    def label(self) -> str:
        return f"row{self.index}" if self.kind == "row" else f"col{self.index}"

    @property
    def position(self) -> int:
        """Slot 0..5 in a result vector: rows first, then columns."""
        return self.index - 1 + (0 if self.kind == "row" else 3)

    def cells(self) -> tuple[tuple[int, int], ...]:
        if self.kind == "row":
            return tuple((self.index, c) for c in (1, 2, 3))
        return tuple((r, self.index) for r in (1, 2, 3))

    def __str__(self) -> str:
        return self.label


LINES: tuple[LineId, ...] = tuple(LineId("row", i) for i in (1, 2, 3)) + tuple(
    LineId("column", i) for i in (1, 2, 3)
)
LINE_LABELS = tuple(line.label for line in LINES)
CELL_LABELS = tuple(f"r{r}c{c}" for r in (1, 2, 3) for c in (1, 2, 3))


def parse_cell(label: str) -> tuple[int, int]:
    t = label.strip().lower()
    if len(t) == 4 and t[0] == "r" and t[2] == "c" and t[1] in "123" and t[3] in "123":
        return int(t[1]), int(t[3])
    raise ValueError(f"unknown cell label {label!r}")


_TABLE = (
    ("XI", "IX", "XX"),
    ("IY", "YI", "YY"),
    ("XY", "YX", "ZZ"),
)


@dataclass(frozen=True)
class MagicSquare:
    """3x3 grid of observables with the declared product of each line.

    ``line_products`` follows the result-vector order (rows, then columns).
    """

    cells: tuple[tuple[PauliObservable, ...], ...] = field(
        default_factory=lambda: tuple(tuple(PauliObservable.parse(p) for p in row) for row in _TABLE)
    )
    line_products: tuple[int, ...] = (1, 1, 1, 1, 1, -1)

    def observable(self, row: int, col: int) -> PauliObservable:
        if row not in (1, 2, 3) or col not in (1, 2, 3):
            raise IndexError(f"cell ({row}, {col}) outside the 3x3 square")
        return self.cells[row - 1][col - 1]

    def line(self, line: LineId) -> tuple[PauliObservable, ...]:
        return tuple(self.observable(r, c) for r, c in line.cells())

    def declared_sign(self, line: LineId) -> int:
        return self.line_products[line.position]

    def line_product_matrix(self, line: LineId) -> np.ndarray:
        a, b, c = (o.matrix for o in self.line(line))
        return a @ b @ c

    def computed_sign(self, line: LineId, tol: float = 1e-12) -> int:
        """Sign s with ``A B C = s * I``; raises if the product is not +-I."""
        prod = self.line_product_matrix(line)
        eye = np.eye(4)
        for s in (1, -1):
            if np.max(np.abs(prod - s * eye)) < tol:
                return s
        raise ArithmeticError(f"{line}: product of observables is not +-identity")

    def with_sign_flip(self, row: int, col: int) -> MagicSquare:
        """Copy with one cell negated; used to check that audits catch it."""
        cells = [list(r) for r in self.cells]
        cells[row - 1][col - 1] = cells[row - 1][col - 1].negated()
        return replace(self, cells=tuple(tuple(r) for r in cells))


SQUARE = MagicSquare()


def observable_at(row: int, col: int) -> PauliObservable:
    return SQUARE.observable(row, col)


def line_product_sign(line: LineId | str) -> int:
    if isinstance(line, str):
        line = LineId.parse(line)
    return SQUARE.declared_sign(line)


def commutator_norm(a: PauliObservable, b: PauliObservable) -> float:
    ma, mb = a.matrix, b.matrix
    return float(np.max(np.abs(ma @ mb - mb @ ma)))


# -- circuits ---------------------------------------------------------------

_Y_BASIS = (0.0, PI / 2)  # u2(0, pi/2)^dagger Z u2(0, pi/2) = Y


def _fig1_gates(line: LineId) -> list:
    a = ANCILLA
    parity = [cnot(0, a), cnot(1, a), cnot(0, a), cnot(1, a)]
    if line == LineId("row", 1):
        return [h(0), h(1), *parity]
    if line == LineId("row", 2):
        return [u2(*_Y_BASIS, 0), u2(*_Y_BASIS, 1), *parity]
    if line == LineId("column", 1):
        return [h(0), u2(*_Y_BASIS, 1), *parity]
    if line == LineId("column", 2):
        return [u2(*_Y_BASIS, 0), h(1), *parity]
    if line == LineId("row", 3):
        return [
            cnot(0, a),
            cnot(1, a),
            h(0),
            u2(*_Y_BASIS, 1),
            cnot(0, a),
            cnot(1, a),
            u2(PI / 2, 3 * PI / 2, 0),
            u2(3 * PI / 2, PI / 2, 1),
            cnot(0, a),
            cnot(1, a),
        ]
    # column 3
    return [
        cnot(0, a),
        h(0),
        cnot(1, a),
        h(1),
        cnot(0, a),
        cnot(1, a),
        u2(PI / 2, 3 * PI / 2, 0),
        u2(PI / 2, 3 * PI / 2, 1),
        cnot(0, a),
        cnot(1, a),
    ]


def build_line_circuit(line: LineId | str) -> Circuit:
    """Ancilla-parity circuit for one line, transcribed gate for gate.

    The ancilla reads 0 when the product of the line's three outcomes is +1.
    No gates are merged or cancelled: noise depends on gate count.
    """
    if isinstance(line, str):
        line = LineId.parse(line)
    return Circuit(3, _fig1_gates(line), (ANCILLA,), name=line.label)


def _to_z(basis: str) -> np.ndarray:
    """Unitary R with ``R^dagger Z R`` equal to the Pauli ``basis``."""
    if basis == "X":
        return H
    if basis == "Y":
        return u2_matrix(*_Y_BASIS)
    return np.eye(2, dtype=complex)


def _basis_change(q: int, current: str, target: str) -> list:
    if current == target:
        return []
    if current == "Z" and target == "X":
        return [h(q)]
    if current == "Z" and target == "Y":
        return [u2(*_Y_BASIS, q)]
    merged = _to_z(target) @ _to_z(current).conj().T
    return [unitary(merged, q, label=f"{current}->{target}")]


def _parity_gates(
    observables: Sequence[PauliObservable], frame: list[str]
) -> list:
    gates = []
    for obs in observables:
        for q, p in enumerate(obs.factors):
            if p == "I":
                continue
            gates += _basis_change(q, frame[q], p)
            frame[q] = p
        for q, p in enumerate(obs.factors):
            if p != "I":
                gates.append(cnot(q, ANCILLA))
    return gates


def build_ordered_line_circuit(
    line: LineId | str, order: Sequence[int] = (1, 2, 3), square: MagicSquare = SQUARE
) -> Circuit:
    """Generic ancilla-parity circuit measuring a line in a chosen order.

    ``order`` lists positions 1..3 along the line. Each observable is mapped
    onto the ancilla by rotating its non-identity factors into the z basis
    (merging consecutive basis changes into one gate) and adding one CNOT
    per factor. Different orders need different numbers of gates.
    """
    if isinstance(line, str):
        line = LineId.parse(line)
    if sorted(order) != [1, 2, 3]:
        raise ValueError(f"order must be a permutation of (1, 2, 3), got {order}")
    obs = square.line(line)
    sequence = [obs[i - 1] for i in order]
    if any(o.sign < 0 for o in sequence):
        raise ValueError("parity circuits need positively signed observables")
    gates = _parity_gates(sequence, ["Z", "Z"])
    return Circuit(3, gates, (ANCILLA,), name=f"{line.label}-order{''.join(map(str, order))}")


def build_observable_circuit(row: int, col: int, square: MagicSquare = SQUARE) -> Circuit:
    """Circuit measuring a single cell of the square through the ancilla."""
    obs = square.observable(row, col)
    if obs.sign < 0:
        raise ValueError("parity circuits need positively signed observables")
    return Circuit(3, _parity_gates([obs], ["Z", "Z"]), (ANCILLA,), name=f"r{row}c{col}")


def with_ancilla(system: QuantumState) -> QuantumState:
    """Embed a two-qubit system state with the ancilla in ``|0>``."""
    if system.n_qubits != 2:
        raise ValueError("the square acts on two-qubit states")
    return system.tensor(QuantumState.zeros(1))


def ancilla_expectation(line: LineId | str, system: QuantumState) -> float:
    """Exact ``<Z_ancilla>`` after the noiseless line circuit."""
    final = build_line_circuit(line).evolve(with_ancilla(system))
    probs = final.probabilities().reshape(2, 2, 2)
    return float(probs[:, :, 0].sum() - probs[:, :, 1].sum())


# -- sequential QND measurement ---------------------------------------------


def _projector(obs_matrix: np.ndarray, outcome: int) -> np.ndarray:
    return (np.eye(obs_matrix.shape[0]) + outcome * obs_matrix) / 2


def _qnd(amps: np.ndarray, projector_plus: np.ndarray, u: float) -> tuple[int, np.ndarray]:
    projected = projector_plus @ amps
    p_plus = float(np.vdot(projected, projected).real)
    if u < p_plus:
        return 1, projected / np.sqrt(p_plus)
    projected = amps - projected
    return -1, projected / np.linalg.norm(projected)


def qnd_measure(
    state: QuantumState, obs: PauliObservable, rng: np.random.Generator
) -> tuple[int, QuantumState]:
    """Ideal QND measurement of a +-1 valued two-qubit observable.

    The state is projected onto the outcome eigenspace with ``(I +- A)/2``
    and renormalized. One uniform draw is consumed.
    """
    if state.n_qubits != 2:
        raise ValueError("qnd_measure acts on two-qubit states")
    outcome, amps = _qnd(state.amplitudes, _projector(obs.matrix, 1), rng.random())
    return outcome, QuantumState(2, amps)


@dataclass(frozen=True)
class SequentialRun:
    line: LineId
    order: tuple[int, int, int]
    observable_counts: tuple[Counts, Counts, Counts]
    product: Counts

    def as_dict(self) -> dict[str, Counts]:
        """Counts keyed by cell label, plus the line label for the product."""
        out = {
            f"r{r}c{c}": counts
            for (r, c), counts in zip(self.line.cells(), self.observable_counts)
        }
        out[self.line.label] = self.product
        return out


def sequential_line_run(
    system: QuantumState,
    line: LineId | str,
    order: Sequence[int] = (1, 2, 3),
    shots: int = 1024,
    seed: int = 0,
    readout_flip: float = 0.0,
    stream: Sequence[int] = (),
    square: MagicSquare = SQUARE,
) -> SequentialRun:
    """Measure a line's three observables one after another on every shot.

    Each observable is read out separately, so ``readout_flip`` corrupts
    each of the three reported bits independently before the product is
    formed. ``observable_counts`` is in line order (not measurement order).
    """
    if isinstance(line, str):
        line = LineId.parse(line)
    order = tuple(order)
    if sorted(order) != [1, 2, 3]:
        raise ValueError(f"order must be a permutation of (1, 2, 3), got {order}")
    if shots < 1:
        raise ValueError("shots must be at least 1")
    if not 0.0 <= readout_flip <= 1.0:
        raise ValueError("readout_flip must lie in [0, 1]")
    obs = square.line(line)
    projectors = [_projector(o.matrix, 1) for o in obs]

    tallies = [np.zeros(2, dtype=np.int64) for _ in range(3)]
    product = np.zeros(2, dtype=np.int64)
    for size, rng in iter_blocks(shots, seed, stream):
        for _ in range(size):
            amps = system.amplitudes
            bits = [0, 0, 0]
            for pos in order:
                outcome, amps = _qnd(amps, projectors[pos - 1], rng.random())
                bits[pos - 1] = 0 if outcome == 1 else 1
            if readout_flip > 0:
                for pos in order:
                    if rng.random() < readout_flip:
                        bits[pos - 1] ^= 1
            for i, b in enumerate(bits):
                tallies[i][b] += 1
            product[sum(bits) % 2] += 1

    def to_counts(t: np.ndarray) -> Counts:
        return Counts({"0": int(t[0]), "1": int(t[1])}, shots)

    return SequentialRun(
        line, order, tuple(to_counts(t) for t in tallies), to_counts(product)
    )


def single_observable_run(
    system: QuantumState,
    row: int,
    col: int,
    shots: int = 1024,
    seed: int = 0,
    stream: Sequence[int] = (),
    square: MagicSquare = SQUARE,
) -> Counts:
    """QND measurement of one cell, repeated ``shots`` times."""
    m = _projector(square.observable(row, col).matrix, 1)
    tally = np.zeros(2, dtype=np.int64)
    for size, rng in iter_blocks(shots, seed, stream):
        for u in rng.random(size):
            outcome, _ = _qnd(system.amplitudes, m, u)
            tally[0 if outcome == 1 else 1] += 1
    return Counts({"0": int(tally[0]), "1": int(tally[1])}, shots)


def all_orders() -> list[tuple[int, int, int]]:
    return list(itertools.permutations((1, 2, 3)))

"""Shot sampling and the seeded stream contract.

Randomness is counter based: shot ``s`` of a run keyed by ``(seed, stream)``
draws from ``default_rng(SeedSequence(seed, spawn_key=stream + (s // BLOCK,)))``,
after the draws of the earlier shots of the same block. A block of shots is
therefore a self-contained unit of work, and Counts do not depend on the
order in which blocks are executed.

Per shot the draw order is: gate-noise draws (in gate order), one uniform
per measured qubit, then one uniform per measured qubit whose readout flip
probability is non-zero.
"""

from __future__ import annotations

from collections import Counter
from collections.abc import Iterator, Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

from .circuit import Circuit
from .noise import NOISELESS, GateNoise, NoiseModel, _full_operator
from .state import QuantumState, _collapse, prob_zero

BLOCK = 1024


@dataclass(frozen=True)
class Counts:
    """Histogram of classical outcome bitstrings."""

    counts: Mapping[str, int]
    shots: int = field(default=-1)

    def __post_init__(self) -> None:
        clean = {}
        for key, value in self.counts.items():
            if not key or set(key) - {"0", "1"}:
                raise ValueError(f"invalid outcome bitstring {key!r}")
            if int(value) < 0:
                raise ValueError(f"negative count for {key!r}")
            if int(value) > 0:
                clean[str(key)] = int(value)
        widths = {len(k) for k in clean}
        if len(widths) > 1:
            raise ValueError("outcome bitstrings have mixed widths")
        total = sum(clean.values())
        shots = total if self.shots == -1 else int(self.shots)
        if total != shots:
            raise ValueError(f"counts sum to {total}, expected {shots} shots")
        object.__setattr__(self, "counts", dict(sorted(clean.items())))
        object.__setattr__(self, "shots", shots)

    def __getitem__(self, key: str) -> int:
        return self.counts.get(key, 0)

    def plus_minus(self) -> tuple[int, int]:
        """Number of +1 and -1 outcomes.

        The value of a bitstring is the product of ``(-1)**bit`` over its
        bits, so a single ancilla bit ``"0"`` counts as +1.
        """
        plus = sum(n for k, n in self.counts.items() if k.count("1") % 2 == 0)
        return plus, self.shots - plus

    def mean(self) -> float:
        plus, minus = self.plus_minus()
        return (plus - minus) / self.shots


def stream_generator(seed: int, stream: Sequence[int], block: int) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence(int(seed), spawn_key=tuple(int(s) for s in stream) + (int(block),))
    )


def iter_blocks(shots: int, seed: int, stream: Sequence[int] = ()) -> Iterator[tuple[int, np.random.Generator]]:
    """Yield ``(n_shots_in_block, generator)`` for every block of a run."""
    for b, start in enumerate(range(0, shots, BLOCK)):
        yield min(BLOCK, shots - start), stream_generator(seed, stream, b)


def _measure_and_read(
    amps: np.ndarray, circuit: Circuit, model: NoiseModel, rng: np.random.Generator
) -> str:
    n = circuit.n_qubits
    bits = []
    for q in circuit.measured_qubits:
        bit = 0 if rng.random() < prob_zero(amps, n, q) else 1
        amps = _collapse(amps, n, q, bit)
        bits.append(bit)
    for i, q in enumerate(circuit.measured_qubits):
        f = model.flip_probability(q)
        if f > 0 and rng.random() < f:
            bits[i] ^= 1
    return "".join(map(str, bits))


def _sample_final_state(
    amps: np.ndarray, circuit: Circuit, model: NoiseModel, n: int, rng: np.random.Generator
) -> list[str]:
    """Vectorized equivalent of ``n`` calls to ``_measure_and_read``."""
    measured = list(circuit.measured_qubits)
    k = len(measured)
    flips = [model.flip_probability(q) for q in measured]
    flipping = [i for i, f in enumerate(flips) if f > 0]
    u = rng.random((n, k + len(flipping)))

    probs = (np.abs(amps) ** 2).reshape((2,) * circuit.n_qubits)
    rest = [q for q in range(circuit.n_qubits) if q not in measured]
    table = probs.transpose(measured + rest).reshape(2**k, -1).sum(axis=1)

    prefix = np.zeros(n, dtype=np.int64)
    bits = np.zeros((n, k), dtype=np.int64)
    for j in range(k):
        marg = table.reshape(2 ** (j + 1), -1).sum(axis=1)
        p_zero = marg[2 * prefix]
        p_total = p_zero + marg[2 * prefix + 1]
        with np.errstate(invalid="ignore", divide="ignore"):
            cond = np.where(p_total > 0, p_zero / p_total, 1.0)
        bits[:, j] = (u[:, j] >= cond).astype(np.int64)
        prefix = 2 * prefix + bits[:, j]
    for col, i in enumerate(flipping):
        bits[:, i] ^= (u[:, k + col] < flips[i]).astype(np.int64)
    return ["".join(map(str, row)) for row in bits]


def run_shots(
    circuit: Circuit,
    input_state: QuantumState,
    model: NoiseModel | None = None,
    shots: int = 1024,
    seed: int = 0,
    stream: Sequence[int] = (),
    *,
    trajectories: bool | None = None,
) -> Counts:
    """Run ``circuit`` ``shots`` times and histogram the readouts.

    Args:
        circuit: Circuit with at least one measured qubit.
        input_state: Initial state, copied fresh for every shot.
        model: Noise model; ``None`` means noiseless.
        shots: Number of repetitions, at least 1.
        seed: Master seed.
        stream: Extra spawn-key entries that separate independent runs
            sharing one master seed.
        trajectories: Force (``True``) or forbid (``False``) the per-shot
            trajectory engine. By default it is used only when the model has
            gate noise; otherwise the final state is computed once.

    Returns:
        Counts keyed by the measured bits, in ``circuit.measured_qubits`` order.
    """
    if shots < 1:
        raise ValueError("shots must be at least 1")
    if not circuit.measured_qubits:
        raise ValueError("circuit measures no qubits")
    if input_state.n_qubits != circuit.n_qubits:
        raise ValueError(
            f"input has {input_state.n_qubits} qubits, circuit has {circuit.n_qubits}"
        )
    model = NOISELESS if model is None else model
    if trajectories is None:
        trajectories = model.has_gate_noise
    elif not trajectories and model.has_gate_noise:
        raise ValueError("gate noise requires the trajectory engine")

    n = circuit.n_qubits
    tally: Counter[str] = Counter()
    if not trajectories:
        final = circuit.evolve(input_state).amplitudes
        for size, rng in iter_blocks(shots, seed, stream):
            tally.update(_sample_final_state(final, circuit, model, size, rng))
        return Counts(tally, shots)

    ops = [(_full_operator(n, g.matrix, g.targets), GateNoise(n, g, model)) for g in circuit.gates]
    for size, rng in iter_blocks(shots, seed, stream):
        for _ in range(size):
            amps = input_state.amplitudes
            for unitary, noise in ops:
                amps = noise(unitary @ amps, rng)
            tally[_measure_and_read(amps / np.linalg.norm(amps), circuit, model, rng)] += 1
    return Counts(tally, shots)

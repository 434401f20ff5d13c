"""Self-audit battery run by ``magicsq verify``."""

from __future__ import annotations

import itertools
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from .contextuality import QUANTUM_PREDICTION, enumerate_sign_squares, hull_distance, vector_sets
from .magicsquare import (
    LINES,
    SQUARE,
    MagicSquare,
    ancilla_expectation,
    commutator_norm,
    qnd_measure,
)
from .qsim import QuantumState
from .qsim.gates import CNOT, H, X, unitarity_error, u2_matrix


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail}"


def _random_state(rng: np.random.Generator, product: bool = False) -> QuantumState:
    def vec(n: int) -> np.ndarray:
        return rng.normal(size=n) + 1j * rng.normal(size=n)

    if product:
        return QuantumState.from_amplitudes(np.kron(vec(2), vec(2)))
    return QuantumState.from_amplitudes(vec(4))


def check_unitarity(tol: float) -> CheckResult:
    angles = [0.0, np.pi / 2, np.pi, 3 * np.pi / 2]
    mats = [H, X, CNOT] + [u2_matrix(a, b) for a, b in itertools.product(angles, repeat=2)]
    worst = max(unitarity_error(m) for m in mats)
    return CheckResult("gate unitarity", worst < tol, f"max |U^dag U - I| = {worst:.2e} (tol {tol:g})")


def check_line_products(square: MagicSquare) -> CheckResult:
    bad = []
    for line in LINES:
        try:
            sign = square.computed_sign(line)
        except ArithmeticError:
            bad.append(f"{line} not +-I")
            continue
        if sign != square.declared_sign(line):
            bad.append(f"{line} product {sign:+d} != declared {square.declared_sign(line):+d}")
    return CheckResult("line products", not bad, "; ".join(bad) or "all six equal their declared sign * I")


def check_commutation(square: MagicSquare) -> CheckResult:
    worst = max(
        commutator_norm(a, b)
        for line in LINES
        for a, b in itertools.combinations(square.line(line), 2)
    )
    # s_x (x) 1 and s_y (x) 1 share no line and anticommute
    cross = commutator_norm(square.observable(1, 1), square.observable(2, 2))
    ok = worst < 1e-12 and cross > 1.0
    return CheckResult(
        "in-line commutation",
        ok,
        f"max in-line |[A,B]| = {worst:.1e}; cross-line pair |[A,B]| = {cross:.1f}",
    )


def check_circuits(rng: np.random.Generator, n_states: int = 200) -> CheckResult:
    worst = 0.0
    for line in LINES:
        sign = SQUARE.declared_sign(line)
        for i in range(n_states):
            state = _random_state(rng, product=i % 2 == 0)
            worst = max(worst, abs(ancilla_expectation(line, state) - sign))
    return CheckResult(
        "circuit/operator equivalence",
        worst < 1e-9,
        f"{n_states} product and entangled states per line, max |<Z_anc> - sign| = {worst:.1e}",
    )


def check_qnd(rng: np.random.Generator, n: int = 2000) -> CheckResult:
    cells = [SQUARE.observable(r, c) for r in (1, 2, 3) for c in (1, 2, 3)]
    mismatches = 0
    for i in range(n):
        obs = cells[i % 9]
        first, post = qnd_measure(_random_state(rng), obs, rng)
        second, _ = qnd_measure(post, obs, rng)
        mismatches += first != second
    return CheckResult("QND repeatability", mismatches == 0, f"{mismatches} mismatches in {n} repeats")


def check_enumeration() -> CheckResult:
    sets = vector_sets()
    image = {rv for _, rv in enumerate_sign_squares()}
    realism = set(sets.realism_tuples())
    quantum = set(sets.quantum_tuples())
    ok = image == realism and len(realism) == 32 and len(quantum) == 32 and not realism & quantum
    return CheckResult(
        "realism enumeration",
        ok,
        f"{len(image)} distinct images of 512 squares, {len(realism)} rule vectors, "
        f"{len(realism & quantum)} shared with quantum set",
    )


def check_bound() -> CheckResult:
    sets = vector_sets()
    rq = int((sets.realism @ sets.quantum.T).max())
    qq = {int(v) for v in np.einsum("ij,ij->i", sets.quantum, sets.quantum)}
    return CheckResult("scalar-product bound", rq == 4 and qq == {6}, f"max r.q = {rq}, q.q in {sorted(qq)}")


def check_hull(rng: np.random.Generator, n: int = 200) -> CheckResult:
    realism = vector_sets().realism
    worst = 0.0
    for _ in range(n):
        w = rng.dirichlet(np.full(32, rng.uniform(0.1, 2.0)))
        worst = max(worst, hull_distance(w @ realism).distance)
    ideal = hull_distance(QUANTUM_PREDICTION).distance
    ok = worst < 1e-8 and abs(ideal - 2 / np.sqrt(6)) < 1e-9
    return CheckResult(
        "hull closure",
        ok,
        f"max distance of {n} mixtures = {worst:.1e}; ideal point distance = {ideal:.6f}",
    )


def run_checks(
    square: MagicSquare = SQUARE, unitarity_tol: float = 1e-12, seed: int = 0
) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    checks: list[Callable[[], CheckResult]] = [
        lambda: check_unitarity(unitarity_tol),
        lambda: check_line_products(square),
        lambda: check_commutation(square),
        lambda: check_circuits(rng),
        lambda: check_qnd(rng),
        check_enumeration,
        check_bound,
        lambda: check_hull(rng),
    ]
    return [c() for c in checks]

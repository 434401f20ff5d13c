import itertools
import math

import numpy as np
import pytest

from conftest import random_state
from magicsq.magicsquare import (
    LINES,
    SQUARE,
    LineId,
    PauliObservable,
    ancilla_expectation,
    all_orders,
    build_line_circuit,
    build_observable_circuit,
    build_ordered_line_circuit,
    commutator_norm,
    line_product_sign,
    observable_at,
    qnd_measure,
    sequential_line_run,
    single_observable_run,
    with_ancilla,
)
from magicsq.qsim import QuantumState, run_shots
from magicsq.qsim.gates import X, Y, Z

I2 = np.eye(2)


def test_observable_at_table_entries():
    assert observable_at(1, 1) == PauliObservable("X", "I")
    assert observable_at(3, 3) == PauliObservable("Z", "Z")
    assert observable_at(3, 1) == PauliObservable("X", "Y")
    assert str(observable_at(2, 1)) == "1(x)sy"
    with pytest.raises(IndexError):
        observable_at(4, 1)


@pytest.mark.parametrize("row", [1, 2, 3])
@pytest.mark.parametrize("col", [1, 2, 3])
def test_cells_hermitian_unitary_pm1(row, col):
    m = observable_at(row, col).matrix
    np.testing.assert_allclose(m, m.conj().T, atol=1e-15)
    np.testing.assert_allclose(m @ m, np.eye(4), atol=1e-15)
    assert sorted(np.round(np.linalg.eigvalsh(m)).astype(int)) == [-1, -1, 1, 1]


def test_line_product_signs():
    assert line_product_sign("row2") == 1
    assert line_product_sign(LineId("column", 3)) == -1
    assert [line_product_sign(line) for line in LINES] == [1, 1, 1, 1, 1, -1]


def test_row3_product_by_hand():
    prod = np.kron(X, Y) @ np.kron(Y, X) @ np.kron(Z, Z)
    np.testing.assert_allclose(prod, np.eye(4), atol=1e-12)


@pytest.mark.parametrize("line", LINES, ids=str)
def test_line_operator_identities(line):
    assert SQUARE.computed_sign(line) == SQUARE.declared_sign(line)
    for a, b in itertools.combinations(SQUARE.line(line), 2):
        assert commutator_norm(a, b) < 1e-12


def test_some_cross_line_pair_anticommutes():
    assert commutator_norm(observable_at(1, 1), observable_at(2, 2)) > 1


def test_sign_flip_breaks_products():
    flipped = SQUARE.with_sign_flip(2, 2)
    assert flipped.computed_sign(LineId("row", 2)) == -1
    assert flipped.computed_sign(LineId("column", 2)) == -1


def test_line_labels_parse():
    assert LineId.parse("col3") == LineId("column", 3)
    assert LineId.parse("Column2") == LineId("column", 2)
    assert LineId.parse("row1").position == 0
    assert LineId.parse("col1").position == 3
    with pytest.raises(ValueError):
        LineId.parse("diag1")


# -- circuits -----------------------------------------------------------------


def test_row1_circuit_gate_list():
    c = build_line_circuit("row1")
    assert c.describe() == ["H[0]", "H[1]", "CNOT[0, 2]", "CNOT[1, 2]", "CNOT[0, 2]", "CNOT[1, 2]", "Mz[2]"]


def test_col3_circuit_gate_list():
    c = build_line_circuit("col3")
    kinds = [(g.kind, g.targets, g.params) for g in c.gates]
    p = math.pi
    assert kinds == [
        ("CNOT", (0, 2), ()),
        ("H", (0,), ()),
        ("CNOT", (1, 2), ()),
        ("H", (1,), ()),
        ("CNOT", (0, 2), ()),
        ("CNOT", (1, 2), ()),
        ("U2", (0,), (p / 2, 3 * p / 2)),
        ("U2", (1,), (p / 2, 3 * p / 2)),
        ("CNOT", (0, 2), ()),
        ("CNOT", (1, 2), ()),
    ]
    assert c.count("CNOT") == 6 and len(c) - c.count("CNOT") == 4


def test_row3_circuit_uses_basis_pair():
    c = build_line_circuit("row3")
    u2s = [g.params for g in c.gates if g.kind == "U2"]
    p = math.pi
    assert u2s == [(0.0, p / 2), (p / 2, 3 * p / 2), (3 * p / 2, p / 2)]
    assert len(c) == 10


@pytest.mark.parametrize("line", LINES, ids=str)
def test_circuit_matches_line_sign_on_plus_plus(line):
    counts = run_shots(build_line_circuit(line), with_ancilla(QuantumState.basis("00")), None, 8192, seed=3)
    expected = "0" if line_product_sign(line) == 1 else "1"
    assert counts[expected] == 8192


@pytest.mark.parametrize("line", LINES, ids=str)
def test_circuit_operator_equivalence_random_states(line, rng):
    sign = line_product_sign(line)
    for i in range(200):
        state = random_state(rng, product=i < 100)
        assert ancilla_expectation(line, state) == pytest.approx(sign, abs=1e-12)


@pytest.mark.parametrize("line", LINES, ids=str)
@pytest.mark.parametrize("order", all_orders())
def test_ordered_circuits_reproduce_sign(line, order, rng):
    c = build_ordered_line_circuit(line, order)
    for _ in range(5):
        final = c.evolve(with_ancilla(random_state(rng)))
        probs = final.probabilities().reshape(2, 2, 2)
        z = probs[:, :, 0].sum() - probs[:, :, 1].sum()
        assert z == pytest.approx(line_product_sign(line), abs=1e-12)


def test_measurement_order_changes_gate_count():
    forward = build_ordered_line_circuit("col3", (1, 2, 3))
    reverse = build_ordered_line_circuit("col3", (3, 2, 1))
    assert len(forward) > len(reverse)
    assert len(reverse) == len(build_line_circuit("col3"))


@pytest.mark.parametrize("row", [1, 2, 3])
@pytest.mark.parametrize("col", [1, 2, 3])
def test_observable_circuit_measures_cell(row, col, rng):
    obs = observable_at(row, col).matrix
    c = build_observable_circuit(row, col)
    for _ in range(10):
        system = random_state(rng)
        probs = c.evolve(with_ancilla(system)).probabilities().reshape(2, 2, 2)
        z = probs[:, :, 0].sum() - probs[:, :, 1].sum()
        assert z == pytest.approx(np.vdot(system.amplitudes, obs @ system.amplitudes).real, abs=1e-12)


# -- QND ----------------------------------------------------------------------


def test_qnd_eigenstate_unchanged(rng):
    state = QuantumState.basis("11")
    out, post = qnd_measure(state, observable_at(3, 3), rng)
    assert out == 1
    np.testing.assert_allclose(post.amplitudes, state.amplitudes)


def test_qnd_xx_on_plus_plus_entangles(rng):
    xx = PauliObservable("X", "X")
    outcomes = []
    for _ in range(4000):
        out, post = qnd_measure(QuantumState.basis("00"), xx, rng)
        outcomes.append(out)
        # Schmidt rank from the 2x2 coefficient matrix
        sv = np.linalg.svd(post.amplitudes.reshape(2, 2), compute_uv=False)
        assert np.sum(sv > 1e-12) == 2
    plus = outcomes.count(1)
    assert abs(plus - 2000) <= 3 * math.sqrt(1000)


def test_qnd_repeatability(rng):
    cells = [observable_at(r, c) for r in (1, 2, 3) for c in (1, 2, 3)]
    for i in range(10_000):
        obs = cells[i % 9]
        first, post = qnd_measure(random_state(rng), obs, rng)
        second, _ = qnd_measure(post, obs, rng)
        assert first == second


def test_row3_sequential_product_on_random_states(rng):
    row3 = [observable_at(3, c) for c in (1, 2, 3)]
    for _ in range(100):
        state = random_state(rng)
        prod = 1
        for obs in row3:
            out, state = qnd_measure(state, obs, rng)
            prod *= out
        assert prod == 1


def test_sequential_forward_reverse_identical():
    state = QuantumState.basis("00")
    fwd = sequential_line_run(state, "row3", (1, 2, 3), 4096, seed=1)
    rev = sequential_line_run(state, "row3", (3, 2, 1), 4096, seed=1)
    assert fwd.product.counts == rev.product.counts == {"0": 4096}


@pytest.mark.parametrize("order", all_orders())
def test_column3_always_minus_one(order, rng):
    run = sequential_line_run(random_state(rng), "col3", order, 1000, seed=4)
    assert run.product.counts == {"1": 1000}


def test_sequential_readout_errors_tip_products():
    run = sequential_line_run(QuantumState.basis("00"), "col3", (1, 2, 3), 8192, seed=9, readout_flip=0.1)
    # three independent flips: P(product flipped) = 3e(1-e)^2 + e^3 = 0.244
    p_flip = 3 * 0.1 * 0.9**2 + 0.1**3
    assert abs(run.product["0"] / 8192 - p_flip) < 4 * math.sqrt(p_flip * (1 - p_flip) / 8192)


def test_nine_single_observables_on_minus_minus():
    state = QuantumState.basis("11")
    shots = 8192
    for r in (1, 2, 3):
        for c in (1, 2, 3):
            counts = single_observable_run(state, r, c, shots, seed=r * 10 + c)
            if (r, c) == (3, 3):
                assert counts["0"] == shots
            else:
                assert abs(counts["0"] - shots / 2) <= 3 * math.sqrt(shots / 4)


def test_state_independence_entangled_inputs(rng):
    singlet = QuantumState.from_amplitudes([0, 1, -1, 0])
    for state in [singlet] + [random_state(rng) for _ in range(20)]:
        for line in LINES:
            assert ancilla_expectation(line, state) == pytest.approx(line_product_sign(line), abs=1e-12)

import numpy as np
import pytest

from magicsq.qsim import QuantumState

ACCEPTANCE_LINES: list[str] = []


def random_state(rng: np.random.Generator, n_qubits: int = 2, product: bool = False) -> QuantumState:
    def vec(n: int) -> np.ndarray:
        return rng.normal(size=n) + 1j * rng.normal(size=n)

    if product:
        amps = vec(2)
        for _ in range(n_qubits - 1):
            amps = np.kron(amps, vec(2))
        return QuantumState.from_amplitudes(amps)
    return QuantumState.from_amplitudes(vec(2**n_qubits))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20190506)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

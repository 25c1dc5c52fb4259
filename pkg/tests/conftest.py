import math

import numpy as np
import pytest

from cavity_pair import coherent_amplitudes

ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


@pytest.fixture(scope="session")
def field5():
    return coherent_amplitudes(math.sqrt(5))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_qubit_state(rng):
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    return v / np.linalg.norm(v)


def random_qubit_density(rng):
    v = random_qubit_state(rng)
    p = rng.uniform()
    return p * np.outer(v, v.conj()) + (1 - p) * np.eye(2) / 2


def random_separable(rng, terms=None):
    terms = terms or int(rng.integers(1, 5))
    w = rng.dirichlet(np.ones(terms))
    rho = np.zeros((4, 4), dtype=complex)
    for wk in w:
        rho += wk * np.kron(random_qubit_density(rng), random_qubit_density(rng))
    return rho


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cavity_pair import (
    InvalidInputError,
    NumericalDomainError,
    block_frequencies,
    block_hamiltonian,
    propagator_analytic,
    propagator_discrepancy,
    propagator_spectral,
)
from cavity_pair.propagator import BlockSpectrum, analytic_blocks

R_VALUES = [0.0, 0.1, 0.5, 0.8, 1.0]


def test_block_hamiltonian_decoupled():
    M = block_hamiltonian(0, 0.0)
    expected = np.zeros((4, 4))
    expected[0, 2] = expected[2, 0] = 1
    expected[1, 3] = expected[3, 1] = math.sqrt(2)
    np.testing.assert_array_equal(M, expected)


def test_block_hamiltonian_identical_atoms():
    M = block_hamiltonian(0, 1.0)
    assert M[0, 1] == M[0, 2] == 1
    assert M[1, 3] == M[2, 3] == pytest.approx(math.sqrt(2))
    assert np.all(np.diag(M) == 0)
    np.testing.assert_array_equal(M, M.T)


@settings(max_examples=60)
@given(n=st.integers(0, 200), r=st.floats(0, 3))
def test_block_hamiltonian_trace_square(n, r):
    M = block_hamiltonian(n, r)
    direct = sum(M[i, j] ** 2 for i in range(4) for j in range(4))
    assert direct == pytest.approx(2 * (1 + r * r) * (2 * n + 3), rel=1e-12)


def test_block_hamiltonian_rejects_negative_n():
    with pytest.raises(InvalidInputError):
        block_hamiltonian(-1, 0.5)


def test_frequencies_decoupled():
    f = block_frequencies(0, 0.0)
    assert f.delta_n == pytest.approx(3)
    assert f.Delta_n == pytest.approx(math.sqrt(2))
    assert f.mu_n == pytest.approx(2)
    assert f.nu_n == pytest.approx(1)


def test_frequencies_identical_atoms():
    f = block_frequencies(0, 1.0)
    assert (f.delta_n, f.Delta_n) == (6.0, 0.0)
    assert f.mu_n == pytest.approx(6)
    assert f.nu_n == pytest.approx(0, abs=1e-15)
    w = np.sort(np.linalg.eigvalsh(block_hamiltonian(0, 1.0)))
    np.testing.assert_allclose(w, [-math.sqrt(6), 0, 0, math.sqrt(6)], atol=1e-12)


def test_frequencies_verbatim_sum():
    f = block_frequencies(0, 1.0, "verbatim")
    assert f.delta_n == pytest.approx(2 * math.sqrt(3))
    assert f.delta_n == pytest.approx(3.464, abs=5e-4)


def test_verbatim_frequencies_leave_real_domain():
    with pytest.raises(NumericalDomainError):
        block_frequencies(0, 0.1, "verbatim")
    f = block_frequencies(0, 0.1, "verbatim", allow_complex=True)
    assert isinstance(f.mu_n, complex)


@pytest.mark.parametrize("n", [0, 1, 7, 30, 60])
@pytest.mark.parametrize("r", R_VALUES)
def test_corrected_frequencies_are_block_spectrum(n, r):
    f = block_frequencies(n, r)
    assert f.mu_n >= f.nu_n >= 0
    assert f.mu_n + f.nu_n == pytest.approx(f.delta_n, rel=1e-10)
    assert f.mu_n * f.nu_n == pytest.approx(f.Delta_n**2, rel=1e-10, abs=1e-12)
    freqs = np.sort([math.sqrt(f.mu_n), -math.sqrt(f.mu_n), math.sqrt(f.nu_n), -math.sqrt(f.nu_n)])
    np.testing.assert_allclose(np.linalg.eigvalsh(block_hamiltonian(n, r)), freqs, atol=1e-10)
    M = block_hamiltonian(n, r)
    assert np.trace(M @ M) == pytest.approx(2 * (f.mu_n + f.nu_n), rel=1e-12)
    assert np.linalg.det(M) == pytest.approx(f.mu_n * f.nu_n, rel=1e-9, abs=1e-9)


def test_spectral_identity_at_zero():
    np.testing.assert_allclose(propagator_spectral(4, 0.3, 0.0).U, np.eye(4), atol=1e-15)


@pytest.mark.parametrize("tau", [0.1, 0.77, 3.0, 12.5])
def test_spectral_rabi_decoupled(tau):
    U = propagator_spectral(0, 0.0, tau).U
    assert abs(U[3, 3]) ** 2 == pytest.approx(math.cos(math.sqrt(2) * tau) ** 2, abs=1e-13)


@settings(max_examples=60)
@given(n=st.integers(0, 80), r=st.floats(0, 2), tau=st.floats(-50, 50))
def test_spectral_unitary(n, r, tau):
    U = propagator_spectral(n, r, tau).U
    assert np.max(np.abs(U @ U.conj().T - np.eye(4))) < 1e-12


@settings(max_examples=40)
@given(n=st.integers(0, 40), r=st.floats(0, 1.5), t1=st.floats(0, 20), t2=st.floats(0, 20))
def test_spectral_group_property(n, r, t1, t2):
    lhs = propagator_spectral(n, r, t1 + t2).U
    rhs = propagator_spectral(n, r, t1).U @ propagator_spectral(n, r, t2).U
    assert np.max(np.abs(lhs - rhs)) < 1e-10


@pytest.mark.parametrize("tau", [0.4, 2.0, 9.3])
def test_r0_block_structure(tau):
    # atom 2 idle: |ee,n> <-> |ge,n+1> and |eg,n+1> <-> |gg,n+2> never mix
    U = propagator_spectral(3, 0.0, tau).U
    reordered = U[np.ix_([0, 2, 1, 3], [0, 2, 1, 3])]
    assert np.max(np.abs(reordered[:2, 2:])) < 1e-12
    assert np.max(np.abs(reordered[2:, :2])) < 1e-12


def test_block_spectrum_matches_single_blocks():
    spec = BlockSpectrum(12, 0.8)
    stack = spec.propagators(2.7)
    for n in (0, 5, 12):
        np.testing.assert_allclose(stack[n], propagator_spectral(n, 0.8, 2.7).U, atol=1e-13)


def test_analytic_corrected_identity_at_zero():
    for r in R_VALUES:
        np.testing.assert_allclose(propagator_analytic(3, r, 0.0).U, np.eye(4), atol=1e-13)


@settings(max_examples=60)
@given(n=st.integers(0, 60), r=st.sampled_from(R_VALUES + [0.33, 0.97]), tau=st.floats(0, 30))
def test_analytic_corrected_matches_spectral(n, r, tau):
    U = propagator_analytic(n, r, tau).U
    assert np.max(np.abs(U @ U.conj().T - np.eye(4))) < 1e-12
    assert propagator_discrepancy(n, r, tau) < 1e-12


def test_analytic_is_symmetric():
    U = propagator_analytic(2, 0.4, 1.3).U
    np.testing.assert_array_equal(U, U.T)


def test_analytic_degenerate_limit_r1():
    # nu_n = 0 at r = 1: sin(sqrt(nu) tau)/sqrt(nu) -> tau
    for tau in (0.5, math.pi, 7.0):
        assert propagator_discrepancy(0, 1.0, tau) < 1e-12
        assert propagator_discrepancy(9, 1.0, tau) < 1e-12


def test_discrepancy_zero_time():
    assert propagator_discrepancy(4, 0.8, 0.0, "analytic_corrected") < 1e-12
    assert propagator_discrepancy(4, 0.8, 0.0, "spectral") == 0.0


def test_discrepancy_baselines_corrected():
    # first oracle runs gave ~6e-15 and ~1e-15
    assert propagator_discrepancy(5, 0.8, 10.0) < 1e-12
    assert propagator_discrepancy(0, 1.0, math.pi) < 1e-12


def test_discrepancy_baselines_verbatim():
    # values frozen from the first run of the printed expressions
    assert propagator_discrepancy(5, 0.8, 10.0, "analytic_verbatim") == pytest.approx(3.500693358651388, rel=1e-9)
    assert propagator_discrepancy(0, 1.0, math.pi, "analytic_verbatim") == pytest.approx(1.517742520780967, rel=1e-9)
    assert propagator_discrepancy(0, 0.1, 1.0, "analytic_verbatim") == pytest.approx(0.9642609332404808, rel=1e-9)


def test_verbatim_not_identity_at_zero():
    # the printed diagonal reduces to -(mu+nu)/(mu-nu) at t = 0
    U = propagator_analytic(0, 1.0, 0.0, "analytic_verbatim").U
    assert abs(U[0, 0] - 1) > 0.1


def test_analytic_blocks_vectorized():
    ns = np.arange(10)
    stack = analytic_blocks(ns, 0.5, 1.7, "analytic_corrected")
    for n in ns:
        np.testing.assert_allclose(stack[n], propagator_analytic(int(n), 0.5, 1.7).U, atol=1e-14)


def test_analytic_rejects_unknown_form():
    with pytest.raises(InvalidInputError):
        propagator_analytic(0, 0.5, 1.0, "spectral")

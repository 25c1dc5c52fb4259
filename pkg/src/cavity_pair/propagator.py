"""Per-block propagators of the resonant two-atom interaction.

Each photon index ``n`` labels the invariant block spanned by
``(|ee,n>, |eg,n+1>, |ge,n+1>, |gg,n+2>)``, in that order. The spectral
route diagonalizes the real symmetric block Hamiltonian and is the one used
for production runs. The closed forms exist so they can be checked against it:

* ``analytic_corrected`` uses ``delta_n = (2n+3)(1+r^2)`` together with
  entry formulas derived from the 2x2 matrix-function identity. It is exactly
  unitary.
* ``analytic_verbatim`` evaluates the historically printed expressions,
  sign slips and the ``sqrt(2n+3)`` frequency sum included. When those
  frequencies turn complex the formulas are continued analytically, so the
  discrepancy can still be measured.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, NumericalDomainError

ANALYTIC_FORMS = ("analytic_corrected", "analytic_verbatim")
_DEGENERATE_NU = 1e-14


@dataclass(frozen=True)
class BlockFrequencies:
    n: int
    gamma_n: float
    beta_n: float
    delta_n: float
    Delta_n: float
    mu_n: complex | float
    nu_n: complex | float


@dataclass(frozen=True)
class BlockPropagator:
    n: int
    tau: float
    U: np.ndarray
    form: str


def _check_nr(n, r):
    if int(n) != n or n < 0:
        raise InvalidInputError(f"photon index must be a non-negative integer, got {n}")
    if not (math.isfinite(r) and r >= 0):
        raise InvalidInputError(f"coupling ratio must be >= 0, got {r}")


def _block_hamiltonians(ns: np.ndarray, r: float) -> np.ndarray:
    gamma = np.sqrt(ns + 1.0)
    beta = np.sqrt(ns + 2.0)
    H = np.zeros((ns.size, 4, 4))
    H[:, 0, 1] = H[:, 1, 0] = r * gamma
    H[:, 0, 2] = H[:, 2, 0] = gamma
    H[:, 1, 3] = H[:, 3, 1] = beta
    H[:, 2, 3] = H[:, 3, 2] = r * beta
    return H


def block_hamiltonian(n: int, r: float) -> np.ndarray:
    """Interaction Hamiltonian on block ``n`` in units of lambda_1."""
    _check_nr(n, r)
    return _block_hamiltonians(np.array([n]), r)[0]


def _frequencies(ns, r, form, allow_complex=False):
    ns = np.asarray(ns, dtype=float)
    gamma = np.sqrt(ns + 1.0)
    beta = np.sqrt(ns + 2.0)
    if form == "corrected":
        delta = (2 * ns + 3) * (1 + r * r)
    elif form == "verbatim":
        delta = np.sqrt(2 * ns + 3) * (1 + r * r)
    else:
        raise InvalidInputError(f"unknown frequency form {form!r}")
    Delta = gamma * beta * (1 - r * r)
    disc = delta**2 - 4 * Delta**2
    if np.any(disc < 0):
        if not allow_complex:
            bad = ns[disc < 0].astype(int)
            raise NumericalDomainError(
                f"delta_n^2 < 4 Delta_n^2 for n in {bad[:5].tolist()} (r={r}, {form})"
            )
        root = np.sqrt(disc.astype(complex))
    else:
        root = np.sqrt(disc)
    mu = 0.5 * (delta + root)
    nu = 0.5 * (delta - root)
    return gamma, beta, delta, Delta, mu, nu


def block_frequencies(n: int, r: float, form: str = "corrected", allow_complex: bool = False) -> BlockFrequencies:
    _check_nr(n, r)
    gamma, beta, delta, Delta, mu, nu = _frequencies([n], r, form, allow_complex)
    return BlockFrequencies(
        n=int(n),
        gamma_n=float(gamma[0]),
        beta_n=float(beta[0]),
        delta_n=float(delta[0]),
        Delta_n=float(Delta[0]),
        mu_n=mu[0].item(),
        nu_n=nu[0].item(),
    )


class BlockSpectrum:
    """Eigendecomposition of blocks ``0..n_max`` reused across many times."""

    def __init__(self, n_max: int, r: float):
        _check_nr(n_max, r)
        self.n_max = int(n_max)
        self.r = float(r)
        self.energies, self.vectors = np.linalg.eigh(
            _block_hamiltonians(np.arange(self.n_max + 1), self.r)
        )

    def propagators(self, tau: float) -> np.ndarray:
        """Stack of ``exp(-i H_n tau)``, shape ``(n_max + 1, 4, 4)``."""
        phases = np.exp(-1j * self.energies * tau)
        return np.einsum("nij,nj,nkj->nik", self.vectors, phases, self.vectors)

    def discrepancy(self, tau: float, form: str = "analytic_corrected") -> float:
        """Max entry-wise gap between a closed form and the spectral blocks."""
        if form == "spectral":
            return 0.0
        closed = analytic_blocks(np.arange(self.n_max + 1), self.r, tau, form)
        return float(np.max(np.abs(closed - self.propagators(tau))))


def propagator_spectral(n: int, r: float, tau: float) -> BlockPropagator:
    _check_nr(n, r)
    if not math.isfinite(tau):
        raise InvalidInputError("tau must be finite")
    w, V = np.linalg.eigh(block_hamiltonian(n, r))
    U = (V * np.exp(-1j * w * tau)) @ V.T
    return BlockPropagator(n=int(n), tau=float(tau), U=U, form="spectral")


def _sinc_term(x, tau):
    root = np.sqrt(x)
    safe = np.where(np.abs(x) < _DEGENERATE_NU, 1.0, root)
    return np.where(np.abs(x) < _DEGENERATE_NU, tau, np.sin(safe * tau) / safe)


def analytic_blocks(ns, r: float, tau: float, form: str) -> np.ndarray:
    """Closed-form block propagators, shape ``(len(ns), 4, 4)``."""
    if form not in ANALYTIC_FORMS:
        raise InvalidInputError(f"unknown analytic form {form!r}")
    verbatim = form == "analytic_verbatim"
    ns = np.asarray(ns, dtype=float)
    g, b, delta, Delta, mu, nu = _frequencies(
        ns, r, "verbatim" if verbatim else "corrected", allow_complex=verbatim
    )
    if verbatim:
        mu, nu = mu.astype(complex), nu.astype(complex)
    D = mu - nu
    if np.any(D == 0):
        raise NumericalDomainError("degenerate frequencies mu_n == nu_n")
    cm, cn = np.cos(np.sqrt(mu) * tau), np.cos(np.sqrt(nu) * tau)
    sm, sn = _sinc_term(mu, tau), _sinc_term(nu, tau)
    c = 1 + r * r
    g2, b2 = g * g, b * b
    dcos = cm - cn

    U = np.zeros((ns.size, 4, 4), dtype=complex)
    U[:, 0, 2] = 1j * ((Delta * b - g * mu) * sm - (Delta * b - g * nu) * sn) / D
    U[:, 1, 1] = -((r * r * b2 + g2 - mu) * cm - (r * r * b2 + g2 - nu) * cn) / D
    U[:, 1, 2] = r * delta / (D * c) * dcos
    U[:, 1, 3] = 1j * ((Delta * g - b * mu) * sm - (Delta * g - b * nu) * sn) / D
    U[:, 2, 2] = -((r * r * g2 + b2 - mu) * cm - (r * r * g2 + b2 - nu) * cn) / D
    if verbatim:
        U[:, 0, 0] = -(b2 * c * dcos + (mu * cm + nu * cn)) / D
        U[:, 3, 3] = -(g2 * c * dcos + (mu * cm + nu * cn)) / D
        U[:, 0, 1] = -1j * r * ((Delta * b + g * mu) * sm + (Delta * b - g * nu) * sn) / D
        U[:, 2, 3] = -1j * r * ((Delta * g + b * mu) * sm + (Delta * g - b * nu) * sn) / D
        # Delta / (1 - r^2) is 0/0 at r = 1; its limit is gamma*beta
        ratio = g * b if abs(1 - r * r) < 1e-14 else Delta / (1 - r * r)
        U[:, 0, 3] = -2 * r * ratio / D * dcos
    else:
        U[:, 0, 0] = (mu * cm - nu * cn - b2 * c * dcos) / D
        U[:, 3, 3] = (mu * cm - nu * cn - g2 * c * dcos) / D
        U[:, 0, 1] = -1j * r * ((Delta * b + g * mu) * sm - (Delta * b + g * nu) * sn) / D
        U[:, 2, 3] = -1j * r * ((Delta * g + b * mu) * sm - (Delta * g + b * nu) * sn) / D
        U[:, 0, 3] = 2 * r * g * b / D * dcos
    iu = np.triu_indices(4, 1)
    U[:, iu[1], iu[0]] = U[:, iu[0], iu[1]]
    return U


def propagator_analytic(n: int, r: float, tau: float, form: str = "analytic_corrected") -> BlockPropagator:
    _check_nr(n, r)
    if not math.isfinite(tau):
        raise InvalidInputError("tau must be finite")
    U = analytic_blocks([n], r, tau, form)[0]
    return BlockPropagator(n=int(n), tau=float(tau), U=U, form=form)


def propagator_discrepancy(n: int, r: float, tau: float, form: str = "analytic_corrected") -> float:
    """Largest entry-wise gap between a closed form and the spectral propagator."""
    if form == "spectral":
        return 0.0
    a = propagator_analytic(n, r, tau, form).U
    s = propagator_spectral(n, r, tau).U
    return float(np.max(np.abs(a - s)))

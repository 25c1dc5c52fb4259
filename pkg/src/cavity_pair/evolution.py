"""Atom-field evolution and reduction to atomic density matrices.

Both modes return the joint state as amplitudes ``c[a, m]`` over atomic label
``a`` in (ee, eg, ge, gg) and photon number ``m = 0..n_max+2``.

``paper`` mode weights the whole block ``n`` by the coherent amplitude
``q_n``. For an |ee> start this is the true initial product state. For
starts with |eg>, |ge> or |gg> content, the lower channels sit one or two
photons higher than in a true product state. ``exact`` mode evolves the true
product state with the full truncated Hamiltonian, so it covers the
boundary sectors |gg,0>, |gg,1> and |eg,0>, |ge,0> as well.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .core import AtomPair, CoherentField
from .errors import InvalidInputError, TruncationError, TruncationWarning, ValidationError
from .propagator import ANALYTIC_FORMS, BlockSpectrum, analytic_blocks

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-10
POSITIVITY_TOL = 1e-10


@dataclass(frozen=True)
class JointState:
    mode: str
    tau: float
    amplitudes: np.ndarray = field(repr=False)
    channels: np.ndarray | None = field(default=None, repr=False)
    norm_tolerance: float = 1e-10
    unitary: bool = True

    @property
    def norm(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))


class _DensityChecks:
    rho: np.ndarray

    def validate(self, context: str = "") -> None:
        """Raise :class:`ValidationError` unless trace, hermiticity and positivity hold."""
        rho = self.rho
        where = f" ({context})" if context else ""
        herm = np.max(np.abs(rho - rho.conj().T))
        if herm > HERMITIAN_TOL:
            raise ValidationError(f"density not hermitian, deviation {herm:.3e}{where}")
        tr = np.trace(rho).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValidationError(f"density trace {tr!r} differs from 1{where}")
        lo = np.linalg.eigvalsh(rho)[0]
        if lo < -POSITIVITY_TOL:
            raise ValidationError(f"density has eigenvalue {lo:.3e} below zero{where}")


@dataclass(frozen=True)
class TwoQubitDensity(_DensityChecks):
    rho: np.ndarray


@dataclass(frozen=True)
class SingleQubitDensity(_DensityChecks):
    rho: np.ndarray
    which: int


def _photon_dim(field: CoherentField) -> int:
    return field.n_max + 3


class PaperEvolver:
    """Block-weighted evolution with a cached block spectrum."""

    def __init__(self, atoms: AtomPair, field: CoherentField, r: float, form: str = "spectral"):
        if form != "spectral" and form not in ANALYTIC_FORMS:
            raise InvalidInputError(f"unknown propagator form {form!r}")
        self.atoms = atoms
        self.field = field
        self.r = float(r)
        self.form = form
        self.spectrum = BlockSpectrum(field.n_max, r)
        self._ns = np.arange(field.n_max + 1)

    def blocks(self, tau: float) -> np.ndarray:
        if self.form == "spectral":
            return self.spectrum.propagators(tau)
        return analytic_blocks(self._ns, self.r, tau, self.form)

    def discrepancy(self, tau: float) -> float:
        """Max gap between a closed form and the spectral blocks at ``tau``.

        For the spectral form the corrected closed form is the cross-check.
        """
        form = "analytic_corrected" if self.form == "spectral" else self.form
        return self.spectrum.discrepancy(tau, form)

    def state(self, tau: float) -> JointState:
        if tau < 0:
            raise InvalidInputError("tau must be non-negative")
        n = self._ns
        channels = (self.blocks(tau) @ self.atoms.joint) * self.field.q[:, None]
        c = np.zeros((4, _photon_dim(self.field)), dtype=complex)
        c[0, n] = channels[:, 0]
        c[1, n + 1] = channels[:, 1]
        c[2, n + 1] = channels[:, 2]
        c[3, n + 2] = channels[:, 3]
        return JointState(
            mode="paper",
            tau=float(tau),
            amplitudes=c,
            channels=channels,
            norm_tolerance=max(TRACE_TOL, 2 * self.field.epsilon),
            unitary=self.form != "analytic_verbatim",
        )


def _lowering(dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, dim)), 1)


class ExactEvolver:
    """Full truncated-space evolution of the true product initial state."""

    def __init__(self, atoms: AtomPair, field: CoherentField, r: float):
        self.atoms = atoms
        self.field = field
        self.r = float(r)
        dim = _photon_dim(field)
        a = _lowering(dim)
        sm = np.array([[0.0, 0.0], [1.0, 0.0]])  # |g><e| on (e, g)
        eye2 = np.eye(2)
        sm1 = np.kron(sm, eye2)
        sm2 = np.kron(eye2, sm)
        coupling = np.kron(sm1, a.T) + r * np.kron(sm2, a.T)
        H = coupling + coupling.T
        self.energies, self.vectors = np.linalg.eigh(H)
        psi_f = np.zeros(dim, dtype=complex)
        psi_f[: field.n_max + 1] = field.q
        self.initial = np.kron(atoms.joint, psi_f)
        self._overlaps = self.vectors.T @ self.initial
        self._dim = dim

    def state(self, tau: float) -> JointState:
        if tau < 0:
            raise InvalidInputError("tau must be non-negative")
        psi = self.vectors @ (np.exp(-1j * self.energies * tau) * self._overlaps)
        c = psi.reshape(4, self._dim)
        edge = float(np.sum(np.abs(c[:, -1]) ** 2))
        if edge > self.field.epsilon:
            warnings.warn(
                f"population {edge:.2e} at the photon cutoff m={self._dim - 1} (tau={tau})",
                TruncationWarning,
                stacklevel=2,
            )
        return JointState(
            mode="exact",
            tau=float(tau),
            amplitudes=c,
            norm_tolerance=max(TRACE_TOL, 2 * self.field.epsilon),
        )


def evolve_paper_mode(atoms: AtomPair, field: CoherentField, r: float, tau: float, form: str = "spectral") -> JointState:
    return PaperEvolver(atoms, field, r, form).state(tau)


def evolve_exact(atoms: AtomPair, field: CoherentField, r: float, tau: float) -> JointState:
    return ExactEvolver(atoms, field, r).state(tau)


def state_fidelity(a: JointState, b: JointState) -> float:
    """``|<a|b>|^2`` for two joint states on the same photon range."""
    if a.amplitudes.shape != b.amplitudes.shape:
        raise InvalidInputError("joint states live on different truncated spaces")
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


def reduce_two_qubit(state: JointState, renormalize: bool = False) -> TwoQubitDensity:
    """Trace out the field.

    Non-unitary closed forms do not preserve the norm; pass
    ``renormalize=True`` to rescale those states instead of failing.
    """
    c = state.amplitudes
    rho = c @ c.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    tr = np.trace(rho).real
    if renormalize or not state.unitary:
        if tr <= 0:
            raise TruncationError("joint state has zero norm")
        rho = rho / tr
    elif abs(tr - 1.0) > state.norm_tolerance:
        raise TruncationError(
            f"norm deficit {1.0 - tr:.3e} exceeds tolerance {state.norm_tolerance:.1e} "
            f"at tau={state.tau}; raise the photon cutoff"
        )
    return TwoQubitDensity(rho)


def reduce_single(rho12: TwoQubitDensity, which: int) -> SingleQubitDensity:
    t = rho12.rho.reshape(2, 2, 2, 2)
    if which == 1:
        rho = np.einsum("ikjk->ij", t)
    elif which == 2:
        rho = np.einsum("kikj->ij", t)
    else:
        raise InvalidInputError(f"qubit index must be 1 or 2, got {which}")
    return SingleQubitDensity(rho, which)

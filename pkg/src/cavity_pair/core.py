"""Domain types and state preparation.

Times are dimensionless (``tau = lambda_1 * t``) and energies are in units of
``hbar * lambda_1``. The coupling ratio ``r = lambda_2 / lambda_1`` is the
only coupling parameter left.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import gammaln
from scipy.stats import poisson

from .errors import InvalidInputError

EVOLUTION_MODES = ("paper", "exact")
PROPAGATOR_FORMS = ("spectral", "analytic_corrected", "analytic_verbatim")

_NORM_TOL = 1e-12


@dataclass(frozen=True)
class SystemConfig:
    r: float
    nbar: float
    t_grid: tuple[float, ...]
    evolution_mode: str = "paper"
    propagator_form: str = "spectral"
    truncation_epsilon: float = 1e-12

    def __post_init__(self):
        object.__setattr__(self, "t_grid", tuple(float(t) for t in self.t_grid))
        if not (math.isfinite(self.r) and self.r >= 0):
            raise InvalidInputError(f"coupling ratio r must be >= 0, got {self.r}")
        if not (math.isfinite(self.nbar) and self.nbar >= 0):
            raise InvalidInputError(f"mean photon number must be >= 0, got {self.nbar}")
        _check_grid(self.t_grid)
        if self.evolution_mode not in EVOLUTION_MODES:
            raise InvalidInputError(f"unknown evolution mode {self.evolution_mode!r}")
        if self.propagator_form not in PROPAGATOR_FORMS:
            raise InvalidInputError(f"unknown propagator form {self.propagator_form!r}")
        _check_epsilon(self.truncation_epsilon)

    @property
    def alpha(self) -> complex:
        # real, non-negative amplitude; only |alpha|^2 is physical here
        return complex(math.sqrt(self.nbar))


def _check_grid(t_grid: Sequence[float]) -> None:
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise InvalidInputError("time grid must be a non-empty 1-d sequence")
    if not np.all(np.isfinite(t)) or t[0] < 0:
        raise InvalidInputError("time grid must be finite and non-negative")
    if np.any(np.diff(t) <= 0):
        raise InvalidInputError("time grid must be strictly increasing")


def _check_epsilon(epsilon: float) -> None:
    if not (0.0 < epsilon < 1.0):
        raise InvalidInputError(f"truncation epsilon must lie in (0, 1), got {epsilon}")


@dataclass(frozen=True)
class AtomPair:
    """Joint atomic amplitudes on the basis (|ee>, |eg>, |ge>, |gg>)."""

    joint: np.ndarray = field(repr=False)
    label: str = "custom"

    def __post_init__(self):
        v = np.array(self.joint, dtype=complex).reshape(-1)
        if v.shape != (4,):
            raise InvalidInputError("joint atomic amplitudes must have 4 components")
        if not np.all(np.isfinite(v)):
            raise InvalidInputError("joint atomic amplitudes must be finite")
        if abs(np.vdot(v, v).real - 1.0) > _NORM_TOL:
            raise InvalidInputError("joint atomic amplitudes must have unit norm")
        v.setflags(write=False)
        object.__setattr__(self, "joint", v)

    def density(self) -> np.ndarray:
        return np.outer(self.joint, self.joint.conj())


@dataclass(frozen=True)
class CoherentField:
    q: np.ndarray = field(repr=False)
    n_max: int
    alpha: complex
    epsilon: float

    @property
    def mass(self) -> float:
        return float(np.sum(np.abs(self.q) ** 2))


def truncation_level(nbar: float, epsilon: float) -> int:
    """Photon cutoff for a Poisson(nbar) field.

    Returns the smallest N whose Poisson tail mass beyond N is below
    ``epsilon``, but never less than ``nbar + 10*sqrt(nbar) + 20`` so the
    two-photon channel above the cutoff still has headroom.
    """
    if not (math.isfinite(nbar) and nbar >= 0):
        raise InvalidInputError(f"mean photon number must be >= 0, got {nbar}")
    _check_epsilon(epsilon)
    floor = math.ceil(nbar + 10.0 * math.sqrt(nbar) + 20.0)
    if nbar == 0:
        return floor
    n = max(0, math.floor(nbar))
    while poisson.sf(n, nbar) >= epsilon:
        n += 1
    return max(n, floor)


def coherent_amplitudes(alpha: complex, epsilon: float = 1e-12) -> CoherentField:
    alpha = complex(alpha)
    if not (math.isfinite(alpha.real) and math.isfinite(alpha.imag)):
        raise InvalidInputError(f"coherent amplitude must be finite, got {alpha}")
    nbar = abs(alpha) ** 2
    n_max = truncation_level(nbar, epsilon)
    n = np.arange(n_max + 1)
    q = np.zeros(n_max + 1, dtype=complex)
    if alpha == 0:
        q[0] = 1.0
    else:
        # log-space magnitude keeps large n free of overflow
        log_mag = n * math.log(abs(alpha)) - 0.5 * gammaln(n + 1) - 0.5 * nbar
        q[:] = np.exp(log_mag) * np.exp(1j * n * np.angle(alpha))
    q.setflags(write=False)
    return CoherentField(q=q, n_max=n_max, alpha=alpha, epsilon=epsilon)


def product_preparation(a1: complex, b1: complex, a2: complex, b2: complex) -> AtomPair:
    """Product of two single-atom states ``a|e> + b|g>``."""
    for i, (a, b) in enumerate(((a1, b1), (a2, b2)), start=1):
        if abs(abs(a) ** 2 + abs(b) ** 2 - 1.0) > _NORM_TOL:
            raise InvalidInputError(f"atom {i} amplitudes are not normalized")
    joint = np.array([a1 * a2, a1 * b2, b1 * a2, b1 * b2], dtype=complex)
    return AtomPair(joint, label="product")


def partial_entangled_preparation(theta: float) -> AtomPair:
    """``cos(theta)|ee> + sin(theta)|gg>``."""
    if not math.isfinite(theta):
        raise InvalidInputError("theta must be finite")
    return AtomPair(np.array([math.cos(theta), 0, 0, math.sin(theta)]), label="partial")


def ground_state() -> AtomPair:
    return product_preparation(0, 1, 0, 1)


def excited_state() -> AtomPair:
    return product_preparation(1, 0, 1, 0)

"""Exception types raised across the package."""


class CavityPairError(Exception):
    """Base class for all package errors."""


class InvalidInputError(CavityPairError, ValueError):
    pass


class NumericalDomainError(CavityPairError, ArithmeticError):
    """A closed-form expression left its real domain."""


class TruncationError(CavityPairError):
    """Photon-number truncation lost more probability than allowed."""


class ValidationError(CavityPairError):
    """A density matrix failed a trace, hermiticity or positivity check."""


class OptimizationError(CavityPairError):
    """The SU(2) fidelity search did not reach the known optimum."""


class TruncationWarning(UserWarning):
    pass

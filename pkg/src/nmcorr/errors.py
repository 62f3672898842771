"""Exception hierarchy.

Everything raised deliberately by the package derives from NmcorrError, so
callers (the CLI in particular) can separate bad input from numerical
invariant violations.
"""


class NmcorrError(Exception):
    """Base class for package errors."""


class DimensionError(NmcorrError, ValueError):
    """Operand shapes are incompatible or exceed the supported size."""


class SubsystemError(NmcorrError, ValueError):
    """A subsystem selection is empty, complete, or out of range."""


class SymmetryError(NmcorrError, ValueError):
    """A matrix expected to be Hermitian is not."""


class DomainError(NmcorrError, ValueError):
    """An argument lies outside the domain of the operation."""


class StateError(NmcorrError, ValueError):
    """A density matrix or state vector violates its invariants."""


class DilationError(NmcorrError, ValueError):
    """The channel cannot be dilated into the fixed environment."""


class InvariantViolation(NmcorrError, ArithmeticError):
    """A numerical identity that must hold was found broken."""


class InconsistencyError(InvariantViolation):
    """Entropic identities disagree with the assumed pure dilation."""

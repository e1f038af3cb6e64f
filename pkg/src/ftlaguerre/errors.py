"""Exception types shared across the library.

The CLI maps these onto its exit codes, so raising the right class matters:
DomainError and its subclasses -> exit 2, VerificationFailure -> exit 3,
InternalConsistencyError -> exit 4.
"""


class DomainError(ValueError):
    """A parameter lies outside the domain an operation supports."""


class ParameterError(DomainError):
    """Structurally invalid parameters (e.g. a hypergeometric series that
    never terminates, or chi sampling with nonpositive degrees of freedom)."""


class PoleError(DomainError):
    """A lower hypergeometric parameter hits a nonpositive integer before the
    series terminates."""


class TruncationError(ArithmeticError):
    """A truncated-series operation asked for a coefficient beyond the order
    that is known exactly.  Raised loudly instead of silently truncating."""


class SingularMatrixError(ArithmeticError):
    """Exact linear solve met a singular matrix; carries the rank found."""

    def __init__(self, rank: int, size: int):
        self.rank = rank
        self.size = size
        super().__init__(f"singular matrix: rank {rank} < size {size}")


class ConvergenceError(ArithmeticError):
    """An iterative eigenvalue sweep exceeded its iteration cap."""


class InternalConsistencyError(AssertionError):
    """A structural assumption of an algorithm failed (implementation fault,
    not a data fault) — e.g. the Painleve order-by-order solve meeting a
    nonlinear condition."""


class ConventionError(AssertionError):
    """A pinned sign/Gamma convention failed its defining invariant check."""


class VerificationFailure(Exception):
    """One or more cross-route verification checks failed."""

"""Exception types shared across the package."""


class PindimError(Exception):
    """Base class for all package-specific errors."""


class DomainError(PindimError, ValueError):
    """Evaluation requested outside a profile's domain."""


class ProfileFormatError(PindimError, ValueError):
    """A profile document is structurally malformed (bad JSON shape, wrong types)."""


class InvalidProfileError(PindimError, ValueError):
    """A structurally well-formed profile violates the profile invariants."""

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class PreconditionError(PindimError, ValueError):
    """A documented precondition of an operation does not hold."""


class EnvelopeViolation(PreconditionError):
    """An operation required an envelope the profile does not satisfy."""

    def __init__(self, message, at=None):
        super().__init__(message)
        self.at = at


class ConstructionError(PindimError, RuntimeError):
    """A generator or partition construction cannot satisfy its contract."""


class BudgetExceededError(PindimError, RuntimeError):
    """Exhaustive enumeration would exceed the configured budget; use beam mode."""

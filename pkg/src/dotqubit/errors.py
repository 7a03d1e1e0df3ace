"""Exception hierarchy shared by all modules.

The CLI maps :class:`ValidationError` to exit code 1 and :class:`RegimeError`
to exit code 2.
"""


class DotQubitError(Exception):
    """Base class for package errors."""


class ValidationError(DotQubitError, ValueError):
    """An input violates a documented invariant or precondition."""


class NonHermitianError(ValidationError):
    """A matrix required to be Hermitian is not."""


class RegimeError(DotQubitError, ValueError):
    """Parameters fall outside the regime where an approximation is validated."""


class IntegrationError(DotQubitError, RuntimeError):
    """The fixed-step integrator lost accuracy; use a smaller step."""

"""Semantic exceptions shared across the package."""


class SubPoissonError(Exception):
    """Base error for this package."""


class DomainError(SubPoissonError, ValueError):
    """An argument is outside the domain a function is defined on."""


class TruncationError(SubPoissonError, RuntimeError):
    """The Fock-space truncation is too small for the requested accuracy.

    Carries ``suggested_dim``, a truncation the caller may retry with.
    """

    def __init__(self, message, suggested_dim=None):
        super().__init__(message)
        self.suggested_dim = suggested_dim


class InternalConsistencyError(SubPoissonError, RuntimeError):
    """A result violated an internal invariant; inputs were likely invalid."""


class ConfigError(SubPoissonError, ValueError):
    """A sweep configuration is invalid; the message names the field."""

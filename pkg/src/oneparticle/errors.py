"""Exception hierarchy shared by the whole package.

The CLI maps these onto exit codes: configuration/parse problems exit 2,
validation and dimension problems exit 3, numerical failures exit 4.
"""

from __future__ import annotations


class OneParticleError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(OneParticleError):
    """Shapes or index sets are inconsistent with the declared mode count."""


class DimensionGuardError(DimensionError):
    """A requested full tensor space exceeds the brute-force size guard."""


class ValidationError(OneParticleError):
    """An input violates a declared invariant (Hermiticity, trace, positivity, ...)."""


class DomainError(OneParticleError):
    """A scalar or eigenvalue lies outside the domain of the requested function."""


class NumericalError(OneParticleError):
    """An iterative numerical procedure failed to reach its target accuracy."""

"""Exception types shared across the package."""

from __future__ import annotations


class SublatticeViolation(ValueError):
    """A coupling joins two modes of the same sublattice.

    ``witness`` holds the offending (0-based) index pair.
    """

    def __init__(self, message: str, witness: tuple[int, int] | None = None):
        super().__init__(message)
        self.witness = witness


class SizeGuardError(ValueError):
    """Requested Fock space is larger than the configured guard."""


class InvariantViolation(RuntimeError):
    """A numerical invariant failed beyond its tolerance."""


class ConfigError(ValueError):
    """Invalid experiment configuration; ``field`` names the culprit."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field

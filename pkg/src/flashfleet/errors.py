"""Exception hierarchy shared across the package.

The CLI maps these to exit codes: configuration and input validation
problems exit 2, solver failures exit 3, file system problems exit 4.
"""

from __future__ import annotations

__all__ = [
    "FlashFleetError",
    "ParseError",
    "ValidationError",
    "UnreachableError",
    "ConfigError",
    "SolverError",
    "InfeasibleError",
    "InstanceTooLargeError",
]


class FlashFleetError(Exception):
    """Base class for all package errors."""


class ParseError(FlashFleetError):
    """Malformed input data; message names the source and line number."""


class ValidationError(FlashFleetError):
    """Structurally valid input that violates a semantic requirement."""


class UnreachableError(ValidationError):
    """A required shortest path does not exist."""


class ConfigError(FlashFleetError):
    """Invalid or inconsistent run configuration."""


class SolverError(FlashFleetError):
    """An optimization step failed in a way that indicates a bug upstream."""


class InfeasibleError(SolverError):
    """An optimization instance admits no feasible solution.

    The message names a witness: an uncoverable request or an
    unservable mandatory vehicle.
    """


class InstanceTooLargeError(SolverError):
    """A reference (brute force) solver was handed an oversized instance."""

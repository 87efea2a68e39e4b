"""Exception types shared across the package."""

from __future__ import annotations


class RejectedInputError(ValueError):
    """A reading could not be used, e.g. a non-finite acquisition."""


class EmptyWindowError(ValueError):
    """An operation that needs at least one acquisition got none."""


class DegenerateDataError(ValueError):
    """Data too degenerate to fit a model (singular covariance, too few points)."""


class ConfigurationError(ValueError):
    """Inconsistent parameters or mismatched inputs."""

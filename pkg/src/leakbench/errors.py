"""Exception types shared across the toolkit.

The CLI maps these onto exit codes: bad arguments (ValueError) exit 1,
data problems exit 2, numerical failures exit 3.
"""

from __future__ import annotations

__all__ = [
    "LeakbenchError",
    "EdgeListParseError",
    "SplitError",
    "SamplingError",
    "ConfigError",
    "NumericalError",
]


class LeakbenchError(Exception):
    """Base class for toolkit errors."""


class EdgeListParseError(LeakbenchError):
    """Malformed or empty edge-list input."""

    def __init__(self, message: str, line_number: int | None = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class SplitError(LeakbenchError):
    """Edge set too small to produce the requested partition."""


class SamplingError(LeakbenchError):
    """Not enough admissible node pairs to sample from."""


class ConfigError(LeakbenchError):
    """Invalid or unreadable experiment configuration."""


class NumericalError(LeakbenchError):
    """Iteration failed to converge or a metric is undefined."""

"""Error types shared across the package.

The CLI maps these onto exit codes: parameter errors exit 2, capability
(dimension-cap) errors exit 3, certificate failures exit 1.
"""

from __future__ import annotations


class ParameterError(ValueError):
    """An argument is outside the domain a routine accepts."""


class CapabilityError(RuntimeError):
    """The request exceeds a documented dimension cap of an exact routine."""


class NumericalError(RuntimeError):
    """An iterative routine failed to reach its accuracy target.

    Attributes:
        residual: The best residual achieved before giving up, when known.
    """

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual

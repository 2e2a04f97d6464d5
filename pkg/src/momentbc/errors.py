"""
Error types raised by momentbc.

Every domain error carries a machine-readable ``code`` and a ``details``
dict; the CLI serializes both into its error document.
"""

from typing import Any


class MomentBCError(Exception):
    """Base class for data-dependent failures."""

    code = "domain-error"

    def __init__(self, message: str, **details: Any):
        self.details = details
        super().__init__(message)


class InsufficientDataError(MomentBCError):
    """Raised when a moment or response vector is too short for the requested order."""

    def __init__(self, required: int, available: int, what: str = "moments"):
        self.required = required
        self.available = available
        self.what = what
        self.code = "insufficient-response-entries" if what == "response entries" else "insufficient-moments"
        super().__init__(
            f"need {required} {what}, got {available}",
            required=required,
            available=available,
        )


class NotPositiveDefiniteError(MomentBCError):
    """Raised when a Gram/Hankel matrix fails the positive-definiteness test."""

    code = "not-positive-definite"

    def __init__(self, matrix: str, order: int, min_pivot: float | None = None):
        self.matrix = matrix
        self.order = order
        self.min_pivot = min_pivot
        message = f"{matrix} of order {order} is not positive definite"
        if min_pivot is not None:
            message += f" (smallest pivot {min_pivot:.3e})"
        super().__init__(message, matrix=matrix, order=order, min_pivot=min_pivot)


class SingularMatrixError(MomentBCError):
    """Raised when a linear solve or determinant ratio hits a singular matrix."""

    code = "singular-matrix"

    def __init__(self, matrix: str, code: str | None = None):
        self.matrix = matrix
        if code is not None:
            self.code = code
        super().__init__(f"{matrix} is singular", matrix=matrix)


class NoConvergenceError(MomentBCError):
    """Raised when the rotation eigensolver exceeds its sweep cap."""

    code = "no-convergence"

    def __init__(self, sweeps: int, off_diagonal_ratio: float):
        self.sweeps = sweeps
        self.off_diagonal_ratio = off_diagonal_ratio
        super().__init__(
            f"eigensolver did not converge in {sweeps} sweeps "
            f"(off-diagonal ratio {off_diagonal_ratio:.3e})",
            sweeps=sweeps,
            off_diagonal_ratio=off_diagonal_ratio,
        )


class DegenerateSpectrumError(MomentBCError):
    """Raised when recovered atoms coincide (numerically rank-deficient data)."""

    code = "degenerate-spectrum"

    def __init__(self, gap: float, diameter: float):
        self.gap = gap
        self.diameter = diameter
        super().__init__(
            f"eigenvalues {gap:.3e} apart on a spectrum of diameter {diameter:.3e}",
            gap=gap,
            diameter=diameter,
        )


class ParseError(MomentBCError):
    """Raised when an input file is malformed."""

    code = "parse-error"

    def __init__(self, path: str, reason: str):
        self.path = path
        self.reason = reason
        super().__init__(f"cannot parse {path}: {reason}", path=path)

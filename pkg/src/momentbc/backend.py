"""
Arithmetic backends.

Matrices and vectors are numpy arrays in both backends: ``float64`` for the
float backend, ``dtype=object`` arrays of ``sympy.Rational`` for the exact
backend. The helpers below dispatch on the array dtype, so callers build a
matrix once and get exact or float linear algebra from the same code path.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Any, Iterator, Sequence, TypeVar

import mpmath
import numpy as np
import sympy
from scipy import linalg
from scipy.linalg import lapack

from momentbc.config import PIVOT_TOLERANCE
from momentbc.errors import NotPositiveDefiniteError, SingularMatrixError
from momentbc.logging import get_logger, log_warning

logger = get_logger(__name__)

Scalar = float | sympy.Rational

S = TypeVar("S", bound="ScalarSequence")


class Backend(str, Enum):
    """Arithmetic used for a sequence and everything assembled from it."""

    F64 = "f64"
    RATIONAL = "rational"


# --- Scalars ---


def parse_scalar(value: Any, backend: Backend | str) -> Scalar:
    """Convert a user-supplied number to the backend's scalar type.

    Accepts ints, floats, ``"p/q"`` strings and sympy rationals. Non-integral
    floats are rejected in the exact backend: a float literal is not the
    rational the user meant.
    """
    backend = Backend(backend)
    if isinstance(value, bool):
        raise TypeError("booleans are not moments")

    if backend is Backend.RATIONAL:
        if isinstance(value, sympy.Rational):
            return value
        if isinstance(value, (int, np.integer)):
            return sympy.Integer(int(value))
        if isinstance(value, str):
            try:
                parsed = sympy.Rational(value.strip())
            except (TypeError, ValueError, sympy.SympifyError) as e:
                raise ValueError(f"not a rational number: {value!r}") from e
            return parsed
        if isinstance(value, (float, np.floating)):
            if np.isfinite(value) and float(value).is_integer():
                return sympy.Integer(int(value))
            raise ValueError(f"float {value!r} in rational backend; use a 'p/q' string")
        raise TypeError(f"unsupported scalar type {type(value).__name__}")

    if isinstance(value, str):
        try:
            value = sympy.Rational(value.strip())
        except (TypeError, ValueError, sympy.SympifyError) as e:
            raise ValueError(f"not a number: {value!r}") from e
    result = float(value)
    if not np.isfinite(result):
        raise ValueError(f"non-finite value {value!r}")
    return result


def to_mpf(value: Any) -> mpmath.mpf:
    """Exact conversion to an mpmath float at the current working precision."""
    if isinstance(value, sympy.Rational):
        return mpmath.mpf(int(value.p)) / int(value.q)
    return mpmath.mpf(value)


def format_scalar(value: Scalar) -> float | str:
    """JSON-ready scalar: rationals as ``"p/q"`` strings, floats unchanged."""
    if isinstance(value, sympy.Rational):
        return str(value)
    return float(value)


# --- Arrays ---


def is_exact(array: np.ndarray) -> bool:
    return array.dtype == object


def backend_of(array: np.ndarray) -> Backend:
    return Backend.RATIONAL if is_exact(array) else Backend.F64


def as_array(values: Sequence[Any] | np.ndarray, backend: Backend | str) -> np.ndarray:
    """Array of backend scalars with the same shape as ``values``."""
    backend = Backend(backend)
    source = np.asarray(values, dtype=object)
    if backend is Backend.F64:
        return to_float_array(source)
    out = np.empty(source.shape, dtype=object)
    for index, value in np.ndenumerate(source):
        out[index] = parse_scalar(value, backend)
    return out


def to_float_array(array: np.ndarray) -> np.ndarray:
    array = np.asarray(array)
    if array.dtype == object:
        return np.vectorize(float, otypes=[float])(array) if array.size else array.astype(float)
    return array.astype(float)


def to_exact_array(array: np.ndarray) -> np.ndarray:
    """Rationals equal to the binary values of a float array (no rounding)."""
    array = np.asarray(array)
    if array.dtype == object:
        return array
    out = np.empty(array.shape, dtype=object)
    for index, value in np.ndenumerate(array):
        out[index] = sympy.Rational(float(value))
    return out


def zeros(shape: int | tuple[int, ...], backend: Backend | str) -> np.ndarray:
    if Backend(backend) is Backend.RATIONAL:
        return np.full(shape, sympy.Integer(0), dtype=object)
    return np.zeros(shape)


def flip(matrix: np.ndarray) -> np.ndarray:
    """J·M·J with J the anti-diagonal flip (J·v for vectors)."""
    if matrix.ndim == 1:
        return matrix[::-1].copy()
    return matrix[::-1, ::-1].copy()


def flip_matrix(n: int) -> np.ndarray:
    """The anti-diagonal flip J_n as an integer matrix."""
    return np.eye(n, dtype=int)[::-1].copy()


def exactly_equal(a: np.ndarray, b: np.ndarray) -> bool:
    return a.shape == b.shape and bool(np.all(a == b))


def relative_residual(a: np.ndarray, b: np.ndarray) -> float:
    """Frobenius ‖a − b‖ / ‖b‖ in floats (absolute when b vanishes)."""
    fa, fb = to_float_array(a), to_float_array(b)
    scale = np.linalg.norm(fb)
    diff = np.linalg.norm(fa - fb)
    return float(diff / scale) if scale > 0 else float(diff)


# --- Linear algebra ---


def determinant(matrix: np.ndarray) -> Scalar:
    """Determinant (fraction-free Bareiss in the exact backend); empty → 1."""
    n = matrix.shape[0]
    if is_exact(matrix):
        if n == 0:
            return sympy.Integer(1)
        return sympy.Matrix(matrix.tolist()).det(method="bareiss")
    if n == 0:
        return 1.0
    return float(np.linalg.det(matrix))


def bordered_matrix(matrix: np.ndarray, h: np.ndarray, c: np.ndarray) -> np.ndarray:
    """[[0, h*], [c, D]] in the backend of D."""
    n = matrix.shape[0]
    backend = backend_of(matrix)
    out = zeros((n + 1, n + 1), backend)
    out[0, 1:] = as_array(h, backend)
    out[1:, 0] = as_array(c, backend)
    out[1:, 1:] = matrix
    return out


def solve(matrix: np.ndarray, rhs: np.ndarray, name: str = "matrix") -> np.ndarray:
    """Solve ``matrix @ x = rhs``; raises SingularMatrixError when singular.

    The matrix decides the backend; the right-hand side is converted to it.
    """
    if is_exact(matrix):
        m = sympy.Matrix(matrix.tolist())
        if m.det(method="bareiss") == 0:
            raise SingularMatrixError(name)
        b = as_array(rhs, Backend.RATIONAL)
        x = m.LUsolve(sympy.Matrix(b.reshape(matrix.shape[0], -1).tolist()))
        return np.array(x.tolist(), dtype=object).reshape(b.shape)
    try:
        return linalg.solve(matrix, to_float_array(rhs))
    except linalg.LinAlgError as e:
        raise SingularMatrixError(name) from e


@dataclass(frozen=True)
class DefinitenessCheck:
    """Outcome of a positive-definiteness test."""

    positive: bool
    min_pivot: float
    max_diagonal: float
    exact: bool


def _elimination_pivots(matrix: np.ndarray) -> list[sympy.Rational]:
    """Gaussian elimination pivots without pivoting, stopping at the first
    non-positive one. Pivot k equals the ratio of leading minors k and k−1."""
    m = matrix.copy()
    n = m.shape[0]
    pivots = []
    for k in range(n):
        pivot = m[k, k]
        pivots.append(pivot)
        if pivot <= 0:
            break
        for i in range(k + 1, n):
            factor = m[i, k] / pivot
            if factor != 0:
                m[i, k + 1 :] = m[i, k + 1 :] - factor * m[k, k + 1 :]
    return pivots


def check_positive_definite(
    matrix: np.ndarray, tol: float = PIVOT_TOLERANCE, name: str = "matrix"
) -> DefinitenessCheck:
    """Leading-minor test (exact) or pivoted Cholesky with threshold (float).

    In floats the smallest pivot must exceed ``tol`` times the largest
    diagonal entry; anything below is reported as degenerate.
    """
    n = matrix.shape[0]
    if is_exact(matrix):
        pivots = _elimination_pivots(matrix)
        positive = len(pivots) == n and all(p > 0 for p in pivots)
        return DefinitenessCheck(
            positive=positive,
            min_pivot=float(min(pivots)),
            max_diagonal=float(max(matrix[i, i] for i in range(n))),
            exact=True,
        )

    values = np.asarray(matrix, dtype=float)
    diagonal = np.diag(values)
    max_diagonal = float(diagonal.max())
    if max_diagonal <= 0 or not np.all(np.isfinite(values)):
        return DefinitenessCheck(False, float(diagonal.min()), max_diagonal, exact=False)

    factor, _, rank, _ = lapack.dpstrf(values, lower=1)
    pivots = np.diag(factor)[:rank] ** 2
    min_pivot = float(pivots.min()) if rank == n else 0.0
    positive = rank == n and min_pivot > tol * max_diagonal
    if not positive:
        log_warning(
            logger,
            "degenerate",
            f"{name} is indefinite or degenerate within tolerance",
            order=n,
            rank=int(rank),
            min_pivot=f"{min_pivot:.3e}",
        )
    return DefinitenessCheck(positive, min_pivot, max_diagonal, exact=False)


def is_positive_semidefinite(matrix: np.ndarray, tol: float = PIVOT_TOLERANCE) -> bool:
    """Symmetric elimination with diagonal pivoting (exact) or eigenvalues (float)."""
    if is_exact(matrix):
        m = matrix.copy()
        active = list(range(m.shape[0]))
        while active:
            k = max(active, key=lambda i: m[i, i])
            pivot = m[k, k]
            if pivot < 0:
                return False
            if pivot == 0:
                # psd with a zero diagonal forces the whole block to vanish
                return all(m[i, j] == 0 for i in active for j in active)
            active.remove(k)
            for i in active:
                factor = m[i, k] / pivot
                for j in active:
                    m[i, j] = m[i, j] - factor * m[k, j]
        return True

    eigenvalues = linalg.eigvalsh(np.asarray(matrix, dtype=float))
    scale = max(float(np.abs(eigenvalues).max()), np.finfo(float).tiny)
    return bool(eigenvalues.min() >= -tol * scale)


def solve_positive_definite(
    matrix: np.ndarray,
    rhs: np.ndarray,
    name: str = "matrix",
    tol: float = PIVOT_TOLERANCE,
) -> np.ndarray:
    """Solve with a matrix that must pass :func:`check_positive_definite`."""
    check = check_positive_definite(matrix, tol, name)
    if not check.positive:
        raise NotPositiveDefiniteError(name, matrix.shape[0], check.min_pivot)
    if is_exact(matrix):
        return solve(matrix, rhs, name)
    return linalg.cho_solve(linalg.cho_factor(matrix, lower=True), to_float_array(rhs))


# --- Sequences ---


@dataclass(frozen=True)
class ScalarSequence:
    """Immutable finite sequence of scalars with a uniform backend tag."""

    values: tuple
    backend: Backend = Backend.F64

    def __post_init__(self):
        backend = Backend(self.backend)
        values = tuple(parse_scalar(v, backend) for v in self.values)
        if not values:
            raise ValueError(f"{type(self).__name__} needs at least one entry")
        object.__setattr__(self, "backend", backend)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_array(cls: type[S], array: np.ndarray) -> S:
        return cls(tuple(array.tolist()), backend_of(array))

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, index: int) -> Scalar:
        return self.values[index]

    def __iter__(self) -> Iterator[Scalar]:
        return iter(self.values)

    @property
    def exact(self) -> bool:
        return self.backend is Backend.RATIONAL

    def as_array(self) -> np.ndarray:
        if self.exact:
            return np.array(self.values, dtype=object)
        return np.array(self.values, dtype=float)

    def to_float(self: S) -> S:
        return type(self)(tuple(float(v) for v in self.values), Backend.F64)

    def to_exact(self: S) -> S:
        """The same binary values as rationals."""
        if self.exact:
            return self
        return type(self)(tuple(to_exact_array(self.as_array()).tolist()), Backend.RATIONAL)

    def truncate(self: S, length: int) -> S:
        if not 1 <= length <= len(self):
            raise ValueError(f"cannot truncate {len(self)} entries to {length}")
        return type(self)(self.values[:length], self.backend)

    def to_json(self) -> list[float | str]:
        return [format_scalar(v) for v in self.values]

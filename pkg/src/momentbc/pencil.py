"""
Generalized symmetric-definite eigenproblem B f = λ C f.

C = L L* is factored, the symmetric matrix L⁻¹ B L⁻* is diagonalized by
cyclic Jacobi rotations, and eigenvectors are mapped back with L⁻*, which
makes them C-orthonormal. Ill-conditioned C can be re-solved in mpmath.
"""

from dataclasses import dataclass, field

import mpmath
import numpy as np
from scipy import linalg

from momentbc.backend import (
    check_positive_definite,
    is_exact,
    relative_residual,
    to_float_array,
    to_mpf,
)
from momentbc.config import DEFAULT_TOLERANCES, Tolerances
from momentbc.errors import NoConvergenceError, NotPositiveDefiniteError
from momentbc.logging import get_logger, log_event, log_warning

logger = get_logger(__name__)


def _symmetrize(matrix: np.ndarray, name: str, tol: float) -> np.ndarray:
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError(f"{name} must be square, got shape {matrix.shape}")
    if is_exact(matrix):
        if not np.array_equal(matrix, matrix.T):
            raise ValueError(f"{name} is not symmetric")
        return matrix
    asymmetry = relative_residual(matrix, matrix.T)
    if asymmetry > tol:
        raise ValueError(f"{name} is not symmetric (relative asymmetry {asymmetry:.3e})")
    return (matrix + matrix.T) / 2


@dataclass(frozen=True, eq=False)
class PencilProblem:
    """Symmetric pair (B, C); C must be positive definite to be solvable.

    Exact (object-dtype) matrices are kept as given so the extended-precision
    path can start from the exact data.
    """

    B: np.ndarray = field(repr=False)
    C: np.ndarray = field(repr=False)
    symmetry_tol: float = DEFAULT_TOLERANCES.symmetry

    def __post_init__(self):
        B = _symmetrize(np.asarray(self.B), "B", self.symmetry_tol)
        C = _symmetrize(np.asarray(self.C), "C", self.symmetry_tol)
        if B.shape != C.shape:
            raise ValueError(f"B is {B.shape} but C is {C.shape}")
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)

    @property
    def order(self) -> int:
        return self.B.shape[0]

    def transformed(self, M: np.ndarray) -> "PencilProblem":
        """The congruent pencil (M B M*, M C M*)."""
        return PencilProblem(M @ self.B @ M.T, M @ self.C @ M.T, self.symmetry_tol)


@dataclass(frozen=True, eq=False)
class EigenSolution:
    """Ascending eigenvalues and C-normalized eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray = field(repr=False)
    condition: float = 1.0
    sweeps: int = 0
    # mpmath copies of the eigenvectors when the extended path ran
    precise_eigenvectors: np.ndarray | None = field(default=None, repr=False)

    @property
    def extended_precision(self) -> bool:
        return self.precise_eigenvectors is not None

    def residuals(self, p: PencilProblem) -> np.ndarray:
        """‖B f_k − λ_k C f_k‖ / ‖B‖ per eigenpair."""
        B, C = to_float_array(p.B), to_float_array(p.C)
        scale = max(np.linalg.norm(B), np.finfo(float).tiny)
        diff = B @ self.eigenvectors - (C @ self.eigenvectors) * self.eigenvalues
        return np.linalg.norm(diff, axis=0) / scale

    def gram(self, p: PencilProblem) -> np.ndarray:
        """(C f_k, f_l); the identity for an exact solution."""
        C = to_float_array(p.C)
        return self.eigenvectors.T @ C @ self.eigenvectors


# --- Symmetric eigensolver ---


def jacobi_eigensolve(
    matrix: np.ndarray, tol: float, max_sweeps: int = DEFAULT_TOLERANCES.max_sweeps
) -> tuple[np.ndarray, np.ndarray, int]:
    """Cyclic Jacobi rotations for a real symmetric matrix.

    Sweeps visit (p, q) pairs row by row. Converged when the off-diagonal
    Frobenius norm is at most ``tol`` times the full Frobenius norm.

    Returns:
        (diagonal, rotation matrix V with A = V diag V*, sweeps used)
    """
    a = np.array(matrix, dtype=float, copy=True)
    n = a.shape[0]
    v = np.eye(n)
    scale = np.linalg.norm(a)

    for sweep in range(max_sweeps + 1):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= tol * scale:
            return np.diag(a).copy(), v, sweep
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + np.hypot(theta, 1.0))
                c = 1.0 / np.hypot(t, 1.0)
                s = t * c

                col_p, col_q = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p, row_q = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = a[q, p] = 0.0

                vec_p, vec_q = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vec_p - s * vec_q
                v[:, q] = s * vec_p + c * vec_q

    raise NoConvergenceError(max_sweeps, float(off / scale))


# --- Ordering ---


def sign_normalize(vectors: np.ndarray) -> np.ndarray:
    """Flip each column so its first nonzero component is positive."""
    out = vectors.copy()
    for k in range(out.shape[1]):
        column = out[:, k]
        threshold = 1e-12 * max(float(np.max(np.abs(column.astype(float)))), np.finfo(float).tiny)
        for value in column:
            if abs(float(value)) > threshold:
                if value < 0:
                    out[:, k] = -column
                break
    return out


def _ordering(eigenvalues: np.ndarray, vectors: np.ndarray) -> list[int]:
    keys = [(float(eigenvalues[k]), tuple(float(x) for x in vectors[:, k])) for k in range(len(eigenvalues))]
    return sorted(range(len(eigenvalues)), key=lambda k: keys[k])


# --- Solvers ---


def _solve_double(B: np.ndarray, C: np.ndarray, tol: Tolerances) -> tuple[np.ndarray, np.ndarray, int]:
    factor = linalg.cholesky(C, lower=True)
    half = linalg.solve_triangular(factor, B, lower=True)
    reduced = linalg.solve_triangular(factor, half.T, lower=True)
    reduced = (reduced + reduced.T) / 2
    eigenvalues, rotations, sweeps = jacobi_eigensolve(reduced, tol.eigen, tol.max_sweeps)
    vectors = linalg.solve_triangular(factor.T, rotations, lower=False)
    return eigenvalues, vectors, sweeps


def _solve_extended(p: PencilProblem, tol: Tolerances) -> tuple[np.ndarray, np.ndarray]:
    """Same reduction in mpmath at ``tol.extended_dps`` digits."""
    n = p.order
    with mpmath.workdps(tol.extended_dps):
        B = mpmath.matrix([[to_mpf(p.B[i, j]) for j in range(n)] for i in range(n)])
        C = mpmath.matrix([[to_mpf(p.C[i, j]) for j in range(n)] for i in range(n)])
        factor = mpmath.cholesky(C)
        inverse = mpmath.inverse(factor)
        reduced = inverse * B * inverse.T
        reduced = (reduced + reduced.T) / 2
        eigenvalues, rotations = mpmath.eigsy(reduced)
        vectors = inverse.T * rotations
        values = np.array([eigenvalues[k] for k in range(n)], dtype=object)
        precise = np.array([[vectors[i, k] for k in range(n)] for i in range(n)], dtype=object)
    return values, precise


def solve_pencil(
    p: PencilProblem,
    tol: float | None = None,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
    extended: bool | None = None,
) -> EigenSolution:
    """Solve B f = λ C f for a symmetric-definite pencil.

    Args:
        p: the pencil
        tol: rotation convergence tolerance (overrides ``tolerances.eigen``)
        tolerances: pivot, condition and sweep limits
        extended: True forces the mpmath path, False forbids it, None uses it
            only when the condition estimate of C exceeds the limit

    Raises:
        NotPositiveDefiniteError: C fails the pivot test
        NoConvergenceError: the rotation sweeps hit their cap
    """
    if tol is not None:
        tolerances = tolerances.with_overrides(tol)

    n = p.order
    check = check_positive_definite(p.C, tolerances.pivot, name=f"C^{n}")
    if not check.positive:
        raise NotPositiveDefiniteError(f"C^{n}", n, check.min_pivot)

    B, C = to_float_array(p.B), to_float_array(p.C)
    condition = float(np.linalg.cond(C))
    ill_conditioned = condition > tolerances.condition_limit
    if ill_conditioned:
        log_warning(
            logger,
            "ill-conditioned",
            f"C^{n} condition estimate exceeds limit",
            condition=f"{condition:.3e}",
            limit=f"{tolerances.condition_limit:.1e}",
        )

    use_extended = ill_conditioned if extended is None else extended
    if use_extended:
        log_event(logger, "extended-precision pencil solve", order=n, dps=tolerances.extended_dps)
        values, precise = _solve_extended(p, tolerances)
        precise = sign_normalize(precise)
        eigenvalues = np.array([float(v) for v in values])
        vectors = to_float_array(precise)
        sweeps = 0
    else:
        eigenvalues, vectors, sweeps = _solve_double(B, C, tolerances)
        vectors = sign_normalize(vectors)
        precise = None

    order = _ordering(eigenvalues, vectors)
    eigenvalues = eigenvalues[order]
    vectors = vectors[:, order]
    if precise is not None:
        precise = precise[:, order]

    logger.debug(f"pencil of order {n} solved in {sweeps} sweeps")
    return EigenSolution(eigenvalues, vectors, condition, sweeps, precise)

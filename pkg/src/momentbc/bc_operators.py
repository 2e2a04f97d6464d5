"""
Boundary-control operators assembled from response data.

Indexing convention: with c_{i,j} = ∫𝒯_i𝒯_j dρ (Chebyshev indices, 1-based),
the connecting operator is C^T[l, m] = c_{T-l, T-m} (0-based l, m). The
product rule 𝒯_i𝒯_j = Σ_k 𝒯_{|i-j|+1+2k} turns every c_{i,j} into a sum of
response entries, so C^T only needs r_0..r_{2T-2}.
"""

from dataclasses import dataclass, field

import numpy as np
import sympy

from momentbc.backend import (
    Backend,
    check_positive_definite,
    is_exact,
    relative_residual,
    to_exact_array,
    to_float_array,
    zeros,
)
from momentbc.chebyshev import (
    ResponseVector,
    cheb_vector,
    lambda_matrix,
    moments_to_response,
    response_to_moments,
)
from momentbc.config import PIVOT_TOLERANCE, SYMMETRY_TOLERANCE
from momentbc.measure import DiscreteMeasure
from momentbc.moments import MomentSequence, Orientation, hankel_block


def chebyshev_gram(values: np.ndarray, i: int, j: int):
    """c_{i,j} = ∫𝒯_i𝒯_j dρ from response entries (zero if either index is 0)."""
    zero = values[0] * 0
    if i == 0 or j == 0:
        return zero
    base = abs(i - j)
    total = zero
    for k in range(min(i, j)):
        total = total + values[base + 2 * k]
    return total


def _symmetrized(entries: np.ndarray, what: str) -> np.ndarray:
    """Exact matrices must come out symmetric; float ones up to rounding."""
    if is_exact(entries):
        if not np.array_equal(entries, entries.T):
            raise RuntimeError(f"{what} assembled asymmetric")
        return entries
    if relative_residual(entries, entries.T) > SYMMETRY_TOLERANCE:
        raise RuntimeError(f"{what} assembled asymmetric")
    return (entries + entries.T) / 2


@dataclass(frozen=True, eq=False)
class ConnectingOperator:
    """C^T, the Gram matrix of states reachable by time T."""

    T: int
    entries: np.ndarray = field(repr=False)

    @property
    def backend(self) -> Backend:
        return Backend.RATIONAL if is_exact(self.entries) else Backend.F64

    def is_positive_definite(self, tol: float = PIVOT_TOLERANCE) -> bool:
        return check_positive_definite(self.entries, tol, name=f"C^{self.T}").positive


@dataclass(frozen=True, eq=False)
class CompanionOperator:
    """B^N, the λ-weighted Gram matrix paired with C^N in the pencil."""

    N: int
    entries: np.ndarray = field(repr=False)


@dataclass(frozen=True, eq=False)
class ResponseMatrix:
    """R^T: strictly lower-triangular Toeplitz, entry(i, j) = r_{i-j-1}."""

    T: int
    entries: np.ndarray = field(repr=False)


def connecting_operator(r: ResponseVector, T: int) -> ConnectingOperator:
    if T < 1:
        raise ValueError(f"order must be positive, got {T}")
    r.require(2 * T - 1)
    values = r.as_array()
    entries = zeros((T, T), r.backend)
    for l in range(T):
        for m in range(T):
            entries[l, m] = chebyshev_gram(values, T - l, T - m)
    entries = _symmetrized(entries, f"C^{T}")
    _check_factorization(entries, r, T, 0, f"C^{T}")
    return ConnectingOperator(T, entries)


def connecting_from_measure(mu: DiscreteMeasure, T: int) -> ConnectingOperator:
    """C^T by summing 𝒯_{T-l}(λ_k)𝒯_{T-m}(λ_k) w_k over the atoms."""
    if T < 1:
        raise ValueError(f"order must be positive, got {T}")
    columns = [cheb_vector(T, a) for a in mu.atoms]
    values = np.column_stack(columns)
    weights = mu.weights_array()
    entries = (values * weights) @ values.T
    return ConnectingOperator(T, entries)


def companion_operator(r: ResponseVector, N: int) -> CompanionOperator:
    """B^N[p, q] = c_{N-p, N+1-q} + c_{N-p, N-1-q} (0-based p, q).

    The entries are those of the order-(N+1) connecting operator; the one
    corner that would need r_{2N} is never read.
    """
    if N < 1:
        raise ValueError(f"order must be positive, got {N}")
    r.require(2 * N)
    values = r.as_array()
    entries = zeros((N, N), r.backend)
    for p in range(N):
        row = N - p
        for q in range(N):
            entries[p, q] = chebyshev_gram(values, row, N + 1 - q) + chebyshev_gram(
                values, row, N - 1 - q
            )
    entries = _symmetrized(entries, f"B^{N}")
    _check_factorization(entries, r, N, 1, f"B^{N}")
    return CompanionOperator(N, entries)


def response_matrix(r: ResponseVector, T: int) -> ResponseMatrix:
    if T < 1:
        raise ValueError(f"order must be positive, got {T}")
    if T > 1:
        r.require(T - 1)
    values = r.as_array()
    entries = zeros((T, T), r.backend)
    for i in range(1, T):
        for j in range(i):
            entries[i, j] = values[i - j - 1]
    return ResponseMatrix(T, entries)


def apply_response(r: ResponseVector, f: np.ndarray, T: int | None = None) -> np.ndarray:
    """(R^T f)_t = Σ_{j<t} r_{t-1-j} f_j, the boundary trace of control f."""
    T = len(f) if T is None else T
    if T > 1:
        r.require(T - 1)
    values = r.as_array()
    controls = np.zeros(T, dtype=f.dtype)
    controls[: min(T, len(f))] = f[:T]
    if r.exact or is_exact(f):
        trace = np.empty(T, dtype=object)
        for t in range(T):
            trace[t] = sum((values[t - 1 - j] * controls[j] for j in range(t)), sympy.Integer(0))
        return trace
    trace = np.zeros(T)
    if T > 1:
        trace[1:] = np.convolve(values[: T - 1], controls.astype(float))[: T - 1]
    return trace


# --- Factorization through Hankel blocks ---


def hankel_factorization(s: MomentSequence, N: int, shift: int) -> np.ndarray:
    """Λ̃_N S_shift^N Λ̃_N* with the flipped Hankel block.

    Float blocks go through the integer Λ̃_N exactly and are rounded once.
    """
    tilde = lambda_matrix(N).tilde()
    hankel = hankel_block(s, shift, N, Orientation.FLIPPED).entries
    if s.exact:
        return tilde @ hankel @ tilde.T
    return to_float_array(tilde @ to_exact_array(hankel) @ tilde.T)


def _check_factorization(entries: np.ndarray, r: ResponseVector, N: int, shift: int, what: str) -> None:
    """Exact operators must equal Λ̃ S_shift Λ̃* of the moments behind r."""
    if not r.exact:
        return
    s = response_to_moments(r.truncate(2 * N - 1 + shift))
    if not np.array_equal(entries, hankel_factorization(s, N, shift)):
        raise RuntimeError(f"{what} disagrees with its Hankel factorization")


def factorization_residuals(s: MomentSequence, N: int) -> tuple[float, float]:
    """Relative residuals of C^N = Λ̃S₀Λ̃* and B^N = Λ̃S₁Λ̃*."""
    r = moments_to_response(s)
    c = connecting_operator(r, N).entries
    b = companion_operator(r, N).entries
    return (
        relative_residual(c, hankel_factorization(s, N, 0)),
        relative_residual(b, hankel_factorization(s, N, 1)),
    )

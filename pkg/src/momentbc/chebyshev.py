"""
Chebyshev polynomials of the second kind and the moment/response transform.

𝒯_t solves 𝒯_{t+1} + 𝒯_{t-1} = λ𝒯_t with 𝒯_0 = 0, 𝒯_1 = 1. Row t-1 of the
unit lower-triangular integer matrix Λ_n holds the monomial coefficients of
𝒯_t, so r = Λ_n s maps moments to the response vector (r_{t-1} = ∫𝒯_t dρ).
"""

from dataclasses import dataclass, field
from functools import lru_cache
from typing import TypeVar

import numpy as np
import sympy
from scipy import linalg
from scipy.special import comb

from momentbc.backend import ScalarSequence, flip, to_float_array
from momentbc.errors import InsufficientDataError
from momentbc.moments import MomentSequence

X = TypeVar("X")


def cheb_second_kind(t: int, lam: X) -> X:
    """Value of 𝒯_t at ``lam`` by the three-term recursion."""
    if t < 0:
        raise ValueError(f"index must be non-negative, got {t}")
    previous, current = lam * 0, lam * 0 + 1
    if t == 0:
        return previous
    for _ in range(t - 1):
        previous, current = current, lam * current - previous
    return current


def cheb_derivative(t: int, lam: X) -> X:
    """Value of 𝒯'_t at ``lam``: 𝒯'_{t+1} = 𝒯_t + λ𝒯'_t − 𝒯'_{t-1}."""
    if t < 0:
        raise ValueError(f"index must be non-negative, got {t}")
    zero = lam * 0
    value_prev, value = zero, zero + 1
    deriv_prev, deriv = zero, zero
    for _ in range(max(t - 1, 0)):
        value_prev, value, deriv_prev, deriv = (
            value,
            lam * value - value_prev,
            deriv,
            value + lam * deriv - deriv_prev,
        )
    return deriv


def cheb_values(T: int, lam: X) -> list[X]:
    """[𝒯_1(λ), …, 𝒯_T(λ)]."""
    values = []
    previous, current = lam * 0, lam * 0 + 1
    for _ in range(T):
        values.append(current)
        previous, current = current, lam * current - previous
    return values


def cheb_vector(T: int, lam) -> np.ndarray:
    """(𝒯_T(λ), …, 𝒯_1(λ)), the control-space image of the point λ."""
    values = cheb_values(T, lam)[::-1]
    if isinstance(lam, sympy.Rational):
        return np.array(values, dtype=object)
    return np.array(values, dtype=float)


# --- Λ_n ---


@lru_cache(maxsize=64)
def _lambda_rows(n: int) -> tuple[tuple[int, ...], ...]:
    rows = [[0] * n for _ in range(n)]
    rows[0][0] = 1
    if n > 1:
        rows[1][1] = 1
    for t in range(2, n):
        # 𝒯_{t+1} = λ𝒯_t − 𝒯_{t-1}
        for j in range(n):
            shifted = rows[t - 1][j - 1] if j > 0 else 0
            rows[t][j] = shifted - rows[t - 2][j]
    return tuple(tuple(row) for row in rows)


def lambda_closed_form(n: int) -> np.ndarray:
    """Binomial-sign closed form of Λ_n with 0-based indices."""
    entries = np.zeros((n, n), dtype=object)
    for i in range(n):
        for j in range(i + 1):
            if (i + j) % 2 == 0:
                k = (i + j) // 2
                entries[i, j] = int(comb(k, j, exact=True)) * (-1) ** (k + j)
            else:
                entries[i, j] = 0
    for i in range(n):
        for j in range(i + 1, n):
            entries[i, j] = 0
    return entries


@dataclass(frozen=True, eq=False)
class LambdaMatrix:
    """Λ_n with exact integer entries."""

    n: int
    entries: np.ndarray = field(repr=False)

    def tilde(self) -> np.ndarray:
        """Λ̃_n = J Λ_n J (upper-triangular, unit diagonal)."""
        return flip(self.entries)

    def inverse(self) -> np.ndarray:
        """Λ_n⁻¹, again an integer matrix."""
        n = self.n
        inverse = np.zeros((n, n), dtype=object)
        for col in range(n):
            for i in range(n):
                value = 1 if i == col else 0
                for j in range(i):
                    value -= self.entries[i, j] * inverse[j, col]
                inverse[i, col] = value
        return inverse


def lambda_matrix(n: int) -> LambdaMatrix:
    """Λ_n from coefficient propagation, verified against the closed form."""
    if n < 1:
        raise ValueError(f"order must be positive, got {n}")
    entries = np.array(_lambda_rows(n), dtype=object)
    if not np.array_equal(entries, lambda_closed_form(n)):
        raise RuntimeError(f"Λ_{n} recursion disagrees with its closed form")
    return LambdaMatrix(n, entries)


# --- Response vectors ---


class ResponseVector(ScalarSequence):
    """Response entries r_0..r_{T-1}."""

    def require(self, count: int) -> None:
        if len(self) < count:
            raise InsufficientDataError(count, len(self), "response entries")


def moments_to_response(s: MomentSequence) -> ResponseVector:
    """r = Λ_n s with n = len(s).

    Float moments are multiplied exactly as the rationals they represent and
    the response is rounded once.
    """
    lam = lambda_matrix(len(s)).entries
    if s.exact:
        return ResponseVector.from_array(lam @ s.as_array())
    exact = lam @ s.to_exact().as_array()
    return ResponseVector.from_array(to_float_array(exact))


def response_to_moments(r: ResponseVector) -> MomentSequence:
    """Inverse of :func:`moments_to_response` (unit lower-triangular solve)."""
    n = len(r)
    lam = lambda_matrix(n).entries
    values = r.as_array()
    if r.exact:
        moments = np.empty(n, dtype=object)
        for i in range(n):
            moments[i] = values[i] - sum((lam[i, j] * moments[j] for j in range(i)), sympy.Integer(0))
        return MomentSequence.from_array(moments)
    moments = linalg.solve_triangular(lam.astype(float), values, lower=True, unit_diagonal=True)
    return MomentSequence.from_array(moments)


# --- Boundary vectors ---


@dataclass(frozen=True, eq=False)
class BoundaryVectors:
    """Γ_T = (𝒯_T(0), …, 𝒯_1(0)) and Ω_T = (𝒯'_T(0), …, 𝒯'_1(0))."""

    T: int
    gamma: np.ndarray
    omega: np.ndarray

    @property
    def delta(self) -> np.ndarray:
        # the Hamburger criterion's Δ_T is Ω_T
        return self.omega


def boundary_vectors(T: int) -> BoundaryVectors:
    if T < 1:
        raise ValueError(f"order must be positive, got {T}")
    gamma = [cheb_second_kind(t, 0) for t in range(T, 0, -1)]
    omega = [cheb_derivative(t, 0) for t in range(T, 0, -1)]
    return BoundaryVectors(T, np.array(gamma, dtype=int), np.array(omega, dtype=int))

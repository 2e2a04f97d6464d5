"""
Discrete-time Jacobi dynamical system and its spectral data.

The wave field obeys

    v_{n,t+1} = a_n v_{n+1,t} + a_{n-1} v_{n-1,t} + b_n v_{n,t} − v_{n,t-1}

with zero initial data, boundary control v_{0,t} = f_t and (Dirichlet variant)
v_{N+1,t} = 0. This module is the independent oracle for the rest of the
package: responses, Dirichlet spectra and φ/ξ solutions are computed here
from the coefficients alone.
"""

from dataclasses import dataclass, field

import numpy as np
import pandas as pd
import sympy
from scipy import linalg

from momentbc.backend import Backend, ScalarSequence, Scalar, format_scalar, parse_scalar, zeros
from momentbc.chebyshev import ResponseVector
from momentbc.config import CONSISTENCY_TOLERANCE
from momentbc.errors import NoConvergenceError, NotPositiveDefiniteError
from momentbc.logging import get_logger, log_warning
from momentbc.measure import DiscreteMeasure
from momentbc.moments import MomentSequence

logger = get_logger(__name__)


class ControlVector(ScalarSequence):
    """Boundary control f_0..f_{T-1}."""

    @classmethod
    def delta(cls, backend: Backend | str = Backend.F64) -> "ControlVector":
        return cls((1,), backend)

    def extended(self) -> np.ndarray:
        """(f_{-1}, f_0, …, f_{T-1}, f_T) with the zero extension."""
        values = self.as_array()
        zero = values[0] * 0
        return np.concatenate([[zero], values, [zero]]).astype(values.dtype)


@dataclass(frozen=True, eq=False)
class JacobiCoefficients:
    """a_0 = 1, a_1..a_{N-1} > 0 and b_1..b_N.

    Coefficients beyond the stored ones read as the free values a_n = 1,
    b_n = 0; only lattices wider than N (and φ_{N+1}) ever ask for them.
    """

    a: tuple
    b: tuple
    backend: Backend = Backend.F64

    def __post_init__(self):
        backend = Backend(self.backend)
        a = tuple(parse_scalar(x, backend) for x in self.a)
        b = tuple(parse_scalar(x, backend) for x in self.b)
        if not b:
            raise ValueError("a Jacobi matrix needs at least one diagonal entry")
        if len(a) != len(b):
            raise ValueError(f"expected {len(b)} off-diagonal entries (a_0..a_{len(b) - 1}), got {len(a)}")
        if a[0] != 1:
            raise ValueError("a_0 must be 1")
        if any(x <= 0 for x in a):
            raise ValueError("off-diagonal entries must be positive")
        object.__setattr__(self, "backend", backend)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @classmethod
    def free(cls, N: int, backend: Backend | str = Backend.F64) -> "JacobiCoefficients":
        return cls((1,) * N, (0,) * N, backend)

    @property
    def N(self) -> int:
        return len(self.b)

    @property
    def exact(self) -> bool:
        return self.backend is Backend.RATIONAL

    def coupling(self, n: int) -> Scalar:
        """a_n (free value 1 past the stored range)."""
        if n < len(self.a):
            return self.a[n]
        return parse_scalar(1, self.backend)

    def diagonal(self, n: int) -> Scalar:
        """b_n for n ≥ 1 (free value 0 past the stored range)."""
        if 1 <= n <= len(self.b):
            return self.b[n - 1]
        return parse_scalar(0, self.backend)

    def truncate(self, N: int) -> "JacobiCoefficients":
        if not 1 <= N <= self.N:
            raise ValueError(f"cannot truncate order {self.N} to {N}")
        return JacobiCoefficients(self.a[:N], self.b[:N], self.backend)

    def extend(self, a_tail: tuple, b_tail: tuple) -> "JacobiCoefficients":
        """Append a_N, … and b_{N+1}, … (same count)."""
        return JacobiCoefficients(self.a + tuple(a_tail), self.b + tuple(b_tail), self.backend)

    def to_float(self) -> "JacobiCoefficients":
        return JacobiCoefficients(tuple(map(float, self.a)), tuple(map(float, self.b)))

    def block(self, N: int | None = None) -> np.ndarray:
        """The N×N tridiagonal matrix A^N in floats."""
        N = self.N if N is None else N
        return (
            np.diag([float(self.diagonal(n)) for n in range(1, N + 1)])
            + np.diag([float(self.coupling(n)) for n in range(1, N)], 1)
            + np.diag([float(self.coupling(n)) for n in range(1, N)], -1)
        )

    def to_dict(self) -> dict:
        return {
            "a": [format_scalar(x) for x in self.a],
            "b": [format_scalar(x) for x in self.b],
        }


@dataclass(frozen=True, eq=False)
class WaveField:
    """Grid v[n, t] for n = 0..L+1 and t = −1..T (column index t+1)."""

    values: np.ndarray = field(repr=False)
    control: ControlVector
    T: int
    sites: int
    dirichlet: bool

    def at(self, n: int, t: int) -> Scalar:
        return self.values[n, t + 1]

    def boundary_trace(self) -> np.ndarray:
        """v_{1,t} for t = 1..T."""
        return self.values[1, 2 : self.T + 2].copy()

    def state(self, t: int, N: int | None = None) -> np.ndarray:
        """(v_{1,t}, …, v_{N,t})."""
        N = self.sites if N is None else N
        return self.values[1 : N + 1, t + 1].copy()

    def finite_speed_holds(self) -> bool:
        """v_{n,t} = 0 whenever n > t."""
        for n in range(1, self.sites + 2):
            for t in range(-1, min(n, self.T + 1)):
                if self.at(n, t) != 0:
                    return False
        return True

    def to_frame(self) -> pd.DataFrame:
        """One row per time t ≥ 0, one column per site."""
        frame = pd.DataFrame(
            {f"v_{n}": [float(self.at(n, t)) for t in range(self.T + 1)] for n in range(self.sites + 2)}
        )
        frame.insert(0, "t", range(self.T + 1))
        return frame


def simulate(
    J: JacobiCoefficients,
    f: ControlVector,
    T: int,
    dirichlet: bool = True,
) -> WaveField:
    """Explicit time stepping up to time T.

    With ``dirichlet=False`` the lattice is widened to max(N, T) + 1 sites so
    the far boundary is never reached; the extra sites use free coefficients.
    """
    if T < 1:
        raise ValueError(f"horizon must be positive, got {T}")
    L = J.N if dirichlet else max(J.N, T) + 1
    backend = Backend.RATIONAL if J.exact and f.exact else Backend.F64

    def coefficient(value: Scalar) -> Scalar:
        return value if backend is Backend.RATIONAL else float(value)

    a = [coefficient(J.coupling(n)) for n in range(L + 1)]
    b = [coefficient(J.diagonal(n)) for n in range(L + 1)]

    grid = zeros((L + 2, T + 2), backend)
    for t, value in enumerate(f.values[: T + 1]):
        grid[0, t + 1] = coefficient(value)

    # column t+1 holds time t
    for t in range(T):
        for n in range(1, L + 1):
            grid[n, t + 2] = (
                a[n] * grid[n + 1, t + 1]
                + a[n - 1] * grid[n - 1, t + 1]
                + b[n] * grid[n, t + 1]
                - grid[n, t]
            )

    return WaveField(grid, f, T, L, dirichlet)


def response_by_simulation(J: JacobiCoefficients, T: int) -> ResponseVector:
    """r_{t-1} = v^δ_{1,t}, t = 1..T, for the Dirichlet system."""
    field_ = simulate(J, ControlVector.delta(J.backend), T, dirichlet=True)
    return ResponseVector.from_array(field_.boundary_trace())


# --- Polynomial solutions ---


@dataclass(frozen=True)
class PolynomialSolutions:
    """φ_0..φ_n and ξ_0..ξ_n at one spectral point."""

    lam: Scalar
    phi: tuple
    xi: tuple

    def phi_vector(self, n: int) -> np.ndarray:
        """(φ_1, …, φ_n)."""
        values = self.phi[1 : n + 1]
        return np.array(values, dtype=object if isinstance(self.lam, sympy.Rational) else float)


def phi_xi(J: JacobiCoefficients, lam: Scalar, nmax: int) -> PolynomialSolutions:
    """a_n y_{n+1} = (λ − b_n) y_n − a_{n-1} y_{n-1} with (φ_0, φ_1) = (0, 1)
    and (ξ_0, ξ_1) = (−1, 0). a_N reads as 1 when not stored."""
    if nmax > J.N + 1:
        raise ValueError(f"nmax must not exceed N+1 = {J.N + 1}, got {nmax}")
    if nmax < 0:
        raise ValueError(f"nmax must be non-negative, got {nmax}")
    exact = isinstance(lam, sympy.Rational) and J.exact
    lam = lam if exact else float(lam)

    def coefficient(value: Scalar) -> Scalar:
        return value if exact else float(value)

    zero = lam * 0
    phi = [zero, zero + 1]
    xi = [zero - 1, zero]
    for n in range(1, nmax):
        a_n, a_prev, b_n = coefficient(J.coupling(n)), coefficient(J.coupling(n - 1)), coefficient(J.diagonal(n))
        phi.append(((lam - b_n) * phi[n] - a_prev * phi[n - 1]) / a_n)
        xi.append(((lam - b_n) * xi[n] - a_prev * xi[n - 1]) / a_n)
    return PolynomialSolutions(lam, tuple(phi[: nmax + 1]), tuple(xi[: nmax + 1]))


# --- Spectral data ---


def dirichlet_spectral_data(
    J: JacobiCoefficients,
    N: int | None = None,
    boundary_shift: float = 0.0,
) -> DiscreteMeasure:
    """Eigenvalues of A^N and weights 1/ρ_k with ρ_k = Σ_{i≤N} φ_i(λ_k)².

    ``boundary_shift`` h replaces b_N by b_N + h, a different self-adjoint
    condition at the far end.
    """
    N = J.N if N is None else N
    if not 1 <= N <= J.N:
        raise ValueError(f"order must be in 1..{J.N}, got {N}")
    system = J.truncate(N).to_float()
    if boundary_shift:
        shifted = list(system.b)
        shifted[-1] += boundary_shift
        system = JacobiCoefficients(system.a, tuple(shifted))

    diagonal = np.array(system.b, dtype=float)
    off_diagonal = np.array(system.a[1:], dtype=float)
    try:
        eigenvalues = linalg.eigh_tridiagonal(diagonal, off_diagonal, eigvals_only=True)
    except linalg.LinAlgError as e:
        raise NoConvergenceError(0, float("nan")) from e

    norming = []
    for lam in eigenvalues:
        solutions = phi_xi(system, float(lam), N + 1)
        values = np.array(solutions.phi[1 : N + 1], dtype=float)
        rho = float(values @ values)
        root_residual = abs(solutions.phi[N + 1])
        if root_residual > CONSISTENCY_TOLERANCE * np.sqrt(rho) * (1.0 + abs(lam)):
            log_warning(
                logger,
                "consistency",
                "Dirichlet eigenvalue is not a root of φ_{N+1} within tolerance",
                eigenvalue=float(lam),
                residual=f"{root_residual:.3e}",
            )
        norming.append(rho)

    return DiscreteMeasure(tuple(eigenvalues.tolist()), tuple(1.0 / rho for rho in norming))


def jacobi_from_moments(s: MomentSequence, N: int) -> JacobiCoefficients:
    """Recurrence coefficients of the orthogonal polynomials of the moment
    functional ⟨λ^i, λ^j⟩ = s_{i+j}, by orthogonalizing monomials.

    The monic recurrence π_{k+1} = (λ − β_k)π_k − γ_k π_{k-1} gives
    b_{k+1} = β_k and a_k = √γ_k. Exact moments keep β, γ exact until the
    square root; the result is always in floats.
    """
    if N < 1:
        raise ValueError(f"order must be positive, got {N}")
    s.require(2 * N)
    moments = list(s.values)
    zero = moments[0] * 0

    def inner(p: list, q: list) -> Scalar:
        total = zero
        for i, pi in enumerate(p):
            if pi == 0:
                continue
            for j, qj in enumerate(q):
                if qj != 0:
                    total = total + pi * qj * moments[i + j]
        return total

    previous: list = [zero]
    current: list = [zero + 1]
    norm = inner(current, current)
    previous_norm = None
    betas, gammas = [], []
    for k in range(N):
        if not norm > 0:
            raise NotPositiveDefiniteError(f"S0^{k + 1}", k + 1, float(norm))
        shifted = [zero] + current
        beta = inner(shifted, current) / norm
        betas.append(beta)
        if k == N - 1:
            break
        gamma = norm / previous_norm if previous_norm is not None else zero
        padded_current = current + [zero]
        padded_previous = previous + [zero] * (len(shifted) - len(previous))
        following = [
            shifted[i] - beta * padded_current[i] - gamma * padded_previous[i] for i in range(len(shifted))
        ]
        previous, current = current, following
        previous_norm, norm = norm, inner(following, following)
        gammas.append(norm / previous_norm)

    if any(not g > 0 for g in gammas):
        raise NotPositiveDefiniteError(f"S0^{N}", N)
    a = (1.0,) + tuple(float(sympy.sqrt(g)) if s.exact else float(np.sqrt(g)) for g in gammas)
    return JacobiCoefficients(a, tuple(float(beta) for beta in betas))


# --- Control operator ---


def control_to_state(J: JacobiCoefficients, f: ControlVector, N: int) -> np.ndarray:
    """W^N f = (v^f_{1,N}, …, v^f_{N,N})."""
    if len(f) != N:
        raise ValueError(f"control must have {N} entries, got {len(f)}")
    field_ = simulate(J.truncate(N), f, N, dirichlet=True)
    return field_.state(N, N)


def control_operator_matrix(J: JacobiCoefficients, N: int) -> np.ndarray:
    """W^N as a matrix: column j is the state reached by the impulse at time j."""
    columns = []
    for j in range(N):
        impulse = [0] * N
        impulse[j] = 1
        columns.append(control_to_state(J, ControlVector(tuple(impulse), J.backend), N))
    return np.column_stack(columns)

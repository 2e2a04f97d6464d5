"""
De Branges space of the system at time N, realized on polynomials.

An element is a polynomial of degree ≤ N−1 written either in the control
basis, F(λ) = Σ_{k=1}^N 𝒯_k(λ) f_{N-k}, or in monomials, F(λ) = Σ_j α_j λ^j.
Row k-1 of Λ_N holds the monomial coefficients of 𝒯_k, so α = Λ_N* J f.
The scalar product is (C^N f, g) = Σ s_{i+j} α_i β_j and its reproducing
kernel is K_N(z, λ) = ((C^N)⁻¹ 𝒯(z), 𝒯(λ)) with 𝒯(z) = (𝒯_N(z), …, 𝒯_1(z)).
"""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import sympy

from momentbc.backend import (
    Backend,
    Scalar,
    as_array,
    bordered_matrix,
    determinant,
    is_exact,
    parse_scalar,
    solve,
    solve_positive_definite,
    to_float_array,
)
from momentbc.bc_operators import ConnectingOperator, connecting_operator
from momentbc.chebyshev import cheb_vector, lambda_matrix, moments_to_response
from momentbc.config import CONSISTENCY_TOLERANCE
from momentbc.errors import SingularMatrixError
from momentbc.jacobi_sim import ControlVector, JacobiCoefficients, phi_xi
from momentbc.logging import get_logger, log_warning
from momentbc.moments import MomentSequence, hankel_block

logger = get_logger(__name__)


class KernelForm(str, Enum):
    BILINEAR = "bilinear"
    DETERMINANT = "determinant"


def _point(value, exact: bool) -> Scalar:
    """Evaluation point in the backend of the data (floats stay floats)."""
    if exact and isinstance(value, (int, np.integer, str, sympy.Rational)):
        return parse_scalar(value, Backend.RATIONAL)
    return float(value)


def _monomials(N: int, z: Scalar) -> np.ndarray:
    values = [z**j for j in range(N)]
    return np.array(values, dtype=object if isinstance(z, sympy.Rational) else float)


@dataclass(frozen=True, eq=False)
class PolynomialElement:
    """A polynomial of degree ≤ N−1 in both coefficient systems."""

    control: np.ndarray = field(repr=False)
    monomial: np.ndarray = field(repr=False)

    @property
    def N(self) -> int:
        return len(self.control)

    @classmethod
    def from_control(cls, f: np.ndarray | ControlVector) -> "PolynomialElement":
        f = f.as_array() if isinstance(f, ControlVector) else np.asarray(f)
        lam = lambda_matrix(len(f)).entries
        if not is_exact(f):
            f = f.astype(float)
            lam = lam.astype(float)
        return cls(f.copy(), lam.T @ f[::-1])

    @classmethod
    def from_monomial(cls, alpha: np.ndarray) -> "PolynomialElement":
        alpha = np.asarray(alpha)
        inverse = lambda_matrix(len(alpha)).inverse()
        if not is_exact(alpha):
            alpha = alpha.astype(float)
            inverse = inverse.astype(float)
        return cls((inverse.T @ alpha)[::-1].copy(), alpha.copy())

    def __call__(self, lam: Scalar) -> Scalar:
        """Horner evaluation of the monomial form."""
        value = lam * 0
        for coefficient in self.monomial[::-1]:
            value = value * lam + coefficient
        return value

    def chebyshev_value(self, lam: Scalar) -> Scalar:
        """Σ_k 𝒯_k(λ) f_{N-k}, the control-basis evaluation."""
        return cheb_vector(self.N, lam) @ self.control


def _connecting(s: MomentSequence, N: int) -> ConnectingOperator:
    s.require(2 * N - 1)
    return connecting_operator(moments_to_response(s.truncate(2 * N - 1)), N)


def _agree(a: Scalar, b: Scalar, what: str) -> bool:
    if isinstance(a, sympy.Rational) and isinstance(b, sympy.Rational):
        ok = a == b
    else:
        scale = max(abs(float(a)), abs(float(b)), np.finfo(float).tiny)
        ok = abs(float(a) - float(b)) <= CONSISTENCY_TOLERANCE * scale
    if not ok:
        log_warning(logger, "consistency", f"{what} disagree", first=float(a), second=float(b))
    return ok


# --- Krein equation and kernel ---


def krein_control(C: ConnectingOperator, z: Scalar) -> ControlVector:
    """j^z solving C^N j^z = (𝒯_N(z), …, 𝒯_1(z))*."""
    exact = is_exact(C.entries) and isinstance(z, (int, np.integer, str, sympy.Rational))
    z = _point(z, exact)
    matrix = C.entries if exact else to_float_array(C.entries)
    solution = solve_positive_definite(matrix, cheb_vector(C.T, z), name=f"C^{C.T}")
    return ControlVector.from_array(solution)


def kernel_element(s: MomentSequence, N: int, z: Scalar) -> PolynomialElement:
    """K_N(z, ·) as an element: its control is j^z."""
    return PolynomialElement.from_control(krein_control(_connecting(s, N), z))


def _determinant_sign(hankel: np.ndarray) -> int:
    """Sign aligning the bordered-determinant ratio with the bilinear form,
    fixed at the point z = λ = 0."""
    n = hankel.shape[0]
    unit = as_array([1] + [0] * (n - 1), Backend.RATIONAL if is_exact(hankel) else Backend.F64)
    bilinear = solve(hankel, unit, name=f"S0^{n}")[0]
    raw = determinant(bordered_matrix(hankel, unit, unit)) / determinant(hankel)
    if bilinear == 0 or raw == 0:
        return -1
    return 1 if (bilinear > 0) == (raw > 0) else -1


def reproducing_kernel(
    s: MomentSequence,
    N: int,
    z: Scalar,
    lam: Scalar,
    form: KernelForm | str = KernelForm.BILINEAR,
) -> Scalar:
    """K_N(z, λ) in the bilinear or the bordered-determinant form.

    Raises:
        NotPositiveDefiniteError: C^N fails (bilinear form)
        SingularMatrixError: det S₀^N = 0 (determinant form, code singular-hankel)
    """
    if N < 1:
        raise ValueError(f"order must be positive, got {N}")
    form = KernelForm(form)
    exact = s.exact and all(isinstance(x, (int, np.integer, str, sympy.Rational)) for x in (z, lam))
    data = s if exact or not s.exact else s.to_float()
    z, lam = _point(z, exact), _point(lam, exact)

    if form is KernelForm.BILINEAR:
        C = _connecting(data, N)
        x = solve_positive_definite(C.entries, cheb_vector(N, z), name=f"C^{N}")
        return x @ cheb_vector(N, lam)

    hankel = hankel_block(data, 0, N).entries
    det = determinant(hankel)
    if det == 0:
        raise SingularMatrixError(f"S0^{N}", code="singular-hankel")
    raw = determinant(bordered_matrix(hankel, _monomials(N, z), _monomials(N, lam))) / det
    return _determinant_sign(hankel) * raw


@dataclass(frozen=True)
class KernelEvaluation:
    """K_N(z, λ) in both forms and their relative disagreement."""

    z: Scalar
    lam: Scalar
    value: Scalar
    determinant_value: Scalar | None
    residual: float | None

    def to_dict(self) -> dict:
        return {
            "z": float(self.z),
            "lambda": float(self.lam),
            "kernel": float(self.value),
            "determinant_form": None if self.determinant_value is None else float(self.determinant_value),
            "two_form_residual": self.residual,
        }


def evaluate_kernel(s: MomentSequence, N: int, z: Scalar, lam: Scalar) -> KernelEvaluation:
    value = reproducing_kernel(s, N, z, lam, KernelForm.BILINEAR)
    try:
        other = reproducing_kernel(s, N, z, lam, KernelForm.DETERMINANT)
    except SingularMatrixError:
        return KernelEvaluation(z, lam, value, None, None)
    scale = max(abs(float(value)), np.finfo(float).tiny)
    residual = abs(float(value) - float(other)) / scale
    return KernelEvaluation(z, lam, value, other, residual)


@dataclass(frozen=True)
class ChristoffelValue:
    """κ_N(λ) = 1/K_N(λ, λ) and the kernel diagonal itself."""

    kappa: Scalar
    kernel_diagonal: Scalar


def christoffel(s: MomentSequence, N: int, lam: Scalar) -> ChristoffelValue:
    diagonal = reproducing_kernel(s, N, lam, lam, KernelForm.BILINEAR)
    one = sympy.Integer(1) if isinstance(diagonal, sympy.Rational) else 1.0
    return ChristoffelValue(one / diagonal, diagonal)


def kernel_lattice(s: MomentSequence, N: int, points: np.ndarray) -> np.ndarray:
    """K_N(x_i, x_j) for every pair of float grid points.

    C^N is factored once for all right-hand sides 𝒯(x_i).
    """
    if N < 1:
        raise ValueError(f"order must be positive, got {N}")
    C = to_float_array(_connecting(s, N).entries)
    values = np.column_stack([cheb_vector(N, float(x)) for x in points])
    solved = solve_positive_definite(C, values, name=f"C^{N}")
    lattice = solved.T @ values
    return (lattice + lattice.T) / 2


# --- Scalar product and Fourier image ---


def scalar_product(F: PolynomialElement, G: PolynomialElement, s: MomentSequence) -> Scalar:
    """[F, G] = (C^N f, g), checked against Σ s_{i+j} α_i β_j."""
    if F.N != G.N:
        raise ValueError(f"elements of different spaces: N = {F.N} and N = {G.N}")
    N = F.N
    exact = s.exact and is_exact(F.control) and is_exact(G.control)
    data = s if exact or not s.exact else s.to_float()
    C = _connecting(data, N).entries
    hankel = hankel_block(data, 0, N).entries

    def cast(vector: np.ndarray) -> np.ndarray:
        return vector if exact else to_float_array(vector)

    control_value = cast(C) @ cast(F.control) @ cast(G.control)
    hankel_value = cast(F.monomial) @ cast(hankel) @ cast(G.monomial)
    _agree(control_value, hankel_value, "control and monomial scalar products")
    return control_value


def fourier_image(J: JacobiCoefficients, state: np.ndarray, lam: Scalar) -> Scalar:
    """(F a)(λ) = Σ_k a_k φ_k(λ) for a state a = (a_1, …, a_N)."""
    N = len(state)
    phi = phi_xi(J, lam, N).phi_vector(N)
    if is_exact(phi) and is_exact(state):
        return phi @ state
    return to_float_array(phi) @ to_float_array(state)

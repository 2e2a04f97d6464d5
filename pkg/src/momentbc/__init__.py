"""
momentbc - truncated moment problems via the boundary control method.

Moments s_k are turned into response entries of a discrete Jacobi dynamical
system; Gram matrices of reachable states then give the recovered measure
(a generalized eigenproblem), the reproducing kernel of the associated
de Branges space and finite-order determinacy diagnostics.
"""

from momentbc.backend import Backend
from momentbc.bc_operators import (
    apply_response,
    companion_operator,
    connecting_operator,
    response_matrix,
)
from momentbc.chebyshev import (
    ResponseVector,
    boundary_vectors,
    lambda_matrix,
    moments_to_response,
    response_to_moments,
)
from momentbc.config import DEFAULT_TOLERANCES, Tolerances
from momentbc.debranges import (
    PolynomialElement,
    christoffel,
    fourier_image,
    kernel_lattice,
    krein_control,
    reproducing_kernel,
    scalar_product,
)
from momentbc.determinacy import (
    hamburger_report,
    interleave,
    interleaving_check,
    inverse_bilinear_form,
    stieltjes_report,
)
from momentbc.errors import (
    DegenerateSpectrumError,
    InsufficientDataError,
    MomentBCError,
    NoConvergenceError,
    NotPositiveDefiniteError,
    ParseError,
    SingularMatrixError,
)
from momentbc.jacobi_sim import (
    ControlVector,
    JacobiCoefficients,
    dirichlet_spectral_data,
    phi_xi,
    simulate,
)
from momentbc.measure import DiscreteMeasure, moments_of_measure
from momentbc.moments import MomentSequence, classify, hankel_block
from momentbc.pencil import PencilProblem, solve_pencil
from momentbc.recovery import dirichlet_spectrum_restricted, solve_truncated

__all__ = [
    "Backend",
    "ControlVector",
    "DEFAULT_TOLERANCES",
    "DegenerateSpectrumError",
    "DiscreteMeasure",
    "InsufficientDataError",
    "JacobiCoefficients",
    "MomentBCError",
    "MomentSequence",
    "NoConvergenceError",
    "NotPositiveDefiniteError",
    "ParseError",
    "PencilProblem",
    "PolynomialElement",
    "ResponseVector",
    "SingularMatrixError",
    "Tolerances",
    "apply_response",
    "boundary_vectors",
    "christoffel",
    "classify",
    "companion_operator",
    "connecting_operator",
    "dirichlet_spectral_data",
    "dirichlet_spectrum_restricted",
    "fourier_image",
    "hamburger_report",
    "hankel_block",
    "interleave",
    "interleaving_check",
    "inverse_bilinear_form",
    "kernel_lattice",
    "krein_control",
    "lambda_matrix",
    "moments_of_measure",
    "moments_to_response",
    "phi_xi",
    "reproducing_kernel",
    "response_matrix",
    "response_to_moments",
    "scalar_product",
    "simulate",
    "solve_pencil",
    "solve_truncated",
    "stieltjes_report",
]

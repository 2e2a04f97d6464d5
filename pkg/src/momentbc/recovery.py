"""
Truncated moment problem solver.

Pipeline: r = Λs, assemble C^N and B^N, solve B f = λ C f. The eigenvalues
are the atoms. With C-normalized eigenvectors f_k, the boundary trace
α_k = v^{f_k}_{1,N} = Σ_j r_{N-1-j} f_{k,j} gives the weights w_k = α_k²
(norming constants ρ_k = 1/α_k²).

The restricted route works on controls with f_0 = 0 and the shift operator
(Df)_t = f_{t+1} + f_{t-1} (f_{-1} = f_N = 0); its eigenvalues are the
Dirichlet spectrum of the leading (N−1)×(N−1) Jacobi block.
"""

import mpmath
import numpy as np
from scipy import linalg

from momentbc.backend import (
    Backend,
    format_scalar,
    is_exact,
    parse_scalar,
    to_float_array,
    to_mpf,
    zeros,
)
from momentbc.bc_operators import companion_operator, connecting_operator
from momentbc.chebyshev import ResponseVector, moments_to_response
from momentbc.config import DEFAULT_TOLERANCES, Tolerances
from momentbc.errors import DegenerateSpectrumError
from momentbc.jacobi_sim import (
    ControlVector,
    dirichlet_spectral_data,
    jacobi_from_moments,
)
from momentbc.logging import get_logger, log_event
from momentbc.measure import DiscreteMeasure, moments_of_measure
from momentbc.moments import MomentSequence
from momentbc.pencil import EigenSolution, PencilProblem, sign_normalize, solve_pencil

logger = get_logger(__name__)

__all__ = [
    "ControlVector",
    "DiscreteMeasure",
    "dirichlet_spectrum_restricted",
    "moment_errors",
    "moments_of_measure",
    "restricted_measure",
    "restricted_pencil",
    "sequential_minimization",
    "shift_matrix",
    "solve_by_jacobi_extension",
    "solve_truncated",
]


def _check_simple(eigenvalues: np.ndarray, tol: float) -> None:
    """Reject atoms closer than ``tol`` times the spectral diameter."""
    if len(eigenvalues) < 2:
        return
    gaps = np.diff(eigenvalues)
    diameter = float(eigenvalues[-1] - eigenvalues[0])
    gap = float(gaps.min())
    if diameter <= 0 or gap < tol * diameter:
        raise DegenerateSpectrumError(gap, diameter)


def _boundary_weights(r: ResponseVector, solution: EigenSolution, N: int, dps: int) -> list[float]:
    """w_k = α_k² with α_k = Σ_j r_{N-1-j} f_{k,j}."""
    values = r.values[:N]
    if solution.precise_eigenvectors is not None:
        vectors = solution.precise_eigenvectors
        with mpmath.workdps(dps):
            response = [to_mpf(v) for v in values]
            return [
                float(mpmath.fsum(response[N - 1 - j] * vectors[j, k] for j in range(N)) ** 2)
                for k in range(vectors.shape[1])
            ]
    response = np.array([float(v) for v in values])
    alphas = response[::-1] @ solution.eigenvectors
    return [float(alpha) ** 2 for alpha in alphas]


def _needs_exact_rebuild(C: np.ndarray, tol: Tolerances) -> bool:
    """cond(C)·eps above the accuracy target, cond(C) below the rebuild cap.

    C past the cap goes through the float solve unchanged.
    """
    spectrum = linalg.eigvalsh(C)
    if spectrum[0] <= 0:
        return False
    condition = float(spectrum[-1] / spectrum[0])
    return condition * np.finfo(float).eps > tol.accuracy and condition < tol.rebuild_cap


def _measure(eigenvalues: np.ndarray, weights: list[float], tol: Tolerances) -> DiscreteMeasure:
    _check_simple(eigenvalues, tol.degeneracy)
    if any(w <= 0 for w in weights):
        raise DegenerateSpectrumError(0.0, float(eigenvalues[-1] - eigenvalues[0]))
    return DiscreteMeasure(tuple(float(x) for x in eigenvalues), tuple(weights))


def solve_truncated(
    s: MomentSequence,
    N: int,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
    extended: bool | None = None,
) -> DiscreteMeasure:
    """N-atom measure reproducing s_0..s_{2N-1}.

    Raises:
        InsufficientDataError: fewer than 2N moments
        NotPositiveDefiniteError: the data admit fewer than N atoms; retry
            with a smaller N
        DegenerateSpectrumError: numerically coinciding atoms
    """
    if N < 1:
        raise ValueError(f"order must be positive, got {N}")
    s.require(2 * N)
    if len(s) > 2 * N:
        log_event(logger, "extra moments ignored", code="extra-moments-ignored", used=2 * N, given=len(s))
        s = s.truncate(2 * N)

    r = moments_to_response(s)
    C = connecting_operator(r, N).entries
    if not s.exact and extended is not False and _needs_exact_rebuild(C, tolerances):
        log_event(logger, "float data solved exactly", code="exact-rebuild", order=N)
        s = s.to_exact()
        r = moments_to_response(s)
        C = connecting_operator(r, N).entries
        extended = True
    B = companion_operator(r, N).entries
    solution = solve_pencil(PencilProblem(B, C), tolerances=tolerances, extended=extended)
    weights = _boundary_weights(r, solution, N, tolerances.extended_dps)
    measure = _measure(solution.eigenvalues, weights, tolerances)
    logger.info(f"recovered {N} atoms (condition {solution.condition:.3e})")
    return measure


def moment_errors(mu: DiscreteMeasure, s: MomentSequence, count: int) -> tuple[MomentSequence, float]:
    """Moments of ``mu`` up to index count−1 and their max relative error.

    The error of s_j is scaled by max(|s_j|, Σ w_k |λ_k|^j) so vanishing odd
    moments of symmetric measures do not blow it up.
    """
    reproduced = moments_of_measure(mu, count - 1)
    float_mu = mu.to_float()
    atoms, weights = float_mu.atoms_array(), float_mu.weights_array()
    worst = 0.0
    for j in range(count):
        target = float(s[j])
        scale = max(abs(target), float(weights @ np.abs(atoms) ** j), np.finfo(float).tiny)
        worst = max(worst, abs(float(reproduced[j]) - target) / scale)
    return reproduced, worst


# --- Restricted (variational) route ---


def shift_matrix(N: int, backend: Backend | str = Backend.F64) -> np.ndarray:
    """D with (Df)_t = f_{t+1} + f_{t-1} under f_{-1} = f_N = 0."""
    D = zeros((N, N), backend)
    one = parse_scalar(1, backend)
    for t in range(N - 1):
        D[t, t + 1] = D[t + 1, t] = one
    return D


def restricted_pencil(C: np.ndarray, D: np.ndarray) -> PencilProblem:
    """(P* C D P, P* C P) with P injecting the controls with f_0 = 0."""
    P = np.eye(C.shape[0], dtype=int)[:, 1:]
    if is_exact(C):
        P = P.astype(object)
    return PencilProblem(P.T @ C @ D @ P, P.T @ C @ P)


def _lift(vectors: np.ndarray | None) -> np.ndarray | None:
    """Prepend the f_0 = 0 row."""
    if vectors is None:
        return None
    lifted = np.zeros((vectors.shape[0] + 1, vectors.shape[1]), dtype=vectors.dtype)
    lifted[1:, :] = vectors
    return lifted


def _restricted_setup(s: MomentSequence, N: int) -> tuple[ResponseVector, np.ndarray]:
    if N < 2:
        raise ValueError(f"the restricted route needs N ≥ 2, got {N}")
    s.require(2 * N - 1)
    r = moments_to_response(s.truncate(2 * N - 1))
    return r, connecting_operator(r, N).entries


def dirichlet_spectrum_restricted(
    s: MomentSequence,
    N: int,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
    extended: bool | None = None,
) -> EigenSolution:
    """Eigenpairs of the reduced pencil on f_0 = 0.

    Eigenvectors are returned lifted back to all N control slots (first
    entry zero) and C^N-normalized.
    """
    r, C = _restricted_setup(s, N)
    pencil = restricted_pencil(C, shift_matrix(N, r.backend))
    solution = solve_pencil(pencil, tolerances=tolerances, extended=extended)
    return EigenSolution(
        solution.eigenvalues,
        _lift(solution.eigenvectors),
        solution.condition,
        solution.sweeps,
        _lift(solution.precise_eigenvectors),
    )


def restricted_measure(
    s: MomentSequence,
    N: int,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> DiscreteMeasure:
    """Order-(N−1) measure of the restricted route; reproduces s_0..s_{2N-3}.

    Minimizers are unit-C normalized, so (C f_k, f_k) = 1 carries no
    information; the weights come from the boundary trace as in
    :func:`solve_truncated`.
    """
    r, _ = _restricted_setup(s, N)
    solution = dirichlet_spectrum_restricted(s, N, tolerances)
    weights = _boundary_weights(r, solution, N, tolerances.extended_dps)
    return _measure(solution.eigenvalues, weights, tolerances)


def sequential_minimization(
    s: MomentSequence,
    N: int,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> EigenSolution:
    """Minimize (C D f, f)/(C f, f) over f_0 = 0, one eigenpair at a time.

    Step k restricts to controls C-orthogonal to the k earlier minimizers
    (a null-space basis of the constraint rows) and takes the smallest
    eigenpair there.
    """
    r, C = _restricted_setup(s, N)
    pencil = restricted_pencil(C, shift_matrix(N, r.backend))
    B_r, C_r = to_float_array(pencil.B), to_float_array(pencil.C)

    eigenvalues: list[float] = []
    minimizers: list[np.ndarray] = []
    for k in range(N - 1):
        if minimizers:
            constraints = (C_r @ np.column_stack(minimizers)).T
            basis = linalg.null_space(constraints)
        else:
            basis = np.eye(N - 1)
        step = solve_pencil(PencilProblem(basis.T @ B_r @ basis, basis.T @ C_r @ basis), tolerances=tolerances)
        f = basis @ step.eigenvectors[:, 0]
        f = f / np.sqrt(f @ C_r @ f)
        eigenvalues.append(float(step.eigenvalues[0]))
        minimizers.append(f)
        logger.debug(f"minimizer {k + 1}: λ = {step.eigenvalues[0]:.17g}")

    vectors = sign_normalize(np.column_stack(minimizers))
    return EigenSolution(np.array(eigenvalues), _lift(vectors), float(np.linalg.cond(C_r)))


# --- Jacobi-extension route ---


def solve_by_jacobi_extension(
    s: MomentSequence,
    N: int,
    a_tail: tuple = (),
    b_tail: tuple = (),
    boundary_shift: float = 0.0,
) -> DiscreteMeasure:
    """Recover A^N from the moments, extend it, take its Dirichlet measure.

    Any extension (a_N, …) > 0, (b_{N+1}, …) keeps s_0..s_{2N-1};
    a nonzero ``boundary_shift`` keeps only s_0..s_{2N-2}.
    """
    J = jacobi_from_moments(s, N)
    if a_tail or b_tail:
        J = J.extend(tuple(map(float, a_tail)), tuple(map(float, b_tail)))
    return dirichlet_spectral_data(J, boundary_shift=boundary_shift)


def measure_report(mu: DiscreteMeasure, s: MomentSequence, count: int) -> dict:
    """Measure plus reproduced moments, as emitted by ``solve``."""
    reproduced, error = moment_errors(mu, s, count)
    report = mu.to_dict()
    report["reproduced_moments"] = [format_scalar(v) for v in reproduced]
    report["max_relative_moment_error"] = error
    return report

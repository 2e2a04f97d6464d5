"""
Finite-order determinacy diagnostics.

Determinacy is a limit property, so nothing here certifies it. The reports
tabulate the quadratic forms whose boundedness decides it, order by order,
cross-check every form against its Hankel determinant ratio, and read a
verdict off the trend of the last few orders. Hausdorff-feasible data are the
exception: that problem is always determinate.

Quadratic forms and their determinant ratios (S = S₀^T, standard layout):

    q1_T = ((C^T)⁻¹Γ_T, Γ_T) = (S⁻¹)₀₀ = det S₂^{T-1} / det S₀^T
    q2_T = ((C^T)⁻¹Ω_T, Ω_T) = (S⁻¹)₁₁ = det S₀^{T-1,2} / det S₀^T

with S₀^{T-1,2} the block left after deleting row and column 1.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import pandas as pd
import sympy

from momentbc.backend import (
    Scalar,
    as_array,
    backend_of,
    bordered_matrix,
    check_positive_definite,
    determinant,
    format_scalar,
    solve,
    solve_positive_definite,
    zeros,
)
from momentbc.bc_operators import connecting_operator, response_matrix
from momentbc.chebyshev import boundary_vectors, moments_to_response
from momentbc.config import (
    DEFAULT_TOLERANCES,
    TREND_MIN_ORDERS,
    TREND_RATIO,
    TREND_WINDOW,
    Tolerances,
    runtime_settings,
)
from momentbc.errors import NotPositiveDefiniteError, SingularMatrixError
from momentbc.logging import get_logger, log_warning
from momentbc.moments import MomentSequence, classify, hankel_block
from momentbc.pencil import PencilProblem, solve_pencil

logger = get_logger(__name__)


class Problem(str, Enum):
    HAMBURGER = "hamburger"
    STIELTJES = "stieltjes"


class DeterminacyVerdict(str, Enum):
    NO_EVIDENCE = "no-indeterminacy-evidence"
    BOUNDED_TREND = "bounded-trend"
    DEGENERATE = "degenerate"
    DETERMINATE = "determinate"


# Column labels of the per-order table
COLUMNS = {
    Problem.HAMBURGER: ("q1", "q2", "q1_det_ratio", "q2_det_ratio"),
    Problem.STIELTJES: ("M", "L", "M_det_ratio", "S00_det_ratio"),
}


@dataclass(frozen=True)
class OrderRow:
    """Forms and determinant ratios at one truncation order.

    For the Hamburger problem ``first``/``second`` are q1/q2; for the
    Stieltjes problem they are the mass M_T and length L_T (None when the
    L_T denominator vanishes), and ``xi`` is ((S₀^T)⁻¹g, g) with
    g = (0, s_0, …, s_{T-2}).
    """

    order: int
    first: Scalar
    second: Scalar | None
    first_ratio: Scalar
    second_ratio: Scalar
    forms_match: bool
    xi: Scalar | None = None


@dataclass
class DeterminacyReport:
    problem: Problem
    rows: list[OrderRow]
    monotone: bool
    verdict: DeterminacyVerdict
    # whether det(bordered)/det D without a minus sign reproduces the forms
    unsigned_ratio_matches: bool = False
    feasibility: str | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def orders(self) -> list[int]:
        return [row.order for row in self.rows]

    def sequence(self, which: str = "first") -> list[Scalar | None]:
        return [getattr(row, which) for row in self.rows]

    def to_frame(self) -> pd.DataFrame:
        first, second, first_ratio, second_ratio = COLUMNS[self.problem]
        records = []
        for row in self.rows:
            record = {
                "T": row.order,
                first: _cell(row.first),
                second: _cell(row.second),
                first_ratio: _cell(row.first_ratio),
                second_ratio: _cell(row.second_ratio),
            }
            if self.problem is Problem.STIELTJES:
                record["xi"] = _cell(row.xi)
            record["forms_match"] = row.forms_match
            record["monotone_ok"] = self.monotone
            records.append(record)
        return pd.DataFrame.from_records(records)

    def to_dict(self) -> dict:
        first, second, first_ratio, second_ratio = COLUMNS[self.problem]
        return {
            "problem": self.problem.value,
            "verdict": self.verdict.value,
            "feasibility": self.feasibility,
            "monotone": self.monotone,
            "unsigned_ratio_matches": self.unsigned_ratio_matches,
            "orders": [
                {
                    "T": row.order,
                    first: _json(row.first),
                    second: _json(row.second),
                    first_ratio: _json(row.first_ratio),
                    second_ratio: _json(row.second_ratio),
                    **({"xi": _json(row.xi)} if self.problem is Problem.STIELTJES else {}),
                    "forms_match": row.forms_match,
                }
                for row in self.rows
            ],
            "notes": list(self.notes),
        }


def _cell(value: Scalar | None) -> float | None:
    return None if value is None else float(value)


def _json(value: Scalar | None) -> float | str | None:
    return None if value is None else format_scalar(value)


# --- Bilinear forms of inverses ---


def bordered_determinant(D: np.ndarray, h: np.ndarray, c: np.ndarray) -> Scalar:
    """det [[0, h*], [c, D]] = −det D · (D⁻¹h, c)."""
    return determinant(bordered_matrix(D, h, c))


def inverse_bilinear_form(
    D: np.ndarray,
    h: np.ndarray,
    c: np.ndarray,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> Scalar:
    """(D⁻¹h, c) by a linear solve, checked against −det(bordered)/det D.

    Raises:
        SingularMatrixError: D is singular
    """
    D = np.asarray(D)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise ValueError(f"D must be square, got shape {D.shape}")
    if len(h) != D.shape[0] or len(c) != D.shape[0]:
        raise ValueError(f"vectors must have length {D.shape[0]}")

    value = solve(D, h, name="D") @ _like(D, c)
    det = determinant(D)
    if det == 0:
        raise SingularMatrixError("D")
    via_determinant = -bordered_determinant(D, h, c) / det
    if not _same(value, via_determinant, tolerances.consistency):
        log_warning(
            logger,
            "consistency",
            "bilinear form disagrees with its bordered-determinant value",
            solve=float(value),
            determinant=float(via_determinant),
        )
    return value


def _like(matrix: np.ndarray, vector) -> np.ndarray:
    """``vector`` in the backend of ``matrix``."""
    return as_array(vector, backend_of(matrix))


def _same(a: Scalar, b: Scalar, tol: float) -> bool:
    if isinstance(a, sympy.Rational) and isinstance(b, sympy.Rational):
        return a == b
    scale = max(abs(float(a)), abs(float(b)), np.finfo(float).tiny)
    return abs(float(a) - float(b)) <= tol * scale


def _same_magnitude(a: Scalar, b: Scalar, tol: float) -> bool:
    return _same(abs(a), abs(b), tol)


# --- Per-order rows ---


def _delete(matrix: np.ndarray, index: int) -> np.ndarray:
    return np.delete(np.delete(matrix, index, axis=0), index, axis=1)


def _quadratic(C: np.ndarray, vector: np.ndarray, order: int) -> Scalar:
    x = solve_positive_definite(C, _like(C, vector), name=f"C^{order}")
    return x @ _like(C, vector)


def _hamburger_row(s: MomentSequence, T: int, tol: Tolerances) -> OrderRow:
    r = moments_to_response(s.truncate(2 * T - 1))
    C = connecting_operator(r, T).entries
    vectors = boundary_vectors(T)
    q1 = _quadratic(C, vectors.gamma, T)
    q2 = _quadratic(C, vectors.omega, T) if T > 1 else C[0, 0] * 0

    hankel = hankel_block(s, 0, T).entries
    det = determinant(hankel)
    q1_ratio = determinant(_delete(hankel, 0)) / det
    q2_ratio = determinant(_delete(hankel, 1)) / det if T > 1 else det * 0
    match = _same_magnitude(q1, q1_ratio, tol.consistency) and _same_magnitude(q2, q2_ratio, tol.consistency)
    return OrderRow(T, q1, q2, q1_ratio, q2_ratio, match)


def _zero_cornered(s: MomentSequence, T: int) -> np.ndarray:
    """S₀,₀^T: zero corner, first row and column s_0..s_{T-2}, then s_{i+j-1}."""
    values = s.as_array()
    out = zeros((T, T), s.backend)
    for i in range(T):
        for j in range(T):
            if i + j > 0:
                out[i, j] = values[i + j - 1]
    return out


def _shifted_moments(s: MomentSequence, T: int) -> np.ndarray:
    """g = (0, s_0, …, s_{T-2})."""
    g = zeros(T, s.backend)
    g[1:] = s.as_array()[: T - 1]
    return g


def _stieltjes_row(s: MomentSequence, T: int, tol: Tolerances) -> OrderRow:
    r = moments_to_response(s.truncate(2 * T - 1))
    C = connecting_operator(r, T).entries
    gamma = _like(C, boundary_vectors(T).gamma)
    mass = _quadratic(C, gamma, T)

    pulled = response_matrix(r, T).entries.T @ gamma
    numerator = solve_positive_definite(C, pulled, name=f"C^{T}")[0]
    denominator = solve_positive_definite(C, gamma, name=f"C^{T}")[0]
    length = None if denominator == 0 else numerator / denominator

    hankel = hankel_block(s, 0, T).entries
    g = _shifted_moments(s, T)
    xi = solve_positive_definite(hankel, g, name=f"S0^{T}") @ g
    mass_ratio = determinant(_delete(hankel, 0)) / determinant(hankel)
    if T > 1:
        shifted = hankel_block(s, 1, T - 1).entries
        check = check_positive_definite(shifted, tol.pivot, name=f"S1^{T - 1}")
        if not check.positive:
            raise NotPositiveDefiniteError(f"S1^{T - 1}", T - 1, check.min_pivot)
        shifted_det = determinant(shifted)
    else:
        shifted_det = determinant(zeros((0, 0), s.backend))
    zero_cornered_ratio = abs(determinant(_zero_cornered(s, T)) / shifted_det)
    match = _same_magnitude(mass, mass_ratio, tol.consistency)
    return OrderRow(T, mass, length, mass_ratio, zero_cornered_ratio, match, xi)


# --- Reports ---


def _monotone(values: list[Scalar], tol: float) -> bool:
    for previous, current in zip(values, values[1:]):
        if isinstance(current, sympy.Rational) and isinstance(previous, sympy.Rational):
            if current < previous:
                return False
        elif float(current) < float(previous) - tol * abs(float(previous)):
            return False
    return True


def _bounded(values: list[Scalar]) -> bool:
    """Last TREND_WINDOW increments are a small fraction of the value."""
    floats = [float(v) for v in values]
    if len(floats) <= TREND_WINDOW:
        return False
    growth = floats[-1] - floats[-1 - TREND_WINDOW]
    return growth <= TREND_RATIO * abs(floats[-1])


def _rows(builder, s: MomentSequence, Tmax: int, tol: Tolerances, threads: int | None) -> list[OrderRow]:
    threads = runtime_settings().threads if threads is None else threads
    with ThreadPoolExecutor(max_workers=threads) as pool:
        rows = list(pool.map(lambda T: builder(s, T, tol), range(1, Tmax + 1)))
    return sorted(rows, key=lambda row: row.order)


def _verdict(
    problem: Problem,
    rows: list[OrderRow],
    feasibility: str | None,
    notes: list[str],
) -> DeterminacyVerdict:
    if feasibility == "hausdorff-feasible":
        notes.append("Hausdorff-feasible data: the Hausdorff moment problem is determinate")
        return DeterminacyVerdict.DETERMINATE
    if any(row.second is None for row in rows):
        notes.append("L_T denominator vanished")
        return DeterminacyVerdict.DEGENERATE
    if len(rows) < TREND_MIN_ORDERS:
        return DeterminacyVerdict.NO_EVIDENCE
    sequences = [[row.first for row in rows], [row.second for row in rows]]
    if all(_bounded(values) for values in sequences):
        notes.append(f"{' and '.join(COLUMNS[problem][:2])} level off over the last orders; finite-order evidence only")
        return DeterminacyVerdict.BOUNDED_TREND
    return DeterminacyVerdict.NO_EVIDENCE


def _report(
    problem: Problem,
    builder,
    s: MomentSequence,
    Tmax: int,
    tolerances: Tolerances,
    threads: int | None,
) -> DeterminacyReport:
    if Tmax < 1:
        raise ValueError(f"Tmax must be positive, got {Tmax}")
    s.require(2 * Tmax - 1)
    rows = _rows(builder, s, Tmax, tolerances, threads)

    monotone = _monotone([row.first for row in rows], tolerances.consistency)
    if not monotone:
        log_warning(logger, "consistency", f"{COLUMNS[problem][0]} is not nondecreasing in T", problem=problem.value)
    mismatched = [row.order for row in rows if not row.forms_match]
    if mismatched:
        log_warning(
            logger,
            "consistency",
            "quadratic forms disagree with determinant ratios",
            orders=",".join(map(str, mismatched)),
        )

    # unsigned bordered ratio on the order-1 q1 form
    hankel = hankel_block(s, 0, 1).entries
    unit = np.array([1], dtype=object if s.exact else float)
    unsigned = bordered_determinant(hankel, unit, unit) / determinant(hankel)
    unsigned_ratio_matches = _same(unsigned, rows[0].first_ratio, tolerances.consistency)
    if not unsigned_ratio_matches:
        log_warning(
            logger,
            "sign-convention",
            "bordered-determinant formula needs a minus sign; ratios compared in absolute value",
            problem=problem.value,
        )

    notes: list[str] = []
    classification = classify(s, Tmax, tolerances.pivot)
    feasibility = classification.label
    verdict = _verdict(problem, rows, feasibility, notes)
    if classification.hausdorff is None:
        notes.append(f"s_{2 * Tmax - 1} missing: Stieltjes and Hausdorff feasibility undetermined at T = {Tmax}")
    logger.info(f"{problem.value} report through T = {Tmax}: {verdict.value}")
    return DeterminacyReport(problem, rows, monotone, verdict, unsigned_ratio_matches, feasibility, notes)


def hamburger_report(
    s: MomentSequence,
    Tmax: int,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
    threads: int | None = None,
) -> DeterminacyReport:
    """q1_T and q2_T for T = 1..Tmax with their determinant ratios.

    Raises:
        InsufficientDataError: fewer than 2·Tmax − 1 moments
        NotPositiveDefiniteError: C^T fails at some order
    """
    return _report(Problem.HAMBURGER, _hamburger_row, s, Tmax, tolerances, threads)


def stieltjes_report(
    s: MomentSequence,
    Tmax: int,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
    threads: int | None = None,
) -> DeterminacyReport:
    """Mass M_T, length L_T, the S₀,₀ ratio and the ξ form for T = 1..Tmax.

    L_T is evaluated at K = T with e_1 the first control slot.

    Raises:
        InsufficientDataError: fewer than 2·Tmax − 1 moments
        NotPositiveDefiniteError: C^T or S₁^{T-1} fails at some order
    """
    return _report(Problem.STIELTJES, _stieltjes_row, s, Tmax, tolerances, threads)


# --- Stieltjes ↔ Hamburger interleaving ---


def interleave(s: MomentSequence) -> MomentSequence:
    """h = (s_0, 0, s_1, 0, s_2, 0, …)."""
    values = s.as_array()
    out = zeros(2 * len(values), s.backend)
    out[::2] = values
    return MomentSequence.from_array(out)


@dataclass(frozen=True)
class InterleavingCheck:
    """Determinant, eigenvalue and ratio identities between S and its interleaving."""

    order: int
    hankel_determinant: Scalar
    determinant_product: Scalar
    determinant_identity: bool
    stieltjes_eigenvalues: np.ndarray = field(repr=False)
    hamburger_eigenvalues: np.ndarray = field(repr=False)
    eigenvalue_error: float
    ratio_identity: bool

    def to_dict(self) -> dict:
        return {
            "T": self.order,
            "det_H0_2T": format_scalar(self.hankel_determinant),
            "det_S0_times_det_S1": format_scalar(self.determinant_product),
            "determinant_identity": self.determinant_identity,
            "stieltjes_eigenvalues": [float(x) for x in self.stieltjes_eigenvalues],
            "hamburger_eigenvalues": [float(x) for x in self.hamburger_eigenvalues],
            "eigenvalue_error": self.eigenvalue_error,
            "ratio_identity": self.ratio_identity,
        }


def interleaving_check(
    s: MomentSequence,
    T: int,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
    extended: bool | None = None,
) -> InterleavingCheck:
    """Compare the order-T Stieltjes data with the order-2T interleaved Hamburger data.

    Needs s_0..s_{2T-1} with S₀^T and S₁^T positive definite. ``extended`` is
    passed to both pencil solves.
    """
    if T < 1:
        raise ValueError(f"order must be positive, got {T}")
    s.require(2 * T)
    h = interleave(s.truncate(2 * T))

    s0 = hankel_block(s, 0, T).entries
    s1 = hankel_block(s, 1, T).entries
    h0 = hankel_block(h, 0, 2 * T).entries
    h1 = hankel_block(h, 1, 2 * T).entries

    product = determinant(s0) * determinant(s1)
    hankel_det = determinant(h0)
    determinant_identity = _same(hankel_det, product, tolerances.consistency)

    mu = solve_pencil(PencilProblem(s1, s0), tolerances=tolerances, extended=extended).eigenvalues
    if np.any(mu <= 0):
        raise NotPositiveDefiniteError(f"S1^{T}", T)
    expected = np.sort(np.concatenate([-np.sqrt(mu), np.sqrt(mu)]))
    observed = solve_pencil(PencilProblem(h1, h0), tolerances=tolerances, extended=extended).eigenvalues
    error = float(np.max(np.abs(np.sort(observed) - expected)))

    h_ratio = determinant(hankel_block(h, 2, 2 * T - 1).entries) / hankel_det
    s_ratio = determinant(_delete(s0, 0)) / determinant(s0)
    ratio_identity = _same(h_ratio, s_ratio, tolerances.consistency)

    if not (determinant_identity and ratio_identity):
        log_warning(logger, "consistency", "interleaving identities fail", order=T)
    return InterleavingCheck(T, hankel_det, product, determinant_identity, mu, observed, error, ratio_identity)


__all__ = [
    "COLUMNS",
    "DeterminacyReport",
    "DeterminacyVerdict",
    "InterleavingCheck",
    "OrderRow",
    "Problem",
    "bordered_determinant",
    "hamburger_report",
    "interleave",
    "interleaving_check",
    "inverse_bilinear_form",
    "stieltjes_report",
]

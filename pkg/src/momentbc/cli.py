"""
Job orchestration for the command-line front end.

Each command has a ``cmd_*`` handler that loads its input, runs the pipeline
and returns a :class:`JobResult`. :func:`run` wraps the handler with the
diagnostics collector, maps errors to exit statuses and writes the output
document.
"""

import sys
from contextlib import nullcontext
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np
import pandas as pd
import sympy
from tqdm import tqdm

from momentbc.backend import (
    Backend,
    Scalar,
    exactly_equal,
    format_scalar,
    parse_scalar,
    relative_residual,
    to_float_array,
)
from momentbc.bc_operators import (
    companion_operator,
    connecting_operator,
    hankel_factorization,
    response_matrix,
)
from momentbc.chebyshev import boundary_vectors, lambda_matrix, moments_to_response, response_to_moments
from momentbc.config import (
    DEFAULT_TOLERANCES,
    RANDOM_A_RANGE,
    RANDOM_B_RANGE,
    RANDOM_DENOMINATOR,
    RANDOM_ORDER_RANGE,
    RuntimeSettings,
    Tolerances,
    runtime_settings,
)
from momentbc.debranges import christoffel, evaluate_kernel, kernel_lattice
from momentbc.determinacy import Problem, hamburger_report, interleaving_check, stieltjes_report
from momentbc.errors import MomentBCError, ParseError
from momentbc.formatting import document, write_csv, write_json
from momentbc.jacobi_sim import (
    JacobiCoefficients,
    dirichlet_spectral_data,
    response_by_simulation,
    simulate,
)
from momentbc.logging import DiagnosticsCollector, get_logger, log_error
from momentbc.measure import DiscreteMeasure
from momentbc.moments import MomentSequence, classify
from momentbc.recovery import (
    measure_report,
    moment_errors,
    restricted_measure,
    solve_by_jacobi_extension,
    solve_truncated,
)
from momentbc.schema import JacobiFile, MomentFile, ResponseFile, TransformFile, load_input

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_DOMAIN_ERROR = 1
EXIT_PARSE_ERROR = 2


class Command(str, Enum):
    CHECK = "check"
    TRANSFORM = "transform"
    OPERATORS = "operators"
    SOLVE = "solve"
    SIMULATE = "simulate"
    KERNEL = "kernel"
    DETERMINACY = "determinacy"
    ROUNDTRIP = "roundtrip"


class OutputFormat(str, Enum):
    JSON = "json"
    CSV = "csv"


class SolveMethod(str, Enum):
    PENCIL = "pencil"
    RESTRICTED = "restricted"
    JACOBI_EXTENSION = "jacobi-extension"


# Commands with a tabular (CSV) emission
TABULAR = {Command.SOLVE, Command.SIMULATE, Command.KERNEL, Command.DETERMINACY}


@dataclass
class JobConfig:
    """One CLI invocation."""

    command: Command
    input: Path | None = None
    output: Path | None = None
    order: int | None = None
    tmax: int | None = None
    backend: Backend | None = None
    tol: float | None = None
    format: OutputFormat = OutputFormat.JSON
    problem: Problem = Problem.HAMBURGER
    method: SolveMethod = SolveMethod.PENCIL
    extended: bool | None = None
    z: str = "0"
    lam: str = "0"
    grid: bool = False
    grid_min: float = -2.0
    grid_max: float = 2.0
    grid_points: int = 9
    random: int | None = None
    seed: int = 0

    def __post_init__(self):
        """Validate configuration."""
        self.command = Command(self.command)
        self.format = OutputFormat(self.format)
        self.problem = Problem(self.problem)
        self.method = SolveMethod(self.method)
        if self.backend is not None:
            self.backend = Backend(self.backend)
        if self.order is not None and self.order < 1:
            raise ValueError("--order must be at least 1")
        if self.tmax is not None and self.tmax < 1:
            raise ValueError("--tmax must be at least 1")
        if self.tol is not None and not self.tol > 0:
            raise ValueError("--tol must be positive")
        if self.format is OutputFormat.CSV and self.command not in TABULAR:
            raise ValueError(f"{self.command.value} has no CSV output")
        if self.grid_points < 2 or not self.grid_max > self.grid_min:
            raise ValueError("grid needs at least 2 points on a nonempty interval")
        if self.random is not None:
            if self.command is not Command.ROUNDTRIP:
                raise ValueError("--random only applies to roundtrip")
            if self.random < 1:
                raise ValueError("--random must be at least 1")
        elif self.input is None:
            raise ValueError(f"{self.command.value} needs an input file")

    @property
    def tolerances(self) -> Tolerances:
        return DEFAULT_TOLERANCES.with_overrides(self.tol)


@dataclass
class JobResult:
    payload: dict
    frame: pd.DataFrame | None = None


# --- Input helpers ---


def _moments(config: JobConfig) -> MomentSequence:
    parsed = load_input(config.input, MomentFile)
    try:
        return parsed.to_sequence(config.backend)
    except ValueError as e:
        raise ParseError(str(config.input), str(e)) from e


def _jacobi(config: JobConfig) -> JacobiFile:
    return load_input(config.input, JacobiFile)


def _extended(config: JobConfig, settings: RuntimeSettings) -> bool | None:
    if config.extended is not None:
        return config.extended
    return None if settings.extended_precision else False


def _point(text: str, backend: Backend) -> Scalar:
    try:
        return parse_scalar(text, backend)
    except ValueError:
        # a decimal point in the exact backend falls back to floats
        return parse_scalar(text, Backend.F64)


# --- Commands ---


def cmd_check(config: JobConfig, settings: RuntimeSettings) -> JobResult:
    """Classify moment data order by order."""
    s = _moments(config)
    Nmax = config.order or (len(s) + 1) // 2
    classification = classify(s, Nmax, config.tolerances.pivot)
    return JobResult({"backend": s.backend.value, "N_max": Nmax, **classification.to_dict()})


def cmd_transform(config: JobConfig, settings: RuntimeSettings) -> JobResult:
    """Moments to response entries or back, depending on the input file."""
    parsed = load_input(config.input, TransformFile)
    try:
        sequence = parsed.to_sequence(config.backend)
    except ValueError as e:
        raise ParseError(str(config.input), str(e)) from e
    if isinstance(parsed, ResponseFile):
        moments = response_to_moments(sequence)
        return JobResult({"direction": "response-to-moments", "response": sequence.to_json(), "moments": moments.to_json()})
    response = moments_to_response(sequence)
    return JobResult({"direction": "moments-to-response", "moments": sequence.to_json(), "response": response.to_json()})


def _matrix_json(matrix: np.ndarray) -> list[list]:
    return [[format_scalar(x) for x in row] for row in matrix.tolist()]


def cmd_operators(config: JobConfig, settings: RuntimeSettings) -> JobResult:
    """C^N, B^N, R^N, Λ_N, boundary vectors and the Hankel factorization checks."""
    s = _moments(config)
    N = config.order or max(1, len(s) // 2)
    r = moments_to_response(s)
    C = connecting_operator(r, N).entries
    payload: dict = {"backend": s.backend.value, "N": N, "C": _matrix_json(C)}

    c_factor = hankel_factorization(s, N, 0)
    factorization = {"C_residual": relative_residual(C, c_factor)}
    if s.exact:
        factorization["C_exact"] = exactly_equal(C, c_factor)
    if len(s) >= 2 * N:
        B = companion_operator(r, N).entries
        b_factor = hankel_factorization(s, N, 1)
        payload["B"] = _matrix_json(B)
        factorization["B_residual"] = relative_residual(B, b_factor)
        if s.exact:
            factorization["B_exact"] = exactly_equal(B, b_factor)

    vectors = boundary_vectors(N)
    payload.update(
        {
            "R": _matrix_json(response_matrix(r, N).entries),
            "Lambda": lambda_matrix(N).entries.tolist(),
            "Gamma": vectors.gamma.tolist(),
            "Omega": vectors.omega.tolist(),
            "factorization": factorization,
        }
    )
    return JobResult(payload)


def _recover(s: MomentSequence, N: int, config: JobConfig, settings: RuntimeSettings) -> tuple[DiscreteMeasure, int]:
    """Measure and the number of moments it should reproduce."""
    tolerances = config.tolerances
    if config.method is SolveMethod.RESTRICTED:
        return restricted_measure(s, N, tolerances), 2 * N - 2
    if config.method is SolveMethod.JACOBI_EXTENSION:
        return solve_by_jacobi_extension(s, N), 2 * N
    return solve_truncated(s, N, tolerances, extended=_extended(config, settings)), 2 * N


def cmd_solve(config: JobConfig, settings: RuntimeSettings) -> JobResult:
    """Recover an N-atom measure from moments."""
    s = _moments(config)
    N = config.order or max(1, len(s) // 2)
    mu, count = _recover(s, N, config, settings)
    payload = {"backend": s.backend.value, "N": N, "method": config.method.value}
    payload.update(measure_report(mu, s, count))
    return JobResult(payload, mu.step_function())


def _boundary_independent(J: JacobiCoefficients, parsed: JacobiFile, T: int) -> bool:
    """Dirichlet and widened lattices share r_0..r_{2N-1}."""
    control = parsed.control_vector(J.backend)
    closed = simulate(J, control, T, dirichlet=True).boundary_trace()
    open_ = simulate(J, control, T, dirichlet=False).boundary_trace()
    count = min(T, 2 * J.N)
    if J.exact and control.exact:
        return exactly_equal(closed[:count], open_[:count])
    return relative_residual(closed[:count], open_[:count]) <= DEFAULT_TOLERANCES.consistency


def cmd_simulate(config: JobConfig, settings: RuntimeSettings) -> JobResult:
    """Wave field, boundary trace and Dirichlet spectral data of a Jacobi system."""
    parsed = _jacobi(config)
    try:
        J = parsed.coefficients(config.backend)
        control = parsed.control_vector(config.backend)
    except ValueError as e:
        raise ParseError(str(config.input), str(e)) from e
    T = config.tmax or parsed.horizon
    wave = simulate(J, control, T, dirichlet=True)
    payload = {
        "backend": J.backend.value,
        "N": J.N,
        "T": T,
        "boundary_trace": [format_scalar(x) for x in wave.boundary_trace()],
        "finite_speed": wave.finite_speed_holds(),
        "boundary_independent": _boundary_independent(J, parsed, T),
        "dirichlet_measure": dirichlet_spectral_data(J).to_dict(),
    }
    if parsed.control == "delta":
        r = response_by_simulation(J, T)
        payload["response_checks"] = {
            "r0_is_one": r[0] == 1,
            "r1_is_b1": T < 2 or r[1] == J.diagonal(1),
        }
    return JobResult(payload, wave.to_frame())


def cmd_kernel(config: JobConfig, settings: RuntimeSettings) -> JobResult:
    """Reproducing kernel K_N(z, λ), Christoffel function, optional (z, λ) lattice."""
    s = _moments(config)
    N = config.order or (len(s) + 1) // 2
    z, lam = _point(config.z, s.backend), _point(config.lam, s.backend)
    evaluation = evaluate_kernel(s, N, z, lam)
    value = christoffel(s, N, lam)
    payload = {
        "backend": s.backend.value,
        "N": N,
        **evaluation.to_dict(),
        "christoffel": float(value.kappa),
    }

    frame = None
    if config.grid or config.format is OutputFormat.CSV:
        points = np.linspace(config.grid_min, config.grid_max, config.grid_points)
        lattice = kernel_lattice(s, N, points)
        z_grid, lam_grid = np.meshgrid(points, points, indexing="ij")
        frame = pd.DataFrame(
            {
                "z": z_grid.ravel(),
                "lambda": lam_grid.ravel(),
                "kernel": lattice.ravel(),
            }
        )
        diagonal = np.diag(lattice)
        payload["grid"] = frame.to_dict(orient="list")
        payload["christoffel_grid"] = {
            "lambda": points.tolist(),
            "kernel_diagonal": diagonal.tolist(),
            "christoffel": (1.0 / diagonal).tolist(),
        }
    return JobResult(payload, frame)


def cmd_determinacy(config: JobConfig, settings: RuntimeSettings) -> JobResult:
    """Finite-order Hamburger or Stieltjes determinacy report."""
    s = _moments(config)
    Tmax = config.tmax or config.order or (len(s) + 1) // 2
    if config.problem is Problem.STIELTJES:
        report = stieltjes_report(s, Tmax, config.tolerances, settings.threads)
    else:
        report = hamburger_report(s, Tmax, config.tolerances, settings.threads)
    payload = {"backend": s.backend.value, "Tmax": Tmax, **report.to_dict()}
    if config.problem is Problem.STIELTJES and len(s) >= 2 * Tmax:
        payload["interleaving"] = interleaving_check(
            s, Tmax, config.tolerances, extended=_extended(config, settings)
        ).to_dict()
    return JobResult(payload, report.to_frame())


# --- Round trips ---


def _roundtrip_one(J: JacobiCoefficients, config: JobConfig, settings: RuntimeSettings) -> dict:
    """simulate → moments → solve → moments, against the Dirichlet oracle."""
    N = J.N
    r = response_by_simulation(J, 2 * N)
    s = response_to_moments(r)
    if config.backend is Backend.F64 and s.exact:
        # float64 moment data: the exact moments rounded once
        s = s.to_float()
    # exact data always get the extended-precision solve
    extended = True if s.exact else _extended(config, settings)
    mu = solve_truncated(s, N, config.tolerances, extended=extended)
    truth = dirichlet_spectral_data(J)
    atom_error = float(np.max(np.abs(mu.atoms_array() - truth.atoms_array())))
    weight_error = float(np.max(np.abs(to_float_array(mu.weights_array()) - truth.weights_array())))
    _, moment_error = moment_errors(mu, s, 2 * N)
    return {
        "N": N,
        "backend": s.backend.value,
        "jacobi": J.to_dict(),
        "max_atom_error": atom_error,
        "max_weight_error": weight_error,
        "max_moment_error": moment_error,
    }


def random_jacobi(rng: np.random.Generator) -> JacobiCoefficients:
    """Coefficients k/64 drawn from the configured ranges."""
    low, high = RANDOM_ORDER_RANGE
    N = int(rng.integers(low, high + 1))

    def draw(bounds: tuple[float, float], count: int) -> list[sympy.Rational]:
        lo, hi = (round(x * RANDOM_DENOMINATOR) for x in bounds)
        return [sympy.Rational(int(k), RANDOM_DENOMINATOR) for k in rng.integers(lo, hi + 1, size=count)]

    a = [sympy.Integer(1)] + draw(RANDOM_A_RANGE, N - 1)
    b = draw(RANDOM_B_RANGE, N)
    return JacobiCoefficients(tuple(a), tuple(b), Backend.RATIONAL)


def cmd_roundtrip(config: JobConfig, settings: RuntimeSettings) -> JobResult:
    """Round trip a Jacobi system (or a random batch) through the solver."""
    if config.random is not None:
        rng = np.random.default_rng(config.seed)
        systems = [random_jacobi(rng) for _ in range(config.random)]
    else:
        parsed = _jacobi(config)
        try:
            systems = [parsed.coefficients(config.backend)]
        except ValueError as e:
            raise ParseError(str(config.input), str(e)) from e

    results = [
        _roundtrip_one(J, config, settings)
        for J in tqdm(systems, desc="roundtrip", disable=len(systems) == 1, file=sys.stderr)
    ]
    payload = {
        "count": len(results),
        "seed": config.seed if config.random is not None else None,
        "max_atom_error": max(r["max_atom_error"] for r in results),
        "max_weight_error": max(r["max_weight_error"] for r in results),
        "max_moment_error": max(r["max_moment_error"] for r in results),
        "systems": results,
    }
    return JobResult(payload)


HANDLERS = {
    Command.CHECK: cmd_check,
    Command.TRANSFORM: cmd_transform,
    Command.OPERATORS: cmd_operators,
    Command.SOLVE: cmd_solve,
    Command.SIMULATE: cmd_simulate,
    Command.KERNEL: cmd_kernel,
    Command.DETERMINACY: cmd_determinacy,
    Command.ROUNDTRIP: cmd_roundtrip,
}


# --- Runner ---


def _error_payload(error: MomentBCError) -> dict:
    kind = "parse-error" if isinstance(error, ParseError) else "domain-error"
    return {
        "error": {
            "kind": kind,
            "code": error.code,
            "message": str(error),
            "details": error.details,
        }
    }


def run(config: JobConfig, settings: RuntimeSettings | None = None) -> int:
    """Run one job and write its output; returns the exit status."""
    settings = settings or runtime_settings()
    status, failure = EXIT_OK, None
    with DiagnosticsCollector() as diagnostics:
        try:
            result = HANDLERS[config.command](config, settings)
        except MomentBCError as e:
            failure = e
        except ValueError as e:
            # precondition misuse, e.g. an order the data cannot support
            failure = MomentBCError(str(e))
            failure.code = "invalid-argument"

    if failure is not None:
        log_error(logger, config.command.value, failure, code=failure.code)
        result = JobResult(_error_payload(failure))
        status = EXIT_PARSE_ERROR if isinstance(failure, ParseError) else EXIT_DOMAIN_ERROR

    target = open(config.output, "w") if config.output else nullcontext(sys.stdout)
    with target as out:
        if status == EXIT_OK and config.format is OutputFormat.CSV and result.frame is not None:
            write_csv(result.frame, out)
        else:
            write_json(document(result.payload, diagnostics.entries), out)
    return status

"""
Configuration for momentbc.

Numerical tolerances live in a frozen dataclass so a job can override them
(``--tol``) without touching module state. Runtime knobs come from the
environment (``.env`` is loaded by the CLI entry point).
"""

import os
from dataclasses import dataclass, replace


# =============================================================================
# Output Format
# =============================================================================

SCHEMA_VERSION = "momentbc/1"
FLOAT_FORMAT = "%.17g"  # 17 significant digits round-trips float64


# =============================================================================
# Numerical Tolerances
# =============================================================================

PIVOT_TOLERANCE = 1e-10  # smallest Cholesky pivot relative to largest diagonal entry
SYMMETRY_TOLERANCE = 1e-12  # relative asymmetry accepted before symmetrizing
EIGEN_TOLERANCE = 1e-14  # off-diagonal / Frobenius norm at rotation convergence
CONDITION_LIMIT = 1e12  # condition estimate that triggers a warning
DEGENERACY_GAP = 1e-9  # minimal eigenvalue gap relative to spectral diameter
MAX_SWEEPS = 100
EXTENDED_PRECISION_DPS = 50  # decimal digits for the mpmath re-solve
CONSISTENCY_TOLERANCE = 1e-9  # cross-check residuals above this are reported
ACCURACY_TARGET = 1e-12  # float solves with cond(C)·eps above this are redone from exact data
REBUILD_CONDITION_CAP = 1e13  # float C conditioned worse than this counts as degenerate, not rebuilt


# =============================================================================
# Determinacy Trends
# =============================================================================

TREND_MIN_ORDERS = 3  # fewer orders never count as a bounded trend
TREND_WINDOW = 2  # increments inspected at the end of a table
TREND_RATIO = 1e-3  # window increments below this fraction of the value look bounded


# =============================================================================
# Randomized Round-Trip Batches
# =============================================================================

RANDOM_ORDER_RANGE = (2, 10)
RANDOM_A_RANGE = (0.5, 2.0)
RANDOM_B_RANGE = (-1.0, 1.0)
RANDOM_DENOMINATOR = 64  # random coefficients are k/64 so exact runs stay cheap


# =============================================================================
# Runtime Defaults
# =============================================================================

DEFAULT_THREADS = min(4, os.cpu_count() or 1)
DEFAULT_LOG_LEVEL = "WARNING"


@dataclass(frozen=True)
class Tolerances:
    """Numerical tolerances shared by the solvers."""

    pivot: float = PIVOT_TOLERANCE
    symmetry: float = SYMMETRY_TOLERANCE
    eigen: float = EIGEN_TOLERANCE
    condition_limit: float = CONDITION_LIMIT
    degeneracy: float = DEGENERACY_GAP
    consistency: float = CONSISTENCY_TOLERANCE
    accuracy: float = ACCURACY_TARGET
    rebuild_cap: float = REBUILD_CONDITION_CAP
    max_sweeps: int = MAX_SWEEPS
    extended_dps: int = EXTENDED_PRECISION_DPS

    def __post_init__(self):
        """Validate configuration."""
        for name in (
            "pivot",
            "symmetry",
            "eigen",
            "condition_limit",
            "degeneracy",
            "consistency",
            "accuracy",
            "rebuild_cap",
        ):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} tolerance must be positive")
        if self.max_sweeps < 1:
            raise ValueError("max_sweeps must be at least 1")
        if self.extended_dps < 16:
            raise ValueError("extended_dps must be at least 16")

    def with_overrides(self, tol: float | None = None) -> "Tolerances":
        """Apply the CLI ``--tol`` override to the eigen and pivot tolerances."""
        if tol is None:
            return self
        return replace(self, eigen=tol, pivot=max(tol, self.pivot))


DEFAULT_TOLERANCES = Tolerances()


@dataclass
class RuntimeSettings:
    """Environment-driven runtime settings."""

    threads: int = DEFAULT_THREADS
    extended_precision: bool = True
    log_level: str = DEFAULT_LOG_LEVEL

    def __post_init__(self):
        """Validate configuration."""
        if self.threads < 1:
            raise ValueError("MOMENTBC_THREADS must be at least 1")
        if self.log_level.upper() not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            raise ValueError(f"MOMENTBC_LOG_LEVEL has unknown level {self.log_level!r}")
        self.log_level = self.log_level.upper()

    @classmethod
    def from_env(cls) -> "RuntimeSettings":
        """Read ``MOMENTBC_*`` variables from the environment."""
        threads = os.getenv("MOMENTBC_THREADS")
        extended = os.getenv("MOMENTBC_EXTENDED_PRECISION")
        try:
            return cls(
                threads=int(threads) if threads else DEFAULT_THREADS,
                extended_precision=extended.strip().lower() not in ("0", "false", "no", "off")
                if extended
                else True,
                log_level=os.getenv("MOMENTBC_LOG_LEVEL", DEFAULT_LOG_LEVEL),
            )
        except ValueError as e:
            if threads and not threads.strip().lstrip("-").isdigit():
                raise ValueError(f"MOMENTBC_THREADS must be an integer, got {threads!r}") from e
            raise


def runtime_settings() -> RuntimeSettings:
    """Current runtime settings from the environment."""
    return RuntimeSettings.from_env()

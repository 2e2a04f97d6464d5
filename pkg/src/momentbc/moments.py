"""
Moment sequences, Hankel blocks and feasibility classification.

Hankel blocks come in two orientations. The standard block of order N and
shift m holds s_{i+j+m} (0-based); the flipped block is J·standard·J and has
s_{2N-2+m} in its top-left corner, the layout the connecting-operator
factorizations use.
"""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from momentbc.backend import (
    ScalarSequence,
    Scalar,
    check_positive_definite,
    determinant,
    flip,
    is_positive_semidefinite,
)
from momentbc.config import PIVOT_TOLERANCE
from momentbc.errors import InsufficientDataError
from momentbc.logging import get_logger

logger = get_logger(__name__)


class MomentSequence(ScalarSequence):
    """Moments s_0..s_M with a uniform backend tag."""

    def require(self, count: int) -> None:
        """Raise InsufficientDataError unless at least ``count`` moments exist."""
        if len(self) < count:
            raise InsufficientDataError(count, len(self), "moments")


class Orientation(str, Enum):
    STANDARD = "standard"
    FLIPPED = "flipped"


@dataclass(frozen=True, eq=False)
class HankelBlock:
    """An N×N Hankel block of a moment sequence."""

    order: int
    shift: int
    orientation: Orientation
    entries: np.ndarray = field(repr=False)

    def determinant(self) -> Scalar:
        return determinant(self.entries)

    def reoriented(self, orientation: Orientation) -> "HankelBlock":
        if orientation is self.orientation:
            return self
        return HankelBlock(self.order, self.shift, orientation, flip(self.entries))


def hankel_block(
    s: MomentSequence,
    m: int,
    N: int,
    o: Orientation = Orientation.STANDARD,
) -> HankelBlock:
    """Hankel block of order ``N`` and shift ``m`` in orientation ``o``."""
    if N < 1:
        raise ValueError(f"order must be positive, got {N}")
    if m < 0:
        raise ValueError(f"shift must be non-negative, got {m}")
    s.require(2 * N - 1 + m)

    values = s.as_array()
    index = np.add.outer(np.arange(N), np.arange(N)) + m
    standard = values[index]
    if Orientation(o) is Orientation.FLIPPED:
        return HankelBlock(N, m, Orientation.FLIPPED, flip(standard))
    return HankelBlock(N, m, Orientation.STANDARD, standard)


# --- Classification ---


class Verdict(str, Enum):
    HAMBURGER = "hamburger-feasible"
    STIELTJES = "stieltjes-feasible"
    HAUSDORFF = "hausdorff-feasible"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class OrderFlags:
    """Positivity flags at one truncation order (None: moment not available)."""

    order: int
    s0_positive: bool
    s1_positive: bool | None = None
    difference_psd: bool | None = None


@dataclass(frozen=True)
class Classification:
    """Per-order positivity flags and the strongest feasible problem class."""

    flags: tuple[OrderFlags, ...]
    verdict: Verdict
    failing_order: int | None = None

    @property
    def label(self) -> str:
        if self.verdict is Verdict.INFEASIBLE:
            return f"infeasible-at-order-{self.failing_order}"
        return self.verdict.value

    @property
    def hamburger(self) -> bool:
        return self.verdict is not Verdict.INFEASIBLE

    @property
    def stieltjes(self) -> bool | None:
        """None when S₁ passed wherever it was tested but an order lacked s_{2N-1}."""
        if self.verdict in (Verdict.STIELTJES, Verdict.HAUSDORFF):
            return True
        if self.verdict is Verdict.INFEASIBLE or any(f.s1_positive is False for f in self.flags):
            return False
        return None

    @property
    def hausdorff(self) -> bool | None:
        if self.verdict is Verdict.HAUSDORFF:
            return True
        if self.stieltjes is False or any(f.difference_psd is False for f in self.flags):
            return False
        return None

    def to_dict(self) -> dict:
        return {
            "verdict": self.label,
            "stieltjes_feasible": self.stieltjes,
            "hausdorff_feasible": self.hausdorff,
            "orders": [
                {
                    "order": f.order,
                    "s0_positive_definite": f.s0_positive,
                    "s1_positive_definite": f.s1_positive,
                    "s0_minus_s1_semidefinite": f.difference_psd,
                }
                for f in self.flags
            ],
        }


def classify(s: MomentSequence, Nmax: int, tol: float = PIVOT_TOLERANCE) -> Classification:
    """Test S₀, S₁ and S₀−S₁ order by order up to ``Nmax``.

    S₁ flags are only computed at orders where s_{2N-1} is available; when
    one is missing the Stieltjes and Hausdorff answers stay undetermined
    (None) unless a tested order already rules them out. The first order
    whose S₀ fails ends the scan.
    """
    if Nmax < 1:
        raise ValueError(f"Nmax must be positive, got {Nmax}")
    s.require(2 * Nmax - 1)

    flags: list[OrderFlags] = []
    for N in range(1, Nmax + 1):
        s0 = hankel_block(s, 0, N).entries
        if not check_positive_definite(s0, tol, name=f"S0^{N}").positive:
            flags.append(OrderFlags(N, False))
            logger.info(f"S0 fails at order {N}")
            return Classification(tuple(flags), Verdict.INFEASIBLE, failing_order=N)

        if len(s) < 2 * N:
            flags.append(OrderFlags(N, True))
            continue
        s1 = hankel_block(s, 1, N).entries
        s1_positive = bool(check_positive_definite(s1, tol, name=f"S1^{N}").positive)
        difference_psd = bool(is_positive_semidefinite(s0 - s1, tol))
        flags.append(OrderFlags(N, True, s1_positive, difference_psd))

    if all(f.s1_positive is True for f in flags):
        if all(f.difference_psd is True for f in flags):
            verdict = Verdict.HAUSDORFF
        else:
            verdict = Verdict.STIELTJES
    else:
        verdict = Verdict.HAMBURGER
    return Classification(tuple(flags), verdict)

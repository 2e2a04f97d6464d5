"""
Pytest fixtures for moment data and Jacobi systems.
"""

import json
import sys
from pathlib import Path

import pytest
import sympy

# Add src to path for imports
src_path = Path(__file__).parent.parent / "src"
sys.path.insert(0, str(src_path))

from momentbc.backend import Backend
from momentbc.config import RuntimeSettings
from momentbc.jacobi_sim import JacobiCoefficients
from momentbc.moments import MomentSequence

FIXTURES = Path(__file__).parent.parent / "fixtures"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def hilbert() -> MomentSequence:
    """s_k = 1/(k+1), the moments of Lebesgue measure on [0, 1]."""
    return MomentSequence(tuple(sympy.Rational(1, k + 1) for k in range(16)), Backend.RATIONAL)


@pytest.fixture
def symmetric_pair() -> MomentSequence:
    """Moments of (δ₋₁ + δ₁)/2."""
    return MomentSequence((1, 0, 1, 0, 1), Backend.RATIONAL)


@pytest.fixture
def single_atom() -> MomentSequence:
    """Moments of δ₂."""
    return MomentSequence((1, 2, 4, 8), Backend.RATIONAL)


@pytest.fixture
def free_jacobi() -> JacobiCoefficients:
    return JacobiCoefficients.free(2, Backend.RATIONAL)


@pytest.fixture
def rational_jacobi() -> JacobiCoefficients:
    return JacobiCoefficients(
        (1, "3/2", "1/2"),
        ("1/4", "-1/2", "3/4"),
        Backend.RATIONAL,
    )


@pytest.fixture
def ladder_jacobi():
    """Rational N-site systems with a_n = 1 + n/32 and b_n = (−1)ⁿ/4."""

    def _build(N: int) -> JacobiCoefficients:
        a = (1,) + tuple(sympy.Rational(32 + n, 32) for n in range(1, N))
        b = tuple(sympy.Rational((-1) ** n, 4) for n in range(1, N + 1))
        return JacobiCoefficients(a, b, Backend.RATIONAL)

    return _build


@pytest.fixture
def settings() -> RuntimeSettings:
    """Single-threaded settings with the extended-precision fallback on."""
    return RuntimeSettings(threads=1, extended_precision=True, log_level="WARNING")


@pytest.fixture
def write_input(tmp_path):
    """Write a JSON input document and return its path."""

    def _write(payload: dict, name: str = "input.json") -> Path:
        path = tmp_path / name
        path.write_text(json.dumps(payload))
        return path

    return _write

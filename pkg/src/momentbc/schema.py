"""Input file schemas for the command-line jobs."""

import json
from enum import Enum
from pathlib import Path
from typing import Any, Literal, TypeVar

from pydantic import BaseModel, Field, TypeAdapter, ValidationError, field_validator, model_validator

from momentbc.backend import Backend, parse_scalar
from momentbc.chebyshev import ResponseVector
from momentbc.errors import ParseError
from momentbc.jacobi_sim import ControlVector, JacobiCoefficients
from momentbc.moments import MomentSequence

M = TypeVar("M", bound=BaseModel)

Number = int | float | str


class BackendChoice(str, Enum):
    """Backend named in an input file; AUTO picks rational for all-exact data."""

    F64 = "f64"
    RATIONAL = "rational"
    AUTO = "auto"


def _exact_literal(value: Number) -> bool:
    return isinstance(value, (int, str))


def resolve_backend(values: list[Number], choice: BackendChoice | str | None) -> Backend:
    """Explicit choice wins; AUTO (or nothing) is rational iff no float literal appears."""
    choice = BackendChoice(choice) if choice is not None else BackendChoice.AUTO
    if choice is BackendChoice.AUTO:
        return Backend.RATIONAL if all(_exact_literal(v) for v in values) else Backend.F64
    return Backend(choice.value)


def _check_numbers(values: list[Number], backend: BackendChoice) -> list[Number]:
    target = Backend.F64 if backend is BackendChoice.AUTO else Backend(backend.value)
    for value in values:
        parse_scalar(value, target)
    return values


class MomentFile(BaseModel):
    """Moments s_0..s_M."""

    model_config = {"extra": "forbid"}

    moments: list[Number] = Field(min_length=1, description="s_0, s_1, … as ints, floats or 'p/q' strings")
    backend: BackendChoice = Field(default=BackendChoice.AUTO, description="Arithmetic for the job")

    @model_validator(mode="after")
    def _numbers(self) -> "MomentFile":
        _check_numbers(self.moments, self.backend)
        return self

    def to_sequence(self, backend: Backend | str | None = None) -> MomentSequence:
        return MomentSequence(tuple(self.moments), backend or resolve_backend(self.moments, self.backend))


class ResponseFile(BaseModel):
    """Response entries r_0..r_{T-1}."""

    model_config = {"extra": "forbid"}

    response: list[Number] = Field(min_length=1, description="r_0, r_1, …")
    backend: BackendChoice = Field(default=BackendChoice.AUTO, description="Arithmetic for the job")

    @model_validator(mode="after")
    def _numbers(self) -> "ResponseFile":
        _check_numbers(self.response, self.backend)
        return self

    def to_sequence(self, backend: Backend | str | None = None) -> ResponseVector:
        return ResponseVector(tuple(self.response), backend or resolve_backend(self.response, self.backend))


class JacobiFile(BaseModel):
    """Jacobi coefficients, optional horizon and control."""

    model_config = {"extra": "forbid"}

    a: list[Number] = Field(min_length=1, description="a_0 = 1, a_1, …, a_{N-1} (positive)")
    b: list[Number] = Field(min_length=1, description="b_1, …, b_N")
    T: int | None = Field(default=None, ge=1, description="Simulation horizon (default 2N)")
    control: Literal["delta"] | list[Number] = Field(default="delta", description="'delta' or f_0, f_1, …")
    backend: BackendChoice = Field(default=BackendChoice.AUTO, description="Arithmetic for the job")

    @field_validator("a")
    @classmethod
    def _first_coupling(cls, a: list[Number]) -> list[Number]:
        if parse_scalar(a[0], Backend.F64) != 1.0:
            raise ValueError("a[0] must be 1")
        if any(parse_scalar(x, Backend.F64) <= 0 for x in a):
            raise ValueError("all a_n must be positive")
        return a

    @model_validator(mode="after")
    def _shape(self) -> "JacobiFile":
        if len(self.a) != len(self.b):
            raise ValueError(f"a and b must have equal lengths, got {len(self.a)} and {len(self.b)}")
        _check_numbers(self.a + self.b, self.backend)
        if isinstance(self.control, list):
            if not self.control:
                raise ValueError("control must not be empty")
            _check_numbers(self.control, self.backend)
        return self

    @property
    def literals(self) -> list[Number]:
        controls = self.control if isinstance(self.control, list) else []
        return self.a + self.b + controls

    def coefficients(self, backend: Backend | str | None = None) -> JacobiCoefficients:
        backend = backend or resolve_backend(self.literals, self.backend)
        return JacobiCoefficients(tuple(self.a), tuple(self.b), backend)

    def control_vector(self, backend: Backend | str | None = None) -> ControlVector:
        backend = backend or resolve_backend(self.literals, self.backend)
        if self.control == "delta":
            return ControlVector.delta(backend)
        return ControlVector(tuple(self.control), backend)

    @property
    def horizon(self) -> int:
        return self.T if self.T is not None else 2 * len(self.b)


TransformFile = MomentFile | ResponseFile


def load_input(path: str | Path, model: type[M] | Any) -> M:
    """Read and validate a JSON input file against a model (or a union of models).

    Raises:
        ParseError: missing file, malformed JSON or schema violation
    """
    path = Path(path)
    try:
        document = json.loads(path.read_text())
    except FileNotFoundError as e:
        raise ParseError(str(path), "file not found") from e
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as e:
        raise ParseError(str(path), str(e)) from e
    try:
        return TypeAdapter(model).validate_python(document)
    except ValidationError as e:
        raise ParseError(str(path), str(e)) from e

"""
Output documents.

JSON floats are written with 17 significant digits, rationals as "p/q"
strings. Key order is insertion order, so identical inputs give identical
bytes.
"""

import json
import sys
from enum import Enum
from typing import IO, Any

import numpy as np
import pandas as pd
import sympy

from momentbc.config import FLOAT_FORMAT, SCHEMA_VERSION


def to_json_value(value: Any) -> Any:
    """Recursively convert numbers, arrays and enums to JSON-ready values."""
    if isinstance(value, dict):
        return {str(k): to_json_value(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_json_value(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_json_value(v) for v in value.tolist()]
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, sympy.Rational):
        return str(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if not np.isfinite(value):
            return None
        return float(format(value, ".17g"))
    return value


def document(payload: dict, diagnostics: list[dict] | None = None) -> dict:
    """Wrap a payload with the schema tag and the diagnostics array."""
    return {"schema": SCHEMA_VERSION, **payload, "diagnostics": list(diagnostics or [])}


def dumps(doc: dict) -> str:
    return json.dumps(to_json_value(doc), indent=2, ensure_ascii=False) + "\n"


def write_json(doc: dict, out: IO[str] | None = None) -> None:
    (out or sys.stdout).write(dumps(doc))


def write_csv(frame: pd.DataFrame, out: IO[str] | None = None) -> None:
    """CSV with a leading schema comment line."""
    out = out or sys.stdout
    out.write(f"# schema: {SCHEMA_VERSION}\n")
    frame.to_csv(out, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")

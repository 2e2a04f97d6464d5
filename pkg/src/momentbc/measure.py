"""
Discrete measures: the solutions of truncated moment problems.
"""

from dataclasses import dataclass

import numpy as np
import pandas as pd
import sympy

from momentbc.backend import Backend, Scalar, format_scalar, parse_scalar
from momentbc.moments import MomentSequence


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """Atoms λ_1 < … < λ_N with weights w_k = 1/ρ_k > 0."""

    atoms: tuple
    weights: tuple
    backend: Backend = Backend.F64

    def __post_init__(self):
        backend = Backend(self.backend)
        atoms = tuple(parse_scalar(a, backend) for a in self.atoms)
        weights = tuple(parse_scalar(w, backend) for w in self.weights)
        if not atoms:
            raise ValueError("a measure needs at least one atom")
        if len(atoms) != len(weights):
            raise ValueError(f"{len(atoms)} atoms but {len(weights)} weights")
        if any(b <= a for a, b in zip(atoms, atoms[1:])):
            raise ValueError("atoms must be strictly increasing")
        if any(w <= 0 for w in weights):
            raise ValueError("weights must be positive")
        object.__setattr__(self, "backend", backend)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "weights", weights)

    def __len__(self) -> int:
        return len(self.atoms)

    @property
    def exact(self) -> bool:
        return self.backend is Backend.RATIONAL

    @property
    def norming(self) -> tuple[Scalar, ...]:
        """Norming constants ρ_k = 1/w_k."""
        one = sympy.Integer(1) if self.exact else 1.0
        return tuple(one / w for w in self.weights)

    @property
    def total_mass(self) -> Scalar:
        return sum(self.weights[1:], self.weights[0])

    def atoms_array(self) -> np.ndarray:
        return np.array(self.atoms, dtype=object if self.exact else float)

    def weights_array(self) -> np.ndarray:
        return np.array(self.weights, dtype=object if self.exact else float)

    def to_float(self) -> "DiscreteMeasure":
        return DiscreteMeasure(
            tuple(float(a) for a in self.atoms),
            tuple(float(w) for w in self.weights),
        )

    def step_function(self) -> pd.DataFrame:
        """Spectral function ρ^N as (lambda, cumulative_mass) after each jump."""
        weights = [float(w) for w in self.weights]
        return pd.DataFrame(
            {
                "lambda": [float(a) for a in self.atoms],
                "cumulative_mass": np.cumsum(weights),
            }
        )

    def to_dict(self) -> dict:
        return {
            "atoms": [format_scalar(a) for a in self.atoms],
            "weights": [format_scalar(w) for w in self.weights],
            "norming": [format_scalar(r) for r in self.norming],
        }


def moments_of_measure(mu: DiscreteMeasure, kmax: int) -> MomentSequence:
    """s_j = Σ_k w_k λ_k^j for j = 0..kmax by direct summation."""
    if kmax < 0:
        raise ValueError(f"kmax must be non-negative, got {kmax}")
    if mu.exact:
        values = tuple(
            sum((w * a**j for a, w in zip(mu.atoms, mu.weights)), sympy.Integer(0))
            for j in range(kmax + 1)
        )
        return MomentSequence(values, Backend.RATIONAL)
    powers = np.vander(mu.atoms_array(), kmax + 1, increasing=True)
    return MomentSequence(tuple((powers.T @ mu.weights_array()).tolist()), Backend.F64)

"""
Tests for discrete measures.
"""

import pytest
import sympy

from momentbc.backend import Backend
from momentbc.measure import DiscreteMeasure, moments_of_measure


class TestDiscreteMeasure:
    """Tests for measure validation and derived quantities."""

    def test_norming_constants(self):
        mu = DiscreteMeasure((-1, 1), ("1/4", "3/4"), Backend.RATIONAL)
        assert mu.norming == (4, sympy.Rational(4, 3))
        assert mu.total_mass == 1

    def test_atoms_must_increase(self):
        with pytest.raises(ValueError, match="increasing"):
            DiscreteMeasure((1.0, -1.0), (0.5, 0.5))

    def test_weights_must_be_positive(self):
        with pytest.raises(ValueError, match="positive"):
            DiscreteMeasure((0.0, 1.0), (1.0, 0.0))

    def test_lengths_must_match(self):
        with pytest.raises(ValueError):
            DiscreteMeasure((0.0, 1.0), (1.0,))

    def test_step_function(self):
        frame = DiscreteMeasure((-1.0, 0.0, 2.0), (0.25, 0.25, 0.5)).step_function()
        assert list(frame.columns) == ["lambda", "cumulative_mass"]
        assert frame["cumulative_mass"].tolist() == [0.25, 0.5, 1.0]

    def test_to_dict(self):
        payload = DiscreteMeasure((2,), (1,), Backend.RATIONAL).to_dict()
        assert payload == {"atoms": ["2"], "weights": ["1"], "norming": ["1"]}


class TestMomentsOfMeasure:
    """Tests for direct moment summation."""

    def test_exact(self):
        mu = DiscreteMeasure((-1, 1), ("1/2", "1/2"), Backend.RATIONAL)
        assert moments_of_measure(mu, 4).values == (1, 0, 1, 0, 1)

    def test_float(self):
        mu = DiscreteMeasure((2.0,), (1.0,))
        assert moments_of_measure(mu, 3).values == (1.0, 2.0, 4.0, 8.0)

    def test_negative_kmax(self):
        with pytest.raises(ValueError):
            moments_of_measure(DiscreteMeasure((0.0,), (1.0,)), -1)

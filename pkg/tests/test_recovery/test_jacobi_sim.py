"""
Tests for the Jacobi dynamical system and its spectral data.
"""

import numpy as np
import pytest
import sympy

from momentbc.backend import Backend, exactly_equal
from momentbc.chebyshev import moments_to_response, response_to_moments
from momentbc.jacobi_sim import (
    ControlVector,
    JacobiCoefficients,
    control_operator_matrix,
    dirichlet_spectral_data,
    jacobi_from_moments,
    phi_xi,
    response_by_simulation,
    simulate,
)
from momentbc.measure import moments_of_measure


class TestJacobiCoefficients:
    """Tests for coefficient validation."""

    def test_first_coupling_must_be_one(self):
        with pytest.raises(ValueError, match="a_0"):
            JacobiCoefficients((2, 1), (0, 0))

    def test_couplings_must_be_positive(self):
        with pytest.raises(ValueError, match="positive"):
            JacobiCoefficients((1, -1), (0, 0))

    def test_lengths_must_match(self):
        with pytest.raises(ValueError):
            JacobiCoefficients((1,), (0, 0))

    def test_free_values_past_stored_range(self, rational_jacobi):
        assert rational_jacobi.coupling(5) == 1
        assert rational_jacobi.diagonal(7) == 0
        assert rational_jacobi.diagonal(2) == sympy.Rational(-1, 2)

    def test_block(self, rational_jacobi):
        np.testing.assert_allclose(
            rational_jacobi.block(),
            [[0.25, 1.5, 0.0], [1.5, -0.5, 0.5], [0.0, 0.5, 0.75]],
        )


class TestSimulate:
    """Tests for explicit time stepping."""

    def test_free_response(self, free_jacobi):
        """The free 2-site system responds with (1, 0, 0, 0)."""
        assert response_by_simulation(free_jacobi, 4).values == (1, 0, 0, 0)

    def test_first_response_entries(self, rational_jacobi):
        """r_0 = 1 and r_1 = b_1."""
        r = response_by_simulation(rational_jacobi, 4)
        assert r[0] == 1
        assert r[1] == sympy.Rational(1, 4)

    def test_finite_speed(self, rational_jacobi):
        wave = simulate(rational_jacobi, ControlVector((1, 2, -1), Backend.RATIONAL), 6)
        assert wave.finite_speed_holds()

    def test_boundary_independence(self, rational_jacobi):
        """The far boundary cannot reach site 1 before time 2N."""
        f = ControlVector.delta(Backend.RATIONAL)
        closed = simulate(rational_jacobi, f, 10, dirichlet=True).boundary_trace()
        open_ = simulate(rational_jacobi, f, 10, dirichlet=False).boundary_trace()
        assert exactly_equal(closed[:6], open_[:6])
        assert not exactly_equal(closed, open_)

    def test_response_matches_spectral_moments(self, rational_jacobi):
        """Simulated response equals Λ applied to the Dirichlet moments."""
        r = response_by_simulation(rational_jacobi, 6)
        s = moments_of_measure(dirichlet_spectral_data(rational_jacobi), 5)
        np.testing.assert_allclose(moments_to_response(s).as_array(), r.as_array().astype(float), atol=1e-12)

    def test_frame_layout(self, free_jacobi):
        frame = simulate(free_jacobi, ControlVector.delta(Backend.RATIONAL), 3).to_frame()
        assert list(frame.columns) == ["t", "v_0", "v_1", "v_2", "v_3"]
        assert frame["v_1"].tolist() == [0.0, 1.0, 0.0, 0.0]

    def test_invalid_horizon(self, free_jacobi):
        with pytest.raises(ValueError):
            simulate(free_jacobi, ControlVector.delta(), 0)

    def test_control_extension(self):
        extended = ControlVector((3, 4), Backend.RATIONAL).extended()
        assert extended.tolist() == [0, 3, 4, 0]


class TestPolynomialSolutions:
    """Tests for φ and ξ."""

    def test_free_system(self, free_jacobi):
        lam = sympy.Rational(3)
        solutions = phi_xi(free_jacobi, lam, 3)
        assert solutions.phi == (0, 1, 3, 8)
        assert solutions.xi == (-1, 0, 1, 3)

    def test_eigenvalues_are_roots(self, rational_jacobi):
        """Dirichlet eigenvalues are the zeros of φ_{N+1}."""
        for lam in dirichlet_spectral_data(rational_jacobi).atoms:
            assert abs(phi_xi(rational_jacobi, lam, 4).phi[4]) < 1e-10

    def test_nmax_bound(self, free_jacobi):
        with pytest.raises(ValueError):
            phi_xi(free_jacobi, 0.0, 4)


class TestDirichletSpectralData:
    """Tests for the Dirichlet measure."""

    def test_free_two_sites(self, free_jacobi):
        mu = dirichlet_spectral_data(free_jacobi)
        assert mu.atoms == pytest.approx((-1.0, 1.0))
        assert mu.weights == pytest.approx((0.5, 0.5))

    def test_total_mass_is_one(self, rational_jacobi):
        assert float(dirichlet_spectral_data(rational_jacobi).total_mass) == pytest.approx(1.0)

    def test_boundary_shift_moves_last_atom_set(self, free_jacobi):
        shifted = dirichlet_spectral_data(free_jacobi, boundary_shift=1.0)
        assert shifted.atoms != pytest.approx((-1.0, 1.0))

    def test_truncated_order(self, rational_jacobi):
        mu = dirichlet_spectral_data(rational_jacobi, N=1)
        assert mu.atoms == pytest.approx((0.25,))


class TestJacobiFromMoments:
    """Tests for the Lanczos-type reconstruction."""

    def test_recovers_coefficients(self, rational_jacobi):
        s = response_to_moments(response_by_simulation(rational_jacobi, 6))
        recovered = jacobi_from_moments(s, 3)
        np.testing.assert_allclose(recovered.a, [1.0, 1.5, 0.5], rtol=1e-12)
        np.testing.assert_allclose(recovered.b, [0.25, -0.5, 0.75], atol=1e-12)

    def test_symmetric_pair(self, symmetric_pair):
        recovered = jacobi_from_moments(symmetric_pair, 2)
        assert recovered.a == pytest.approx((1.0, 1.0))
        assert recovered.b == pytest.approx((0.0, 0.0))


class TestControlOperator:
    """Tests for W^N."""

    def test_impulse_at_time_zero_reaches_far_site(self, rational_jacobi):
        """v_{N,N} = a_0 a_1 ⋯ a_{N-1} for the delta control."""
        W = control_operator_matrix(rational_jacobi, 3)
        assert W[2, 0] == sympy.Rational(3, 4)

    def test_later_impulses_stay_near_the_boundary(self, rational_jacobi):
        W = control_operator_matrix(rational_jacobi, 3)
        assert W[2, 1] == 0 and W[2, 2] == 0 and W[1, 2] == 0
        assert W[0, 2] == 1

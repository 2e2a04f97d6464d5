"""
Tests for the truncated moment problem solver and its alternative routes.
"""

import numpy as np
import pytest

from momentbc.backend import Backend
from momentbc.bc_operators import companion_operator, connecting_operator
from momentbc.chebyshev import moments_to_response, response_to_moments
from momentbc.errors import InsufficientDataError, NotPositiveDefiniteError
from momentbc.jacobi_sim import dirichlet_spectral_data, response_by_simulation
from momentbc.logging import DiagnosticsCollector
from momentbc.moments import MomentSequence, hankel_block
from momentbc.pencil import PencilProblem, solve_pencil
from momentbc.recovery import (
    dirichlet_spectrum_restricted,
    measure_report,
    moment_errors,
    restricted_measure,
    sequential_minimization,
    shift_matrix,
    solve_by_jacobi_extension,
    solve_truncated,
)


@pytest.fixture
def simulated_moments(rational_jacobi) -> MomentSequence:
    """s_0..s_5 of the three-site rational system."""
    return response_to_moments(response_by_simulation(rational_jacobi, 6))


class TestSolveTruncated:
    """Tests for the pencil route."""

    def test_symmetric_pair(self):
        s = MomentSequence((1, 0, 1, 0), Backend.RATIONAL)
        mu = solve_truncated(s, 2)
        assert mu.atoms == pytest.approx((-1.0, 1.0))
        assert mu.weights == pytest.approx((0.5, 0.5))

    def test_single_atom(self, single_atom):
        """Extra moments beyond 2N are dropped."""
        mu = solve_truncated(single_atom, 1)
        assert mu.atoms == pytest.approx((2.0,))
        assert mu.weights == pytest.approx((1.0,))

    def test_single_atom_rejects_two_atoms(self, single_atom):
        with pytest.raises(NotPositiveDefiniteError) as exc_info:
            solve_truncated(single_atom, 2)
        assert exc_info.value.order == 2

    def test_insufficient_moments(self, single_atom):
        with pytest.raises(InsufficientDataError):
            solve_truncated(single_atom, 3)

    def test_invalid_order(self, single_atom):
        with pytest.raises(ValueError):
            solve_truncated(single_atom, 0)

    def test_recovers_dirichlet_measure(self, rational_jacobi, simulated_moments):
        """simulate → moments → solve matches the Dirichlet spectral data."""
        mu = solve_truncated(simulated_moments, 3, extended=True)
        truth = dirichlet_spectral_data(rational_jacobi)
        np.testing.assert_allclose(mu.atoms_array(), truth.atoms_array(), atol=1e-12)
        np.testing.assert_allclose(mu.weights_array(), truth.weights_array(), atol=1e-12)

    def test_hilbert_reproduces_moments(self, hilbert):
        mu = solve_truncated(hilbert, 5, extended=True)
        _, error = moment_errors(mu, hilbert, 10)
        assert error < 1e-9
        assert all(0.0 < a < 1.0 for a in mu.atoms)

    def test_float_data(self):
        s = MomentSequence((1.0, 0.5, 0.5, 0.5), Backend.F64)
        mu = solve_truncated(s, 2)
        assert mu.atoms == pytest.approx((0.0, 1.0), abs=1e-12)
        assert mu.weights == pytest.approx((0.5, 0.5))

    @pytest.mark.parametrize("N", [6, 8, 10])
    def test_float_moments_of_large_systems(self, ladder_jacobi, N):
        """Ill-conditioned float data still recover atoms and weights to 1e-8."""
        J = ladder_jacobi(N)
        s = response_to_moments(response_by_simulation(J, 2 * N)).to_float()
        mu = solve_truncated(s, N)
        truth = dirichlet_spectral_data(J)
        np.testing.assert_allclose(mu.atoms_array(), truth.atoms_array(), rtol=0, atol=1e-8)
        np.testing.assert_allclose(mu.weights_array(), truth.weights_array(), rtol=0, atol=1e-8)

    def test_float_and_exact_data_agree(self, ladder_jacobi):
        J = ladder_jacobi(9)
        s = response_to_moments(response_by_simulation(J, 18))
        exact = solve_truncated(s, 9, extended=True)
        rounded = solve_truncated(s.to_float(), 9)
        np.testing.assert_allclose(rounded.atoms_array(), exact.atoms_array(), rtol=0, atol=1e-8)


class TestPencilEquivalence:
    """(B^N, C^N) and the Hankel pencil (S₁, S₀) share their eigenvalues."""

    @pytest.mark.parametrize("N", range(2, 11))
    def test_simulated_systems(self, ladder_jacobi, N):
        J = ladder_jacobi(N)
        s = response_to_moments(response_by_simulation(J, 2 * N))
        r = moments_to_response(s)
        operators = PencilProblem(companion_operator(r, N).entries, connecting_operator(r, N).entries)
        hankel = PencilProblem(hankel_block(s, 1, N).entries, hankel_block(s, 0, N).entries)
        bc_values = solve_pencil(operators, extended=True).eigenvalues
        hankel_values = solve_pencil(hankel, extended=True).eigenvalues
        np.testing.assert_allclose(bc_values, hankel_values, rtol=0, atol=1e-9)
        np.testing.assert_allclose(bc_values, np.linalg.eigvalsh(J.block()), rtol=0, atol=1e-9)


class TestMomentErrors:
    def test_exact_reproduction(self):
        s = MomentSequence((1, 0, 1, 0), Backend.RATIONAL)
        reproduced, error = moment_errors(solve_truncated(s, 2), s, 4)
        assert len(reproduced) == 4
        assert error < 1e-14

    def test_measure_report_keys(self):
        s = MomentSequence((1, 0, 1, 0), Backend.RATIONAL)
        report = measure_report(solve_truncated(s, 2), s, 4)
        assert set(report) == {"atoms", "weights", "norming", "reproduced_moments", "max_relative_moment_error"}
        assert report["norming"] == pytest.approx([2.0, 2.0])


class TestRestrictedRoute:
    """Tests for the f_0 = 0 route."""

    def test_shift_matrix(self):
        D = shift_matrix(3, Backend.RATIONAL)
        assert D.tolist() == [[0, 1, 0], [1, 0, 1], [0, 1, 0]]

    def test_spectrum_of_leading_block(self, rational_jacobi, simulated_moments):
        """Eigenvalues are the Dirichlet spectrum of the (N−1)×(N−1) block."""
        solution = dirichlet_spectrum_restricted(simulated_moments, 3)
        expected = np.linalg.eigvalsh(rational_jacobi.block(2))
        np.testing.assert_allclose(solution.eigenvalues, expected, atol=1e-12)
        assert solution.eigenvectors.shape == (3, 2)
        assert np.all(solution.eigenvectors[0] == 0)

    @pytest.mark.parametrize("N", range(2, 11))
    def test_leading_block_spectrum_up_to_ten(self, ladder_jacobi, N):
        J = ladder_jacobi(N)
        s = response_to_moments(response_by_simulation(J, 2 * N - 1))
        solution = dirichlet_spectrum_restricted(s, N, extended=True)
        expected = np.linalg.eigvalsh(J.block(N - 1))
        np.testing.assert_allclose(solution.eigenvalues, expected, rtol=0, atol=1e-9)

    def test_restricted_measure_reproduces_low_moments(self, simulated_moments):
        mu = restricted_measure(simulated_moments, 3)
        assert len(mu) == 2
        _, error = moment_errors(mu, simulated_moments, 4)
        assert error < 1e-10

    def test_sequential_minimization_agrees(self, simulated_moments):
        batch = dirichlet_spectrum_restricted(simulated_moments, 3)
        sequential = sequential_minimization(simulated_moments, 3)
        np.testing.assert_allclose(sequential.eigenvalues, batch.eigenvalues, atol=1e-10)

    def test_needs_order_two(self, simulated_moments):
        with pytest.raises(ValueError):
            restricted_measure(simulated_moments, 1)


class TestJacobiExtensionRoute:
    """Tests for recovery through an extended Jacobi matrix."""

    def test_without_extension(self, symmetric_pair):
        mu = solve_by_jacobi_extension(symmetric_pair, 2)
        assert mu.atoms == pytest.approx((-1.0, 1.0))

    def test_extension_keeps_2n_moments(self, symmetric_pair):
        mu = solve_by_jacobi_extension(symmetric_pair, 2, a_tail=(1,), b_tail=(0,))
        assert len(mu) == 3
        _, error = moment_errors(mu, symmetric_pair, 4)
        assert error < 1e-12

    def test_boundary_shift_keeps_2n_minus_1_moments(self, symmetric_pair):
        mu = solve_by_jacobi_extension(symmetric_pair, 2, boundary_shift=0.5)
        _, low = moment_errors(mu, symmetric_pair, 3)
        _, full = moment_errors(mu, symmetric_pair, 4)
        assert low < 1e-12
        assert full > 1e-3

    def test_extra_moments_logged_not_warned(self, single_atom):
        """Dropping moments past 2N is not a diagnostic."""
        with DiagnosticsCollector() as diagnostics:
            solve_truncated(single_atom, 1)
        assert diagnostics.entries == []

"""
Tests for finite-order determinacy reports and the interleaving correspondence.
"""

import numpy as np
import pytest
import sympy

from momentbc.backend import Backend, as_array, solve
from momentbc.bc_operators import connecting_operator, response_matrix
from momentbc.chebyshev import boundary_vectors, moments_to_response, response_to_moments
from momentbc.determinacy import (
    DeterminacyVerdict,
    Problem,
    bordered_determinant,
    hamburger_report,
    interleave,
    interleaving_check,
    inverse_bilinear_form,
    stieltjes_report,
)
from momentbc.errors import InsufficientDataError, NotPositiveDefiniteError, SingularMatrixError
from momentbc.jacobi_sim import JacobiCoefficients, phi_xi, response_by_simulation
from momentbc.logging import DiagnosticsCollector
from momentbc.measure import DiscreteMeasure, moments_of_measure
from momentbc.moments import MomentSequence, hankel_block
from momentbc.pencil import PencilProblem, solve_pencil


def system_moments(J: JacobiCoefficients) -> MomentSequence:
    """s_0..s_{2N-1} of a Jacobi system, by exact simulation."""
    return response_to_moments(response_by_simulation(J, 2 * J.N))


@pytest.fixture
def free_six() -> JacobiCoefficients:
    return JacobiCoefficients.free(6, Backend.RATIONAL)


@pytest.fixture
def stieltjes_measure() -> DiscreteMeasure:
    """Three positive atoms."""
    return DiscreteMeasure(("1/2", 1, 3), ("1/4", "1/4", "1/2"), Backend.RATIONAL)


class TestInverseBilinearForm:
    """Tests for (D⁻¹h, c) and the bordered-determinant identity."""

    def test_identity(self):
        D = as_array([[1, 0], [0, 1]], Backend.RATIONAL)
        e1 = np.array([1, 0])
        assert inverse_bilinear_form(D, e1, e1) == 1
        assert bordered_determinant(D, e1, e1) == -1

    def test_diagonal(self):
        D = as_array([[2, 0], [0, 5]], Backend.RATIONAL)
        e2 = np.array([0, 1])
        assert inverse_bilinear_form(D, e2, e2) == sympy.Rational(1, 5)

    def test_random_positive_definite(self):
        """solve value = −det(bordered)/det D on random pd matrices."""
        rng = np.random.default_rng(3)
        for _ in range(5):
            A = rng.normal(size=(4, 4))
            D = A @ A.T + 4 * np.eye(4)
            h, c = rng.normal(size=4), rng.normal(size=4)
            with DiagnosticsCollector() as diagnostics:
                value = inverse_bilinear_form(D, h, c)
            assert value == pytest.approx(-bordered_determinant(D, h, c) / np.linalg.det(D), rel=1e-10)
            assert diagnostics.entries == []

    def test_singular(self):
        D = as_array([[1, 1], [1, 1]], Backend.RATIONAL)
        with pytest.raises(SingularMatrixError):
            inverse_bilinear_form(D, np.array([1, 0]), np.array([1, 0]))

    def test_shape_checks(self):
        with pytest.raises(ValueError):
            inverse_bilinear_form(np.eye(2), np.ones(3), np.ones(2))
        with pytest.raises(ValueError):
            inverse_bilinear_form(np.ones((2, 3)), np.ones(2), np.ones(2))


class TestHamburgerReport:
    """Tests for the q1/q2 tables."""

    def test_symmetric_pair(self, symmetric_pair):
        report = hamburger_report(symmetric_pair, 2, threads=1)
        assert report.problem is Problem.HAMBURGER
        assert report.sequence("first") == [1, 1]
        assert report.sequence("second") == [0, 1]
        assert all(row.forms_match for row in report.rows)
        assert report.verdict is DeterminacyVerdict.NO_EVIDENCE

    def test_order_one(self):
        s = MomentSequence((4,), Backend.RATIONAL)
        row = hamburger_report(s, 1, threads=1).rows[0]
        assert row.first == sympy.Rational(1, 4)
        assert row.second == 0

    def test_free_oracle_phi_sums(self, free_six):
        """q1_T = Σ_{k≤T} φ_k(0)² on the free system."""
        report = hamburger_report(system_moments(free_six), 6, threads=2)
        phi = phi_xi(free_six, sympy.Integer(0), 6).phi
        expected = [sum(p**2 for p in phi[1 : T + 1]) for T in range(1, 7)]
        assert report.sequence("first") == expected
        assert report.sequence("first") == [1, 1, 2, 2, 3, 3]
        assert report.monotone
        assert report.orders == [1, 2, 3, 4, 5, 6]

    def test_forms_match_determinant_ratios_exactly(self, hilbert):
        report = hamburger_report(hilbert, 8, threads=1)
        for row in report.rows:
            assert row.forms_match
            assert abs(row.first) == abs(row.first_ratio)
            assert abs(row.second) == abs(row.second_ratio)

    def test_bounded_trend(self):
        """Couplings a_n = 10ⁿ make both forms level off."""
        J = JacobiCoefficients(tuple(10**n for n in range(6)), (0,) * 6, Backend.RATIONAL)
        report = hamburger_report(system_moments(J), 6, threads=1)
        assert report.verdict is DeterminacyVerdict.BOUNDED_TREND
        assert report.notes

    def test_free_oracle_grows(self, free_six):
        report = hamburger_report(system_moments(free_six), 6, threads=1)
        assert report.verdict is DeterminacyVerdict.NO_EVIDENCE

    def test_hausdorff_data_is_determinate(self, hilbert):
        report = hamburger_report(hilbert, 4, threads=1)
        assert report.feasibility == "hausdorff-feasible"
        assert report.verdict is DeterminacyVerdict.DETERMINATE

    def test_sign_convention_diagnostic(self, symmetric_pair):
        with DiagnosticsCollector() as diagnostics:
            report = hamburger_report(symmetric_pair, 2, threads=1)
        assert not report.unsigned_ratio_matches
        assert "sign-convention" in [entry["code"] for entry in diagnostics.entries]

    def test_insufficient_moments(self):
        s = MomentSequence((1, 0, 1), Backend.RATIONAL)
        with pytest.raises(InsufficientDataError):
            hamburger_report(s, 3)

    def test_not_positive_definite(self, single_atom):
        with pytest.raises(NotPositiveDefiniteError):
            hamburger_report(single_atom, 2, threads=1)

    def test_frame_columns(self, symmetric_pair):
        frame = hamburger_report(symmetric_pair, 2, threads=1).to_frame()
        assert list(frame.columns) == ["T", "q1", "q2", "q1_det_ratio", "q2_det_ratio", "forms_match", "monotone_ok"]
        assert frame["q1"].tolist() == [1.0, 1.0]

    def test_to_dict(self, symmetric_pair):
        payload = hamburger_report(symmetric_pair, 2, threads=1).to_dict()
        assert payload["problem"] == "hamburger"
        assert payload["verdict"] == "no-indeterminacy-evidence"
        assert payload["orders"][1]["q1"] == "1"
        assert "xi" not in payload["orders"][0]


class TestStieltjesReport:
    """Tests for the mass and length tables."""

    def test_single_atom_order_one(self, single_atom):
        report = stieltjes_report(single_atom, 1, threads=1)
        row = report.rows[0]
        assert row.first == 1
        assert row.second == 0
        assert row.xi == 0
        assert report.feasibility == "stieltjes-feasible"

    def test_mass_is_phi_sum(self):
        """M_T = Σ φ_k(0)² on a positive two-atom oracle."""
        J = JacobiCoefficients((1, "1/2"), (1, 2), Backend.RATIONAL)
        report = stieltjes_report(system_moments(J), 2, threads=1)
        phi = phi_xi(J, sympy.Integer(0), 2).phi
        assert report.sequence("first") == [phi[1] ** 2, phi[1] ** 2 + phi[2] ** 2]

    def test_hilbert_is_determinate(self, hilbert):
        report = stieltjes_report(hilbert, 4, threads=1)
        assert report.verdict is DeterminacyVerdict.DETERMINATE
        assert report.monotone
        assert all(row.forms_match for row in report.rows)

    def test_needs_positive_shifted_block(self, symmetric_pair):
        """Atoms at ±1 make S₁ indefinite."""
        with pytest.raises(NotPositiveDefiniteError):
            stieltjes_report(symmetric_pair, 2, threads=1)

    @pytest.mark.parametrize("T", range(1, 9))
    def test_xi_matches_response_form(self, hilbert, T):
        """((S₀^T)⁻¹g, g) equals ((C^T)⁻¹(R^T)*Γ_T, (R^T)*Γ_T) exactly."""
        row = stieltjes_report(hilbert, T, threads=1).rows[-1]
        r = moments_to_response(hilbert.truncate(2 * T - 1))
        C = connecting_operator(r, T).entries
        gamma = as_array(boundary_vectors(T).gamma, Backend.RATIONAL)
        pulled = response_matrix(r, T).entries.T @ gamma
        assert row.xi == solve(C, pulled) @ pulled
        assert row.xi > 0 or T == 1

    def test_frame_has_xi(self, stieltjes_measure):
        s = moments_of_measure(stieltjes_measure, 5)
        frame = stieltjes_report(s, 3, threads=1).to_frame()
        assert list(frame.columns) == ["T", "M", "L", "M_det_ratio", "S00_det_ratio", "xi", "forms_match", "monotone_ok"]
        assert frame["M"].is_monotonic_increasing


class TestInterleaving:
    """Tests for the Stieltjes ↔ Hamburger correspondence."""

    def test_interleave(self):
        s = MomentSequence((1, 2, 4), Backend.RATIONAL)
        assert interleave(s).values == (1, 0, 2, 0, 4, 0)

    def test_interleave_single(self):
        s = MomentSequence((7,), Backend.RATIONAL)
        assert interleave(s).values == (7, 0)

    def test_single_atom_eigenvalues(self, single_atom):
        """Eigenvalue 2 becomes ±√2."""
        check = interleaving_check(single_atom, 1)
        assert check.stieltjes_eigenvalues.tolist() == pytest.approx([2.0])
        assert check.hamburger_eigenvalues.tolist() == pytest.approx([-np.sqrt(2.0), np.sqrt(2.0)])
        assert check.determinant_identity
        assert check.ratio_identity

    def test_stieltjes_oracle(self, stieltjes_measure):
        s = moments_of_measure(stieltjes_measure, 5)
        check = interleaving_check(s, 3)
        assert check.hankel_determinant == check.determinant_product
        assert check.eigenvalue_error < 1e-8
        assert check.ratio_identity
        np.testing.assert_allclose(check.stieltjes_eigenvalues, [0.5, 1.0, 3.0], rtol=1e-10)

    def test_matches_moment_pencil(self, stieltjes_measure):
        """Stieltjes eigenvalues are the eigenvalues of (S₁, S₀)."""
        s = moments_of_measure(stieltjes_measure, 5)
        direct = solve_pencil(PencilProblem(hankel_block(s, 1, 3).entries, hankel_block(s, 0, 3).entries))
        np.testing.assert_allclose(interleaving_check(s, 3).stieltjes_eigenvalues, direct.eigenvalues)

    @pytest.mark.parametrize("T", range(1, 9))
    def test_hilbert_up_to_eight(self, hilbert, T):
        """±√μ and the determinant identities hold through order 8."""
        check = interleaving_check(hilbert, T, extended=True)
        assert check.hankel_determinant == check.determinant_product
        assert check.determinant_identity
        assert check.ratio_identity
        assert check.eigenvalue_error < 1e-9
        assert len(check.hamburger_eigenvalues) == 2 * T

    def test_to_dict(self, single_atom):
        payload = interleaving_check(single_atom, 1).to_dict()
        assert payload["det_H0_2T"] == "2"
        assert payload["det_S0_times_det_S1"] == "2"

    def test_needs_2t_moments(self):
        with pytest.raises(InsufficientDataError):
            interleaving_check(MomentSequence((1, 2, 4), Backend.RATIONAL), 2)

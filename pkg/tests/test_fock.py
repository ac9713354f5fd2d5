import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cohstat.fock import (
    FockSpace,
    TruncationError,
    WHGroupElement,
    bch_check,
    build_ladder,
    coherent_closed_form,
    coherent_via_exponential,
    default_truncation,
    displacement_translation_check,
    poisson_pmf,
    poisson_tail,
    wh_multiply,
)
from cohstat.linops import phase_aligned_distance

finite_complex = st.complex_numbers(max_magnitude=5.0, allow_nan=False, allow_infinity=False)


def basis_vector(dim, k):
    vec = np.zeros(dim, dtype=complex)
    vec[k] = 1.0
    return vec


class TestBuildLadder:
    def test_smallest_space(self):
        rep = build_ladder(2)
        assert np.array_equal(rep.annihilation, np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex))
        assert np.array_equal(rep.number, np.diag([0.0, 1.0]).astype(complex))

    def test_ladder_relations(self):
        rep = build_ladder(12)
        for k in range(12):
            down = rep.annihilation @ basis_vector(12, k)
            expected = math.sqrt(k) * basis_vector(12, k - 1) if k > 0 else np.zeros(12)
            assert np.array_equal(down, expected)
            up = rep.creation @ basis_vector(12, k)
            expected = math.sqrt(k + 1) * basis_vector(12, k + 1) if k < 11 else np.zeros(12)
            assert np.array_equal(up, expected)
            assert np.array_equal(rep.number @ basis_vector(12, k), k * basis_vector(12, k))

    def test_number_is_creation_annihilation_product(self):
        rep = build_ladder(32)
        assert np.abs(rep.creation @ rep.annihilation - rep.number).max() < 1e-12

    def test_repeated_creation_builds_basis(self):
        # (A+)^k phi_0 = sqrt(k!) phi_k
        rep = build_ladder(12)
        vec = basis_vector(12, 0)
        for k in range(1, 12):
            vec = rep.creation @ vec
            expected = math.sqrt(math.factorial(k)) * basis_vector(12, k)
            assert np.abs(vec - expected).max() < 1e-9 * math.sqrt(math.factorial(k))

    def test_rejects_tiny_truncation(self):
        with pytest.raises(ValueError, match="at least 2"):
            build_ladder(1)


class TestGroupLaw:
    def test_identity_element(self):
        g = WHGroupElement(0.7, 1.2 - 0.3j)
        assert wh_multiply(g, WHGroupElement(0.0, 0.0)) == g
        assert wh_multiply(WHGroupElement(0.0, 0.0), g) == g

    def test_twist_term(self):
        product = wh_multiply(WHGroupElement(0.0, 1.0), WHGroupElement(0.0, 1.0j))
        assert product == WHGroupElement(-1.0, 1.0 + 1.0j)

    def test_inverse(self):
        g = WHGroupElement(0.4, 2.0 - 1.0j)
        inverse = WHGroupElement(-g.s, -g.alpha)
        assert wh_multiply(g, inverse) == WHGroupElement(0.0, 0.0)
        assert wh_multiply(inverse, g) == WHGroupElement(0.0, 0.0)

    @given(a=finite_complex, b=finite_complex, c=finite_complex)
    @settings(max_examples=50, deadline=None)
    def test_associative(self, a, b, c):
        g1, g2, g3 = WHGroupElement(0.1, a), WHGroupElement(-0.2, b), WHGroupElement(0.3, c)
        left = wh_multiply(wh_multiply(g1, g2), g3)
        right = wh_multiply(g1, wh_multiply(g2, g3))
        assert left.alpha == pytest.approx(right.alpha, abs=1e-12)
        assert left.s == pytest.approx(right.s, abs=1e-12)


class TestCoherentClosedForm:
    def test_vacuum(self):
        state = coherent_closed_form(0.0, FockSpace(8))
        assert np.array_equal(state.vector.vector, basis_vector(8, 0))
        assert state.tail_mass == 0.0

    @given(s=st.floats(0.0, 2.0 * math.pi))
    @settings(max_examples=25, deadline=None)
    def test_central_parameter_is_pure_phase(self, s):
        # the group element (s; alpha) acts as e^{is} D(alpha): the central
        # parameter never reaches the probabilities
        state = coherent_closed_form(1.2, FockSpace(64))
        shifted = np.exp(1j * s) * state.vector.vector
        assert phase_aligned_distance(shifted, state.vector.vector) < 1e-14
        assert np.abs(np.abs(shifted) ** 2 - np.abs(state.vector.vector) ** 2).max() < 1e-15

    def test_coefficients_are_poisson_weights(self):
        state = coherent_closed_form(1.0, FockSpace(64))
        for n in range(20):
            assert abs(abs(state.vector.vector[n]) ** 2 - poisson_pmf(1.0, n)) < 1e-12

    def test_tail_is_negligible_at_unit_displacement(self):
        assert coherent_closed_form(1.0, FockSpace(64)).tail_mass < 1e-15

    def test_rejects_insufficient_truncation(self):
        with pytest.raises(TruncationError, match="tail mass"):
            coherent_closed_form(4.0, FockSpace(8))

    def test_tail_against_brute_force_sum(self):
        brute = 1.0 - sum(poisson_pmf(1.0, n) for n in range(10))
        assert poisson_tail(1.0, 10) == pytest.approx(brute, abs=1e-12)

    def test_default_truncation_bounds_tail(self):
        for alpha in (0.3, 1.0, 3.0):
            assert poisson_tail(abs(alpha) ** 2, default_truncation(alpha)) < 1e-15


class TestCoherentViaExponential:
    def test_vacuum(self):
        rep = build_ladder(8)
        state = coherent_via_exponential(0.0, rep)
        assert np.abs(state.vector.vector - basis_vector(8, 0)).max() < 1e-14

    @pytest.mark.parametrize("alpha,dim", [(1.0, 64), (2.0j, 128), (1.5 - 1.0j, 64), (3.0, 64)])
    def test_matches_closed_form(self, alpha, dim):
        rep = build_ladder(dim)
        via_exp = coherent_via_exponential(alpha, rep, tol=1e-11)
        closed = coherent_closed_form(alpha, rep.space)
        assert phase_aligned_distance(via_exp.vector.vector, closed.vector.vector) < 1e-10

    def test_rejects_insufficient_truncation(self):
        with pytest.raises(TruncationError):
            coherent_via_exponential(3.0, build_ladder(12))


class TestBCH:
    def test_zero_displacement(self):
        assert bch_check(0.0, build_ladder(8)) == 0.0

    def test_well_truncated(self):
        assert bch_check(1.0, build_ladder(64)) < 1e-10

    def test_under_truncated_probe(self):
        assert bch_check(3.0, build_ladder(16)) > 1e-3


class TestPoissonPmf:
    def test_vacuum_count(self):
        assert poisson_pmf(0.0, 0) == 1.0
        assert poisson_pmf(0.0, 3) == 0.0

    def test_unit_rate(self):
        assert poisson_pmf(1.0, 1) == pytest.approx(0.36787944117144233, abs=1e-16)
        assert poisson_pmf(1.0, 1) == pytest.approx(math.exp(-1.0), abs=1e-16)

    def test_rate_four(self):
        oracle = math.exp(-4.0) * 4.0**4 / math.factorial(4)
        assert poisson_pmf(2.0, 4) == pytest.approx(oracle, abs=1e-15)
        assert poisson_pmf(2.0, 4) == pytest.approx(0.19536681, abs=1e-8)

    def test_matches_inner_product_route(self):
        state = coherent_closed_form(1.3 + 0.4j, FockSpace(64))
        for n in range(15):
            amplitude = state.vector.vector[n]
            assert abs(abs(amplitude) ** 2 - poisson_pmf(1.3 + 0.4j, n)) < 1e-12

    def test_rejects_negative_count(self):
        with pytest.raises(ValueError, match="nonnegative"):
            poisson_pmf(1.0, -1)

    @given(lam=st.floats(0.0, 6.0), chi=st.floats(0.0, 2.0 * math.pi))
    @settings(max_examples=40, deadline=None)
    def test_phase_covariance(self, lam, chi):
        alpha = math.sqrt(lam)
        rotated = alpha * np.exp(1j * chi)
        for n in (0, 1, 4):
            assert abs(poisson_pmf(alpha, n) - poisson_pmf(rotated, n)) < 1e-13

    @given(lam=st.floats(0.0, 9.0))
    @settings(max_examples=30, deadline=None)
    def test_total_mass_accounts_for_tail(self, lam):
        dim = 48
        total = sum(poisson_pmf(math.sqrt(lam), n) for n in range(dim))
        assert abs(total - (1.0 - poisson_tail(lam, dim))) < 1e-12


class TestTranslationProperty:
    def test_no_displacement(self):
        overlap, phase = displacement_translation_check(1.0, 0.0, build_ladder(32))
        assert abs(overlap - 1.0) < 1e-12
        assert abs(phase - 1.0) < 1e-12

    def test_quarter_turn_phase(self):
        # Im(beta conj(alpha)) = Im(i * 1) = 1
        _, phase = displacement_translation_check(1.0, 1.0j, build_ladder(64))
        assert abs(phase - np.exp(1.0j)) < 1e-8

    def test_aligned_displacements_have_no_phase(self):
        # Im(beta conj(alpha)) = Im(i * (-i)) = 0
        _, phase = displacement_translation_check(1.0j, 1.0j, build_ladder(64))
        assert abs(phase - 1.0) < 1e-8

    def test_rejects_insufficient_truncation(self):
        # collinear displacements commute even when truncated, so the
        # probe needs a pair with a genuine twist
        with pytest.raises(TruncationError, match="overlap"):
            displacement_translation_check(3.0, 3.0j, build_ladder(16))

    @given(seed=st.integers(0, 2**32 - 1))
    @settings(max_examples=15, deadline=None)
    def test_phase_matches_analytic_value(self, seed):
        rng = np.random.default_rng(seed)
        rep = build_ladder(64)
        alpha, beta = (
            2.0 * math.sqrt(rng.uniform()) * np.exp(1j * rng.uniform(0.0, 2.0 * math.pi))
            for _ in range(2)
        )
        overlap, phase = displacement_translation_check(alpha, beta, rep)
        assert abs(overlap - 1.0) < 1e-8
        assert abs(phase - np.exp(1j * (beta * np.conjugate(alpha)).imag)) < 1e-8

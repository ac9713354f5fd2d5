import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from cohstat.fock import poisson_pmf
from cohstat.inference import (
    FockCoherentFamily,
    InferredDistribution,
    SpinCoherentFamily,
    analytic_binomial_posterior,
    analytic_poisson_posterior,
    coherent_transform,
    credible_interval,
    default_p_grid,
    default_radial_cutoff,
    infer_via_pov,
    inferred_density_binomial,
    inferred_density_poisson,
    plane_moment_residual,
    plane_quadrature,
    resolution_of_identity_check,
    sphere_quadrature,
)
from cohstat.pv_measure import VectorState
from cohstat.spin import binomial_pmf, build_spin_rep, sphere_point_for_probability

from helpers import random_unit_vector


def basis_state(dim, k):
    vec = np.zeros(dim, dtype=complex)
    vec[k] = 1.0
    return VectorState(vec)


def spin_rule(j):
    rep = build_spin_rep(j)
    return sphere_quadrature(j, rep.two_j + 2, 2 * rep.two_j + 1)


class TestPlaneQuadrature:
    def test_constant_integrates_to_squared_radius(self):
        rule = plane_quadrature(2.0, 40, 8)
        assert rule.weights.sum() == pytest.approx(4.0, rel=1e-13)

    def test_gaussian_normalization(self):
        rule = plane_quadrature(12.0, 200, 16)
        r = rule.nodes[:, 0]
        assert np.sum(rule.weights * np.exp(-r * r)) == pytest.approx(1.0, abs=1e-13)

    def test_gaussian_moments(self):
        rule = plane_quadrature(12.0, 200, 8)
        assert plane_moment_residual(rule, 20) < 1e-10

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError, match="cutoff"):
            plane_quadrature(0.0, 10, 10)
        with pytest.raises(ValueError, match="node counts"):
            plane_quadrature(1.0, 1, 10)


class TestSphereQuadrature:
    @pytest.mark.parametrize("j", [0.0, 0.5, 1.0, 5.0])
    def test_total_measure_is_dimension(self, j):
        rule = spin_rule(j)
        assert rule.weights.sum() == pytest.approx(2.0 * j + 1.0, rel=1e-13)

    def test_success_probability_average(self):
        # int sin^2(theta/2) dmu = (2j+1)/2 = 1 at j = 1/2
        rule = spin_rule(0.5)
        p = np.sin(rule.nodes[:, 0] / 2.0) ** 2
        assert np.sum(rule.weights * p) == pytest.approx(1.0, abs=1e-13)

    def test_rejects_insufficient_nodes(self):
        with pytest.raises(ValueError, match="n_theta"):
            sphere_quadrature(2.0, 4, 20)
        with pytest.raises(ValueError, match="n_gamma"):
            sphere_quadrature(2.0, 8, 6)


class TestResolutionOfIdentity:
    def test_spin_half(self):
        assert resolution_of_identity_check(SpinCoherentFamily(build_spin_rep(0.5)), spin_rule(0.5)) < 1e-13

    def test_spin_five(self):
        assert resolution_of_identity_check(SpinCoherentFamily(build_spin_rep(5.0)), spin_rule(5.0)) < 1e-12

    def test_plane_leading_block(self):
        rule = plane_quadrature(10.0, 200, 65)
        assert resolution_of_identity_check(FockCoherentFamily(32), rule, n_basis=20) < 1e-8

    def test_rejects_mismatched_kind(self):
        with pytest.raises(ValueError, match="does not match"):
            resolution_of_identity_check(FockCoherentFamily(8), spin_rule(1.0))

    def test_rejects_bad_block(self):
        rule = plane_quadrature(10.0, 50, 17)
        with pytest.raises(ValueError, match="n_basis"):
            resolution_of_identity_check(FockCoherentFamily(8), rule, n_basis=9)


class TestCoherentTransform:
    def test_vacuum_transform_is_gaussian(self):
        family = FockCoherentFamily(16)
        rule = plane_quadrature(8.0, 60, 12)
        values = coherent_transform(basis_state(16, 0), family, rule)
        lam = rule.nodes[:, 0] ** 2
        assert np.abs(np.abs(values) ** 2 - np.exp(-lam)).max() < 1e-15

    def test_isometry_on_basis_states(self):
        family = FockCoherentFamily(32)
        rule = plane_quadrature(10.0, 200, 65)
        for n in (0, 3, 11, 19):
            values = coherent_transform(basis_state(32, n), family, rule)
            assert np.sum(rule.weights * np.abs(values) ** 2) == pytest.approx(1.0, abs=1e-8)

    def test_orthogonality_preserved(self):
        family = FockCoherentFamily(32)
        rule = plane_quadrature(10.0, 200, 65)
        first = coherent_transform(basis_state(32, 2), family, rule)
        second = coherent_transform(basis_state(32, 7), family, rule)
        assert abs(np.sum(rule.weights * first.conj() * second)) < 1e-8

    def test_rejects_dimension_mismatch(self):
        rule = plane_quadrature(8.0, 40, 9)
        with pytest.raises(ValueError, match="dimension mismatch"):
            coherent_transform(basis_state(4, 0), FockCoherentFamily(8), rule)


class TestInferViaPov:
    def test_poisson_vacuum_posterior_is_exponential(self):
        grid = np.linspace(0.0, 11.0, 1101)  # unit rate is a grid node
        rule = plane_quadrature(default_radial_cutoff(grid[-1]), 200, 16)
        dist = infer_via_pov(0, FockCoherentFamily(16), rule, grid)
        assert np.abs(dist.density - np.exp(-grid)).max() < 1e-12
        segment = grid <= 1.0
        mass = np.trapezoid(dist.density[segment], grid[segment])
        assert mass == pytest.approx(1.0 - math.exp(-1.0), abs=1e-5)
        assert mass == pytest.approx(0.6321206, abs=1e-5)

    def test_binomial_posterior_is_beta(self):
        dist = infer_via_pov(1, SpinCoherentFamily(build_spin_rep(1.0)), spin_rule(1.0))
        expected = 6.0 * dist.grid * (1.0 - dist.grid)
        assert np.abs(dist.density - expected).max() < 1e-12
        assert dist.total_mass == pytest.approx(1.0, abs=1e-12)

    def test_no_success_density_vanishes_at_certainty(self):
        dist = infer_via_pov(0, SpinCoherentFamily(build_spin_rep(2.0)), spin_rule(2.0))
        assert dist.grid[-1] == 1.0
        assert dist.density[-1] < 1e-16

    def test_angular_slices_agree(self):
        family = FockCoherentFamily(16)
        rule = plane_quadrature(10.0, 50, 9)
        slices = np.abs(family.amplitude_at(3, np.array([0.7, 1.9]), rule.angle_nodes)) ** 2
        assert np.abs(slices - slices[:, :1]).max() < 1e-12

    @given(seed=st.integers(0, 2**32 - 1))
    @settings(max_examples=15, deadline=None)
    def test_pov_box_masses_are_nonnegative(self, seed):
        rng = np.random.default_rng(seed)
        family = FockCoherentFamily(12)
        rule = plane_quadrature(8.0, 50, 9)
        state = VectorState(random_unit_vector(rng, 12))
        values = np.abs(coherent_transform(state, family, rule)) ** 2
        r = rule.nodes[:, 0]
        low, high = sorted(rng.uniform(0.0, 8.0, size=2))
        box = (r >= low) & (r <= high)
        assert np.sum(rule.weights[box] * values[box]) >= 0.0

    def test_rejects_bad_observed_index(self):
        rule = plane_quadrature(8.0, 50, 9)
        with pytest.raises(ValueError, match="observed index"):
            infer_via_pov(40, FockCoherentFamily(16), rule)

    def test_rejects_insufficient_quadrature(self):
        rule = plane_quadrature(1.5, 50, 9)
        with pytest.raises(ValueError, match="quadrature mass"):
            infer_via_pov(2, FockCoherentFamily(16), rule)


class TestAnalyticDensities:
    def test_poisson_density_at_origin(self):
        assert inferred_density_poisson(0, 0.0) == 1.0
        assert inferred_density_poisson(3, 0.0) == 0.0

    @pytest.mark.parametrize("n", [0, 1, 5, 20])
    def test_poisson_density_normalizes(self, n):
        upper = n + 1 + 40.0 * math.sqrt(n + 1)
        mass, _ = quad(lambda lam: inferred_density_poisson(n, lam), 0.0, upper, limit=200)
        assert mass == pytest.approx(1.0, abs=1e-10)

    @pytest.mark.parametrize("n", [0, 2, 7])
    def test_poisson_posterior_mean(self, n):
        upper = n + 1 + 40.0 * math.sqrt(n + 1)
        mean, _ = quad(lambda lam: lam * inferred_density_poisson(n, lam), 0.0, upper, limit=200)
        assert mean == pytest.approx(n + 1.0, abs=1e-8)

    def test_poisson_rejects_bad_arguments(self):
        with pytest.raises(ValueError, match="nonnegative"):
            inferred_density_poisson(0, -0.5)
        with pytest.raises(ValueError, match="nonnegative"):
            inferred_density_poisson(-1, 1.0)

    def test_binomial_uniform_posterior(self):
        p = default_p_grid(11)
        assert np.array_equal(inferred_density_binomial(0, 0, p), np.ones(11))

    def test_binomial_quadratic_cases(self):
        p = np.linspace(0.0, 1.0, 101)
        assert np.abs(inferred_density_binomial(2, 1, p) - 6.0 * p * (1.0 - p)).max() < 1e-14
        assert np.abs(inferred_density_binomial(2, 2, p) - 3.0 * p**2).max() < 1e-14

    def test_binomial_posterior_mean(self):
        mean, _ = quad(lambda p: p * inferred_density_binomial(2, 1, p), 0.0, 1.0)
        assert mean == pytest.approx(0.5, abs=1e-12)

    def test_binomial_rejects_bad_arguments(self):
        with pytest.raises(ValueError, match="k <= n"):
            inferred_density_binomial(2, 3, 0.5)
        with pytest.raises(ValueError, match="p must lie"):
            inferred_density_binomial(2, 1, 1.5)

    def test_sampling_and_posterior_kernels_agree_exactly(self):
        alpha = 0.7 + 0.3j
        lam = abs(alpha) ** 2
        for n in (0, 1, 4, 9):
            assert poisson_pmf(alpha, n) == inferred_density_poisson(n, lam)

    def test_binomial_kernels_agree_exactly(self):
        rep = build_spin_rep(2.5)
        point = sphere_point_for_probability(0.37)
        p = math.sin(point.theta / 2.0) ** 2
        for k, m in enumerate(rep.m_values):
            assert inferred_density_binomial(5, k, p) == 6.0 * binomial_pmf(rep, point, m)


class TestInferredDistributionValidation:
    def test_rejects_negative_density(self):
        with pytest.raises(ValueError, match="nonnegative"):
            InferredDistribution("p", np.array([0.0, 1.0]), np.array([1.0, -0.1]), 1.0, "analytic")

    def test_rejects_non_increasing_grid(self):
        with pytest.raises(ValueError, match="strictly increasing"):
            InferredDistribution("p", np.array([0.0, 0.0]), np.array([1.0, 1.0]), 1.0, "analytic")

    def test_rejects_wrong_mass(self):
        with pytest.raises(ValueError, match="total mass"):
            InferredDistribution("p", np.array([0.0, 1.0]), np.array([1.0, 1.0]), 0.9, "analytic")

    def test_rejects_unknown_source(self):
        with pytest.raises(ValueError, match="source"):
            InferredDistribution("p", np.array([0.0, 1.0]), np.array([1.0, 1.0]), 1.0, "guesswork")


def brute_force_interval(dist, mass):
    """Quadratic-time oracle for the shortest covering interval."""
    grid = dist.grid
    segments = 0.5 * (dist.density[1:] + dist.density[:-1]) * np.diff(grid)
    cumulative = np.concatenate([[0.0], np.cumsum(segments)])
    best = None
    for left in range(len(grid)):
        for right in range(left, len(grid)):
            window_mass = cumulative[right] - cumulative[left]
            if window_mass < mass:
                continue
            width = grid[right] - grid[left]
            key = (round(width, 12), -round(window_mass, 12), left)
            if best is None or key < best[0]:
                best = (key, left, right)
            break
    assert best is not None
    return float(grid[best[1]]), float(grid[best[2]])


class TestCredibleInterval:
    def test_symmetric_beta(self):
        dist = analytic_binomial_posterior(2, 1)
        low, high = credible_interval(dist, 0.5)
        step = dist.grid[1] - dist.grid[0]
        assert abs((low + high) - 1.0) <= 2.0 * step

    def test_monotone_gamma_starts_at_zero(self):
        dist = analytic_poisson_posterior(0)
        low, high = credible_interval(dist, 0.5)
        step = dist.grid[1] - dist.grid[0]
        assert low == 0.0
        assert abs(high - math.log(2.0)) <= step

    def test_near_total_mass_returns_full_support(self):
        dist = analytic_binomial_posterior(2, 1)
        low, high = credible_interval(dist, 1.0 - 1e-5)
        assert low <= dist.grid[1]
        assert high >= dist.grid[-2]

    @pytest.mark.parametrize("mass", [0.3, 0.5, 0.8])
    def test_matches_brute_force_oracle(self, mass):
        grid = np.linspace(0.0, 1.0, 101)
        dist = analytic_binomial_posterior(3, 2, grid)
        assert credible_interval(dist, mass) == brute_force_interval(dist, mass)

    def test_rejects_unreachable_mass(self):
        grid = np.linspace(0.0, 0.2, 50)
        density = inferred_density_binomial(2, 2, grid)
        dist = InferredDistribution("p", grid, density, 1.0, "pov-quadrature")
        with pytest.raises(ValueError, match="cannot cover"):
            credible_interval(dist, 0.5)

    def test_rejects_degenerate_mass(self):
        dist = analytic_binomial_posterior(2, 1)
        with pytest.raises(ValueError, match="strictly between"):
            credible_interval(dist, 1.0)

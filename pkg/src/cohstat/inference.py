"""POV-measure machinery and inferred distributions on parameter spaces.

A coherent family paired with its group-invariant measure (Lebesgue on the
plane with density 1/pi, or (2j+1)/(4pi) sin(theta) on the sphere) defines
a positive operator-valued measure.  Integrated against a quadrature rule
this yields, for an observed basis state, a probability distribution on
the parameter space.  Marginalizing the azimuthal angle and switching to
the canonical scalar (lambda = r^2 or p = sin^2(theta/2)) must reproduce
the Gamma(n+1, 1) and Beta(k+1, n-k+1) posterior densities, which are also
provided analytically for comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.special import roots_legendre

from . import fock, spin
from .pv_measure import VectorState
from .spin import SpinRep

__all__ = [
    "FockCoherentFamily",
    "InferredDistribution",
    "QuadratureRule",
    "SpinCoherentFamily",
    "analytic_binomial_posterior",
    "analytic_poisson_posterior",
    "coherent_transform",
    "credible_interval",
    "default_lambda_grid",
    "default_p_grid",
    "default_radial_cutoff",
    "infer_via_pov",
    "inferred_density_binomial",
    "inferred_density_poisson",
    "plane_moment_residual",
    "plane_quadrature",
    "resolution_of_identity_check",
    "sphere_quadrature",
]

_PLANE_MASS_TOL = 1e-6
_SPHERE_MASS_TOL = 1e-10
_ANALYTIC_MASS_TOL = 1e-10


@dataclass(frozen=True)
class QuadratureRule:
    """Product rule on the plane (polar) or the sphere.

    ``principal_nodes`` holds radii r for the plane and polar angles theta
    for the sphere; ``principal_weights`` already include the invariant
    measure density (r/pi, resp. (2j+1) sin(theta)-equivalent /(4pi)), so
    an integral against the measure is sum_{i,k} pw_i aw_k f(node_ik).
    """

    kind: str
    principal_nodes: np.ndarray
    principal_weights: np.ndarray
    angle_nodes: np.ndarray
    angle_weights: np.ndarray

    def __post_init__(self):
        if self.kind not in ("plane", "sphere"):
            raise ValueError(f"unknown rule kind {self.kind!r}")
        if (self.principal_weights <= 0).any() or (self.angle_weights <= 0).any():
            raise ValueError("quadrature weights must be positive")

    @property
    def nodes(self) -> np.ndarray:
        """All nodes as an (N, 2) array, principal coordinate first."""
        principal, angle = np.meshgrid(self.principal_nodes, self.angle_nodes, indexing="ij")
        return np.column_stack([principal.ravel(), angle.ravel()])

    @property
    def weights(self) -> np.ndarray:
        """Flattened weights aligned with :attr:`nodes`."""
        return np.outer(self.principal_weights, self.angle_weights).ravel()


def plane_quadrature(radial_cutoff: float, n_r: int, n_angle: int) -> QuadratureRule:
    """Polar rule for the invariant plane measure (1/pi) r dr dangle.

    Gauss-Legendre on r in [0, radial_cutoff] times a uniform periodic
    rule on the angle.
    """
    if radial_cutoff <= 0:
        raise ValueError(f"radial cutoff must be positive, got {radial_cutoff!r}")
    if n_r < 2 or n_angle < 2:
        raise ValueError(f"node counts must be at least 2, got n_r={n_r}, n_angle={n_angle}")
    x, w = roots_legendre(n_r)
    r = radial_cutoff * (x + 1.0) / 2.0
    radial_weights = (radial_cutoff / 2.0) * w * r / math.pi
    angles = 2.0 * math.pi * np.arange(n_angle) / n_angle
    angle_weights = np.full(n_angle, 2.0 * math.pi / n_angle)
    return QuadratureRule(
        kind="plane",
        principal_nodes=r,
        principal_weights=radial_weights,
        angle_nodes=angles,
        angle_weights=angle_weights,
    )


def sphere_quadrature(j, n_theta: int, n_gamma: int) -> QuadratureRule:
    """Rule for the invariant sphere measure ((2j+1)/4pi) sin(theta) dtheta dgamma.

    Gauss-Legendre in cos(theta) times a uniform rule in gamma.  The node
    counts must resolve the degree-2j integrands of the spin-j family:
    n_theta >= 2j+2 and n_gamma >= 4j+1.
    """
    two_j = spin._as_two_j(j)
    if n_theta < two_j + 2:
        raise ValueError(f"need n_theta >= {two_j + 2} for j={two_j / 2}, got {n_theta}")
    if n_gamma < 2 * two_j + 1:
        raise ValueError(f"need n_gamma >= {2 * two_j + 1} for j={two_j / 2}, got {n_gamma}")
    u, w = roots_legendre(n_theta)
    theta = np.arccos(u)[::-1].copy()
    theta_weights = w[::-1] * (two_j + 1.0) / (4.0 * math.pi)
    gammas = 2.0 * math.pi * np.arange(n_gamma) / n_gamma
    gamma_weights = np.full(n_gamma, 2.0 * math.pi / n_gamma)
    return QuadratureRule(
        kind="sphere",
        principal_nodes=theta,
        principal_weights=theta_weights,
        angle_nodes=gammas,
        angle_weights=gamma_weights,
    )


def plane_moment_residual(rule: QuadratureRule, max_moment: int) -> float:
    """Worst relative error of the Gaussian moments int e^{-r^2} (r^2)^m dmu = m!.

    Build-time validation for plane rules: the moments up to ``max_moment``
    must come out right for the resolution-of-identity and posterior
    integrals over the first basis elements to be trustworthy.
    """
    if rule.kind != "plane":
        raise ValueError("moment validation applies to plane rules")
    r = rule.principal_nodes
    total_angle = rule.angle_weights.sum()
    worst = 0.0
    for m in range(max_moment + 1):
        quad = float(np.sum(rule.principal_weights * np.exp(-r * r) * r ** (2 * m))) * total_angle
        exact = math.factorial(m)
        worst = max(worst, abs(quad / exact - 1.0))
    return worst


@dataclass(frozen=True)
class FockCoherentFamily:
    """Displacement coherent family on the plane, tracked on dim basis elements."""

    dim: int

    kind = "plane"

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"dimension must be positive, got {self.dim!r}")

    @classmethod
    def from_rep(cls, rep: fock.LadderRep) -> "FockCoherentFamily":
        return cls(dim=rep.dim)

    def amplitudes(self, principal, angle) -> np.ndarray:
        """<phi_i, v(r e^{i angle})> on the product grid, shape (n1, n2, dim)."""
        r = np.asarray(principal, dtype=float)[:, None]
        a = np.asarray(angle, dtype=float)[None, :]
        return fock.coherent_amplitudes(r * np.exp(1j * a), self.dim)

    def amplitude_at(self, index: int, principal, angle) -> np.ndarray:
        """Single amplitude <phi_index, v(.)> on the product grid, shape (n1, n2)."""
        if not 0 <= index < self.dim:
            raise ValueError(f"index {index} outside 0..{self.dim - 1}")
        r = np.asarray(principal, dtype=float)[:, None]
        lam = r * r
        with np.errstate(divide="ignore", invalid="ignore"):
            log_r = np.where(r > 0, np.log(np.where(r > 0, r, 1.0)), 0.0)
            magnitude = np.exp(-0.5 * lam + index * log_r - 0.5 * math.lgamma(index + 1))
        magnitude = np.where(r > 0, magnitude, 1.0 if index == 0 else 0.0)
        phase = np.exp(1j * index * np.asarray(angle, dtype=float)[None, :])
        return magnitude * phase


@dataclass(frozen=True)
class SpinCoherentFamily:
    """Rotation coherent family of a spin-j representation on the sphere."""

    rep: SpinRep

    kind = "sphere"

    @property
    def dim(self) -> int:
        return self.rep.dim

    def amplitudes(self, principal, angle) -> np.ndarray:
        theta = np.asarray(principal, dtype=float)[:, None]
        gamma = np.asarray(angle, dtype=float)[None, :]
        return spin.coherent_amplitudes(self.rep, theta, gamma)

    def amplitude_at(self, index: int, principal, angle) -> np.ndarray:
        if not 0 <= index < self.dim:
            raise ValueError(f"index {index} outside 0..{self.dim - 1}")
        return self.amplitudes(principal, angle)[:, :, index]


CoherentFamily = Union[FockCoherentFamily, SpinCoherentFamily]


def _check_compatible(family: CoherentFamily, rule: QuadratureRule) -> None:
    if family.kind != rule.kind:
        raise ValueError(f"family kind {family.kind!r} does not match rule kind {rule.kind!r}")


def resolution_of_identity_check(
    family: CoherentFamily,
    rule: QuadratureRule,
    n_basis: int | None = None,
) -> float:
    """Max deviation of int <phi_i, v><v, phi_j> dmu from the Kronecker delta.

    For the spin family the integrands are trigonometric polynomials the
    rule integrates exactly, so the residual is quadrature rounding.  For
    the plane family the residual is limited by the radial cutoff and the
    number of tracked basis elements; ``n_basis`` restricts the check to
    the leading block.
    """
    _check_compatible(family, rule)
    n_basis = family.dim if n_basis is None else n_basis
    if not 1 <= n_basis <= family.dim:
        raise ValueError(f"n_basis must lie in 1..{family.dim}, got {n_basis}")
    amps = family.amplitudes(rule.principal_nodes, rule.angle_nodes)[:, :, :n_basis]
    flat = amps.reshape(-1, n_basis)
    weights = rule.weights
    gram = (flat * weights[:, None]).T @ flat.conj()
    return float(np.abs(gram - np.eye(n_basis)).max())


def coherent_transform(state: VectorState, family: CoherentFamily, rule: QuadratureRule) -> np.ndarray:
    """Tabulated map rho(phi)(param) = <phi, v(param)> over the rule's nodes.

    The returned array is flattened in the same order as ``rule.nodes``;
    its weighted squared sum approximates the squared norm of ``state``
    (the transform is isometric up to the rule's residual).
    """
    _check_compatible(family, rule)
    if state.dim != family.dim:
        raise ValueError(f"dimension mismatch: state {state.dim}, family {family.dim}")
    amps = family.amplitudes(rule.principal_nodes, rule.angle_nodes)
    return amps.reshape(-1, family.dim) @ state.vector.conj()


@dataclass(frozen=True)
class InferredDistribution:
    """Tabulated density over a canonical scalar parameter.

    ``total_mass`` is the mass over the construction's full parameter
    domain (quadrature disk or sphere for the POV route, the analytic
    normalization for closed forms), not the trapezoid mass of the grid.
    """

    parameter: str
    grid: np.ndarray
    density: np.ndarray
    total_mass: float
    source: str

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        density = np.asarray(self.density, dtype=float)
        if grid.ndim != 1 or grid.shape != density.shape:
            raise ValueError("grid and density must be matching 1-d arrays")
        if (np.diff(grid) <= 0).any():
            raise ValueError("grid must be strictly increasing")
        if (density < 0).any():
            raise ValueError("density must be nonnegative")
        if self.source not in ("analytic", "pov-quadrature"):
            raise ValueError(f"unknown source {self.source!r}")
        mass_tol = _ANALYTIC_MASS_TOL if self.source == "analytic" else _PLANE_MASS_TOL
        if abs(self.total_mass - 1.0) > mass_tol:
            raise ValueError(f"total mass {self.total_mass!r} deviates from 1 beyond {mass_tol:.1e}")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "density", density)


def default_lambda_grid(n: int, points: int = 2001) -> np.ndarray:
    """Uniform rate grid [0, n+1+10 sqrt(n+1)] resolving the Gamma(n+1,1) shape."""
    return np.linspace(0.0, n + 1 + 10.0 * math.sqrt(n + 1), points)


def default_p_grid(points: int = 1001) -> np.ndarray:
    return np.linspace(0.0, 1.0, points)


def default_radial_cutoff(lambda_max: float) -> float:
    """Radius sqrt(lambda_max) + 8, placing the e^{-r^2} tail below 1e-14."""
    return math.sqrt(lambda_max) + 8.0


def inferred_density_poisson(n: int, lam) -> np.ndarray | float:
    """Gamma(n+1, 1) posterior density e^{-lam} lam^n / n! at rate lam."""
    if n < 0 or n != int(n):
        raise ValueError(f"count must be a nonnegative integer, got {n!r}")
    lam_arr = np.asarray(lam, dtype=float)
    if (lam_arr < 0).any():
        raise ValueError("rate must be nonnegative")
    value = fock._poisson_weight(lam_arr, int(n))
    return float(value) if np.isscalar(lam) else value


def inferred_density_binomial(n: int, k: int, p) -> np.ndarray | float:
    """Beta(k+1, n-k+1) posterior density (n+1) C(n,k) p^k (1-p)^{n-k}."""
    if n < 0 or n != int(n):
        raise ValueError(f"trial count must be a nonnegative integer, got {n!r}")
    if not 0 <= k <= n or k != int(k):
        raise ValueError(f"need 0 <= k <= n, got k={k!r}, n={n!r}")
    p_arr = np.asarray(p, dtype=float)
    if (p_arr < 0).any() or (p_arr > 1).any():
        raise ValueError("p must lie in [0, 1]")
    value = (n + 1) * spin._binomial_weight(int(n), int(k), p_arr)
    return float(value) if np.isscalar(p) else value


def _gauss_legendre_mass(density, low: float, high: float, nodes: int) -> float:
    x, w = roots_legendre(nodes)
    t = low + (high - low) * (x + 1.0) / 2.0
    return float(np.sum(w * density(t)) * (high - low) / 2.0)


def analytic_poisson_posterior(n: int, grid: np.ndarray | None = None) -> InferredDistribution:
    """Gamma(n+1, 1) posterior tabulated on the rate grid."""
    grid = default_lambda_grid(n) if grid is None else np.asarray(grid, dtype=float)
    mass = _gauss_legendre_mass(
        lambda lam: inferred_density_poisson(n, lam),
        0.0,
        n + 1 + 40.0 * math.sqrt(n + 1),
        nodes=400,
    )
    return InferredDistribution(
        parameter="lambda",
        grid=grid,
        density=inferred_density_poisson(n, grid),
        total_mass=mass,
        source="analytic",
    )


def analytic_binomial_posterior(n: int, k: int, grid: np.ndarray | None = None) -> InferredDistribution:
    """Beta(k+1, n-k+1) posterior tabulated on the success-probability grid."""
    grid = default_p_grid() if grid is None else np.asarray(grid, dtype=float)
    mass = _gauss_legendre_mass(
        lambda p: inferred_density_binomial(n, k, p),
        0.0,
        1.0,
        nodes=max(64, n + 2),
    )
    return InferredDistribution(
        parameter="p",
        grid=grid,
        density=inferred_density_binomial(n, k, grid),
        total_mass=mass,
        source="analytic",
    )


def infer_via_pov(
    observed: int,
    family: CoherentFamily,
    rule: QuadratureRule,
    grid: np.ndarray | None = None,
) -> InferredDistribution:
    """Inferred distribution of the canonical parameter for an observed count.

    The joint density |<phi_obs, v(param)>|^2 is integrated against the
    invariant measure.  The azimuthal angle is marginalized numerically by
    summing the rule's angle nodes, and the polar coordinate is re-expressed
    on the canonical grid: the plane measure (1/pi) r dr dangle is exactly
    (1/2pi) d(r^2) dangle so the rate density needs no extra Jacobian, and
    on the sphere d(sin^2(theta/2)) absorbs the sin(theta) factor.
    ``observed`` is the basis index: the count n for the plane family, the
    relabeled count k = j + ell for the spin family.
    """
    _check_compatible(family, rule)
    if not 0 <= observed < family.dim:
        raise ValueError(f"observed index {observed!r} outside 0..{family.dim - 1}")

    joint = np.abs(family.amplitude_at(observed, rule.principal_nodes, rule.angle_nodes)) ** 2
    total_mass = float(rule.principal_weights @ joint @ rule.angle_weights)

    if rule.kind == "plane":
        grid = default_lambda_grid(observed) if grid is None else np.asarray(grid, dtype=float)
        principal = np.sqrt(grid)
        scale = 1.0 / (2.0 * math.pi)
        parameter = "lambda"
        mass_tol = _PLANE_MASS_TOL
    else:
        grid = default_p_grid() if grid is None else np.asarray(grid, dtype=float)
        principal = 2.0 * np.arcsin(np.sqrt(grid))
        scale = family.dim / (2.0 * math.pi)
        parameter = "p"
        mass_tol = _SPHERE_MASS_TOL

    if abs(total_mass - 1.0) > mass_tol:
        raise ValueError(
            f"quadrature mass {total_mass!r} deviates from 1 beyond {mass_tol:.1e}; "
            "the rule does not resolve this family"
        )
    grid_joint = np.abs(family.amplitude_at(observed, principal, rule.angle_nodes)) ** 2
    density = scale * (grid_joint @ rule.angle_weights)
    return InferredDistribution(
        parameter=parameter,
        grid=grid,
        density=density,
        total_mass=total_mass,
        source="pov-quadrature",
    )


def credible_interval(dist: InferredDistribution, mass: float) -> tuple[float, float]:
    """Shortest grid-supported interval holding at least the requested mass.

    Interval masses are trapezoidal on the grid.  Flat-topped densities
    admit many windows of the same minimal grid width, so ties in width
    (up to rounding) break toward the largest enclosed mass, then toward
    the lower left endpoint.  Raises ValueError when no grid interval
    reaches the mass.
    """
    if not 0.0 < mass < 1.0:
        raise ValueError(f"mass must lie strictly between 0 and 1, got {mass!r}")
    grid = dist.grid
    segments = 0.5 * (dist.density[1:] + dist.density[:-1]) * np.diff(grid)
    cumulative = np.concatenate([[0.0], np.cumsum(segments)])
    if cumulative[-1] < mass:
        raise ValueError(
            f"grid supports only mass {cumulative[-1]!r}, cannot cover {mass!r}"
        )
    width_tol = 1e-12 * max(1.0, float(grid[-1] - grid[0]))
    best: tuple[float, float, int, int] | None = None
    right = 0
    for left in range(grid.shape[0]):
        right = max(right, left)
        while right < grid.shape[0] - 1 and cumulative[right] - cumulative[left] < mass:
            right += 1
        window_mass = float(cumulative[right] - cumulative[left])
        if window_mass < mass:
            break
        width = float(grid[right] - grid[left])
        shorter = best is None or width < best[0] - width_tol
        heavier_tie = best is not None and abs(width - best[0]) <= width_tol and window_mass > best[1]
        if shorter or heavier_tie:
            best = (width, window_mass, left, right)
    assert best is not None
    return float(grid[best[2]]), float(grid[best[3]])

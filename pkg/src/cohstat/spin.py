"""Spin-j representations of SU(2) and the binomial coherent family.

The 2j+1 dimensional representation is built from its ladder relations
with the basis ordered m = -j..j (lowest weight first), so the reference
vector phi_{-j} is the first column and k = j + m indexes outcomes 0..2j.
Coherent states on the sphere come from a closed-form coefficient formula
and from the rotation exponential applied to phi_{-j}; their squared
coefficients are binomial(2j, sin^2(theta/2)) weights.  Half-integers are
carried as exact doubled integers to avoid floating-point equality on j
and m.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .linops import adjoint, matrix_exponential, phase_aligned_distance
from .pv_measure import VectorState

__all__ = [
    "BinomialMap",
    "CoherentStateSpin",
    "SpherePoint",
    "SpinRep",
    "binomial_map",
    "binomial_pmf",
    "build_spin_rep",
    "coherent_amplitudes",
    "coset_element",
    "gauss_decomposition_check",
    "rotation_matrix",
    "so3_basis",
    "sphere_point_for_probability",
    "spin_coherent_closed_form",
    "spin_coherent_via_exponential",
]

_EXACT_BINOMIAL_LIMIT = 60

_M1 = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
_M2 = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)


def so3_basis() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Antisymmetric generators of the 3-d rotation group.

    e1, e2, e3 are the derivatives at zero of the rotations about the
    three coordinate axes; they satisfy [e1,e2]=e3, [e2,e3]=e1, [e3,e1]=e2
    exactly in integer arithmetic.
    """
    e1 = np.array([[0.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]])
    e2 = np.array([[0.0, 0.0, 1.0], [0.0, 0.0, 0.0], [-1.0, 0.0, 0.0]])
    e3 = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
    return e1, e2, e3


def _as_two_j(j) -> int:
    two_j = 2.0 * float(j)
    if abs(two_j - round(two_j)) > 1e-9 or two_j < 0:
        raise ValueError(f"j must be a nonnegative half-integer, got {j!r}")
    return int(round(two_j))


@dataclass(frozen=True)
class SpinRep:
    """Weight, raising, and lowering matrices of the spin-j representation."""

    two_j: int
    j3: np.ndarray
    j_plus: np.ndarray
    j_minus: np.ndarray

    @property
    def j(self) -> float:
        return self.two_j / 2.0

    @property
    def dim(self) -> int:
        return self.two_j + 1

    @property
    def m_values(self) -> np.ndarray:
        return (np.arange(self.dim) * 2 - self.two_j) / 2.0

    @property
    def j1(self) -> np.ndarray:
        return (self.j_plus + self.j_minus) / 2.0

    @property
    def j2(self) -> np.ndarray:
        return (self.j_plus - self.j_minus) / 2.0j


def build_spin_rep(j) -> SpinRep:
    """Spin-j matrices from the ladder coefficients.

    J+ phi_m = sqrt((j-m)(j+m+1)) phi_{m+1} and J- is its exact adjoint;
    J3 is diagonal with entries m = -j..j.
    """
    two_j = _as_two_j(j)
    dim = two_j + 1
    m = (np.arange(dim) * 2 - two_j) / 2.0
    # at index i (m = -j + i): (j - m)(j + m + 1) = (2j - i)(i + 1)
    i = np.arange(dim - 1)
    raise_coeff = np.sqrt((two_j - i) * (i + 1.0))
    j_plus = np.zeros((dim, dim), dtype=complex)
    j_plus[i + 1, i] = raise_coeff
    j_minus = adjoint(j_plus)
    j3 = np.diag(m).astype(complex)
    return SpinRep(two_j=two_j, j3=j3, j_plus=j_plus, j_minus=j_minus)


@dataclass(frozen=True)
class SpherePoint:
    """Point (theta, gamma) on the unit sphere, South Pole excluded."""

    theta: float
    gamma: float

    def __post_init__(self):
        if not 0.0 <= self.theta < math.pi:
            raise ValueError(f"theta must lie in [0, pi), got {self.theta!r}")
        if not 0.0 <= self.gamma < 2.0 * math.pi:
            raise ValueError(f"gamma must lie in [0, 2*pi), got {self.gamma!r}")


def coset_element(point: SpherePoint) -> np.ndarray:
    """SU(2) coset representative exp((i theta/2)(sin g M1 - cos g M2))."""
    generator = math.sin(point.gamma) * _M1 - math.cos(point.gamma) * _M2
    return matrix_exponential(0.5j * point.theta * generator)


def _sqrt_binomials(two_j: int) -> np.ndarray:
    """sqrt(C(2j, k)) for k = 0..2j; exact integers below the overflow regime."""
    k = np.arange(two_j + 1)
    if two_j <= _EXACT_BINOMIAL_LIMIT:
        return np.sqrt(np.array([math.comb(two_j, int(i)) for i in k], dtype=float))
    return np.exp(0.5 * (gammaln(two_j + 1) - gammaln(k + 1) - gammaln(two_j - k + 1)))


def coherent_amplitudes(rep: SpinRep, theta, gamma) -> np.ndarray:
    """Amplitudes <phi_m, w(theta, gamma)> for all m, lowest weight first.

    Coefficient k = j + m is sqrt(C(2j,k)) (-sin(t/2))^k (cos(t/2))^{2j-k}
    e^{-i k gamma}.  Broadcasts over theta and gamma; the result has shape
    broadcast(theta, gamma).shape + (2j+1,).
    """
    theta = np.asarray(theta, dtype=float)
    gamma = np.asarray(gamma, dtype=float)
    k = np.arange(rep.dim)
    half = theta[..., None] / 2.0
    magnitude = _sqrt_binomials(rep.two_j) * np.sin(half) ** k * np.cos(half) ** (rep.two_j - k)
    return (-1.0) ** k * magnitude * np.exp(-1j * k * gamma[..., None])


@dataclass(frozen=True)
class CoherentStateSpin:
    """Rotation coherent state w(theta, gamma) in a spin-j representation."""

    point: SpherePoint
    vector: VectorState


def spin_coherent_closed_form(rep: SpinRep, point: SpherePoint) -> CoherentStateSpin:
    """Coherent state from the closed-form coefficients (exact unit norm)."""
    vec = coherent_amplitudes(rep, point.theta, point.gamma)
    return CoherentStateSpin(point=point, vector=VectorState(vec))


def rotation_matrix(rep: SpinRep, point: SpherePoint) -> np.ndarray:
    """exp(i theta (sin g J1 - cos g J2)), the displacement to ``point``."""
    generator = math.sin(point.gamma) * rep.j1 - math.cos(point.gamma) * rep.j2
    return matrix_exponential(1j * point.theta * generator)


def spin_coherent_via_exponential(rep: SpinRep, point: SpherePoint, tol: float = 1e-10) -> CoherentStateSpin:
    """Coherent state from the rotation exponential applied to phi_{-j}.

    Raises RuntimeError when the result differs from the closed form by
    more than 10*tol up to a global phase.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    vec = rotation_matrix(rep, point)[:, 0].copy()
    closed = spin_coherent_closed_form(rep, point)
    distance = phase_aligned_distance(vec, closed.vector.vector)
    if distance > 10.0 * tol:
        raise RuntimeError(
            f"exponential route differs from the closed form by {distance:.3e} (limit {10.0 * tol:.1e})"
        )
    return CoherentStateSpin(point=point, vector=VectorState.from_unnormalized(vec))


def gauss_decomposition_check(rep: SpinRep, point: SpherePoint) -> float:
    """Operator-norm residual of D = exp(z J+) exp(eta J3) exp(z' J-).

    z = -tan(theta/2) e^{-i gamma}, eta = ln(1+|z|^2), z' = -conj(z).
    Both sides are computed independently with the matrix exponential.
    Raises ValueError when theta is too close to pi for tan(theta/2).
    """
    half = point.theta / 2.0
    if abs(math.cos(half)) < 1e-8:
        raise ValueError(f"theta={point.theta!r} is too close to pi for the triangular factors")
    zeta = -math.tan(half) * np.exp(-1j * point.gamma)
    eta = math.log1p(abs(zeta) ** 2)
    zeta_prime = -np.conjugate(zeta)
    displacement = rotation_matrix(rep, point)
    factored = (
        matrix_exponential(zeta * rep.j_plus)
        @ matrix_exponential(eta * rep.j3)
        @ matrix_exponential(zeta_prime * rep.j_minus)
    )
    return float(np.linalg.norm(displacement - factored, 2))


def _two_ell_index(rep: SpinRep, ell) -> int:
    """Basis index k = j + ell for a half-integer label ell in {-j..j}."""
    two_ell = 2.0 * float(ell)
    if abs(two_ell - round(two_ell)) > 1e-9:
        raise ValueError(f"ell must be a half-integer, got {ell!r}")
    two_ell = int(round(two_ell))
    if (two_ell - rep.two_j) % 2 != 0 or abs(two_ell) > rep.two_j:
        raise ValueError(f"ell={ell!r} is not a weight of the spin-{rep.j} representation")
    return (rep.two_j + two_ell) // 2


def _binomial_weight(n: int, k: int, p) -> np.ndarray:
    """C(n,k) p^k (1-p)^{n-k}, elementwise over p; shared with the posterior."""
    p = np.asarray(p, dtype=float)
    if n <= _EXACT_BINOMIAL_LIMIT:
        return math.comb(n, k) * p**k * (1.0 - p) ** (n - k)
    log_comb = gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_weight = log_comb + k * np.log(p) + (n - k) * np.log1p(-p)
        weight = np.exp(log_weight)
    if k == 0:
        weight = np.where(p == 0.0, 1.0, weight)
    else:
        weight = np.where(p == 0.0, 0.0, weight)
    if k == n:
        weight = np.where(p == 1.0, 1.0, weight)
    else:
        weight = np.where(p == 1.0, 0.0, weight)
    return weight


def binomial_pmf(rep: SpinRep, point: SpherePoint, ell) -> float:
    """Binomial probability C(2j, j+ell) p^{j+ell} (1-p)^{j-ell}, p = sin^2(theta/2)."""
    k = _two_ell_index(rep, ell)
    p = math.sin(point.theta / 2.0) ** 2
    return float(_binomial_weight(rep.two_j, k, p))


@dataclass(frozen=True)
class BinomialMap:
    """Binomial coordinates (n, k, p) of a spin outcome at a sphere point."""

    n: int
    k: int
    p: float

    def __post_init__(self):
        if self.n < 0 or not 0 <= self.k <= self.n:
            raise ValueError(f"need 0 <= k <= n, got n={self.n!r}, k={self.k!r}")
        if not 0.0 <= self.p < 1.0:
            raise ValueError(f"p must lie in [0, 1), got {self.p!r}")


def binomial_map(rep: SpinRep, point: SpherePoint, ell) -> BinomialMap:
    """Relabel (j, ell, theta) as binomial (n=2j, k=j+ell, p=sin^2(theta/2))."""
    return BinomialMap(n=rep.two_j, k=_two_ell_index(rep, ell), p=math.sin(point.theta / 2.0) ** 2)


def sphere_point_for_probability(p: float, gamma: float = 0.0) -> SpherePoint:
    """Sphere point with polar angle theta = 2 arcsin(sqrt(p))."""
    if not 0.0 <= p < 1.0:
        raise ValueError(f"p must lie in [0, 1), got {p!r}")
    return SpherePoint(theta=2.0 * math.asin(math.sqrt(p)), gamma=gamma)

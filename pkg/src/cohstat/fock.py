"""Truncated Fock space: ladder operators, displacements, Poisson family.

The annihilation/creation pair acts on a finite basis phi_0..phi_{K-1}, so
the canonical commutation relation [A, A+] = I holds only below the top
level; the top-level defect is a documented truncation artifact.  Coherent
states come from two routes that must agree: the closed-form expansion
with coefficients e^{-|a|^2/2} a^k / sqrt(k!), and the matrix exponential
of a*A+ - conj(a)*A applied to the vacuum.  Squared coefficients are the
Poisson(|a|^2) weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammainc, gammaln

from .linops import adjoint, matrix_exponential, phase_aligned_distance
from .pv_measure import VectorState

__all__ = [
    "CoherentStateWH",
    "FockSpace",
    "LadderRep",
    "TruncationError",
    "WHGroupElement",
    "bch_check",
    "build_ladder",
    "coherent_amplitudes",
    "coherent_closed_form",
    "coherent_via_exponential",
    "default_truncation",
    "displacement_matrix",
    "displacement_translation_check",
    "poisson_pmf",
    "poisson_tail",
    "wh_multiply",
]

DEFAULT_TAIL_TOL = 1e-12


class TruncationError(RuntimeError):
    """The truncated basis is too small for the requested displacement."""


@dataclass(frozen=True)
class FockSpace:
    """Finite number basis phi_0..phi_{dim-1}."""

    dim: int

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError(f"truncation must be at least 2, got {self.dim}")


@dataclass(frozen=True)
class LadderRep:
    """Annihilation, creation, and number matrices on a truncated Fock space."""

    annihilation: np.ndarray
    creation: np.ndarray
    number: np.ndarray
    space: FockSpace

    @property
    def dim(self) -> int:
        return self.space.dim


def build_ladder(dim: int) -> LadderRep:
    """Ladder matrices with A phi_k = sqrt(k) phi_{k-1}.

    The creation matrix is the exact adjoint of the annihilation matrix,
    and the number matrix is diagonal with entries 0..dim-1.  On the top
    basis vector A+ annihilates instead of raising (truncation).
    """
    space = FockSpace(dim)
    annihilation = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1).astype(complex)
    creation = adjoint(annihilation)
    number = np.diag(np.arange(dim, dtype=float)).astype(complex)
    return LadderRep(annihilation=annihilation, creation=creation, number=number, space=space)


@dataclass(frozen=True)
class WHGroupElement:
    """Group element (s; alpha) with a real central parameter and a complex one."""

    s: float
    alpha: complex

    def __post_init__(self):
        if not (math.isfinite(self.s) and np.isfinite(self.alpha)):
            raise ValueError("group element parameters must be finite")


def wh_multiply(g1: WHGroupElement, g2: WHGroupElement) -> WHGroupElement:
    """(s; a)(t; b) = (s + t + Im(a conj(b)); a + b)."""
    twist = (g1.alpha * g2.alpha.conjugate()).imag
    return WHGroupElement(s=g1.s + g2.s + twist, alpha=g1.alpha + g2.alpha)


def poisson_tail(lam: float, dim: int) -> float:
    """Poisson(lam) mass at or beyond the truncation level ``dim``."""
    if lam == 0.0:
        return 0.0
    return float(gammainc(dim, lam))


def _poisson_weight(lam, n):
    """e^{-lam} lam^n / n!, in log space; shared by the pmf and the posterior."""
    lam = np.asarray(lam, dtype=float)
    n = np.asarray(n)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_weight = -lam + n * np.log(lam) - gammaln(n + 1)
        weight = np.exp(log_weight)
    return np.where(lam > 0, weight, np.where(n == 0, 1.0, 0.0))


def poisson_pmf(alpha: complex, n: int) -> float:
    """Poisson probability of count n at rate |alpha|^2."""
    if n < 0 or n != int(n):
        raise ValueError(f"count must be a nonnegative integer, got {n!r}")
    return float(_poisson_weight(abs(alpha) ** 2, int(n)))


def coherent_amplitudes(alpha, dim: int) -> np.ndarray:
    """Exact amplitudes e^{-|a|^2/2} a^k / sqrt(k!) for k < dim.

    Vectorized over ``alpha``: the result has shape ``alpha.shape + (dim,)``.
    These are the untruncated state's coefficients at the tracked indices;
    no renormalization is applied, so for large |alpha| the rows carry only
    part of the unit mass.
    """
    a = np.asarray(alpha, dtype=complex)
    k = np.arange(dim)
    radius = np.abs(a)[..., None]
    lam = radius * radius
    with np.errstate(divide="ignore", invalid="ignore"):
        log_radius = np.where(radius > 0, np.log(np.where(radius > 0, radius, 1.0)), 0.0)
        magnitude = np.exp(-0.5 * lam + k * log_radius - 0.5 * gammaln(k + 1))
    magnitude = np.where(radius > 0, magnitude, (k == 0).astype(float))
    phase = np.exp(1j * k * np.angle(a)[..., None])
    return magnitude * phase


def default_truncation(alpha: complex) -> int:
    """Truncation placing the Poisson tail beyond mean + 12 sd below 1e-15."""
    lam = abs(alpha) ** 2
    return max(64, int(math.ceil(lam + 12.0 * math.sqrt(lam + 1.0))))


@dataclass(frozen=True)
class CoherentStateWH:
    """Displacement coherent state on a truncated Fock basis.

    ``tail_mass`` is the Poisson mass the truncation discarded; the stored
    vector is renormalized to unit norm.
    """

    alpha: complex
    vector: VectorState
    tail_mass: float


def coherent_closed_form(alpha: complex, space: FockSpace, tail_tol: float = DEFAULT_TAIL_TOL) -> CoherentStateWH:
    """Coherent state from the closed-form coefficient expansion."""
    alpha = complex(alpha)
    tail = poisson_tail(abs(alpha) ** 2, space.dim)
    if tail > tail_tol:
        raise TruncationError(
            f"tail mass {tail:.3e} above tolerance {tail_tol:.1e}; "
            f"truncation {space.dim} is too small for |alpha|={abs(alpha):.3f}"
        )
    coefficients = coherent_amplitudes(alpha, space.dim)
    return CoherentStateWH(
        alpha=alpha,
        vector=VectorState.from_unnormalized(coefficients),
        tail_mass=tail,
    )


def displacement_matrix(alpha: complex, rep: LadderRep, tol: float = 1e-12) -> np.ndarray:
    """exp(alpha A+ - conj(alpha) A) on the truncated space."""
    generator = alpha * rep.creation - np.conjugate(alpha) * rep.annihilation
    return matrix_exponential(generator, tol=tol)


def _vacuum(dim: int) -> np.ndarray:
    vec = np.zeros(dim, dtype=complex)
    vec[0] = 1.0
    return vec


def coherent_via_exponential(alpha: complex, rep: LadderRep, tol: float = 1e-10) -> CoherentStateWH:
    """Coherent state from the displacement exponential applied to the vacuum.

    Cross-validates against the closed form: raises TruncationError when the
    two routes disagree by more than 10*tol up to a global phase.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    alpha = complex(alpha)
    closed = coherent_closed_form(alpha, rep.space, tail_tol=max(tol, DEFAULT_TAIL_TOL))
    vec = displacement_matrix(alpha, rep) @ _vacuum(rep.dim)
    distance = phase_aligned_distance(vec, closed.vector.vector)
    if distance > 10.0 * tol:
        raise TruncationError(
            f"exponential route differs from the closed form by {distance:.3e} "
            f"(limit {10.0 * tol:.1e}); truncation {rep.dim} too small for |alpha|={abs(alpha):.3f}"
        )
    return CoherentStateWH(
        alpha=alpha,
        vector=VectorState.from_unnormalized(vec),
        tail_mass=closed.tail_mass,
    )


def bch_check(alpha: complex, rep: LadderRep) -> float:
    """Residual of exp(O1)exp(O2) = exp([O1,O2]/2) exp(O1+O2) on the vacuum.

    O1 = alpha A+ and O2 = -conj(alpha) A.  Both sides are evaluated with
    the matrix exponential; the residual is small only when the truncation
    is large enough for |alpha|, so this doubles as a truncation probe.
    """
    alpha = complex(alpha)
    o1 = alpha * rep.creation
    o2 = -np.conjugate(alpha) * rep.annihilation
    vacuum = _vacuum(rep.dim)
    lhs = matrix_exponential(o1) @ (matrix_exponential(o2) @ vacuum)
    cross = o1 @ o2 - o2 @ o1
    rhs = matrix_exponential(cross / 2.0) @ (matrix_exponential(o1 + o2) @ vacuum)
    return float(np.linalg.norm(lhs - rhs))


def displacement_translation_check(
    alpha: complex,
    beta: complex,
    rep: LadderRep,
    overlap_tol: float = 1e-8,
) -> tuple[float, complex]:
    """Check that displacement by beta translates the state at alpha to alpha+beta.

    Returns (overlap, phase) where overlap = |<v(alpha+beta), D(beta) v(alpha)>|
    and phase is the unit-modulus factor of that inner product, which should
    equal e^{i Im(beta conj(alpha))}.  Raises TruncationError when the overlap
    deviates from 1 by more than ``overlap_tol``.
    """
    alpha = complex(alpha)
    beta = complex(beta)
    vacuum = _vacuum(rep.dim)
    moved = displacement_matrix(beta, rep) @ (displacement_matrix(alpha, rep) @ vacuum)
    direct = displacement_matrix(beta + alpha, rep) @ vacuum
    overlap_c = np.vdot(direct, moved)
    overlap = abs(overlap_c)
    if abs(overlap - 1.0) > overlap_tol:
        raise TruncationError(
            f"overlap {overlap!r} deviates from 1 beyond {overlap_tol:.1e}; "
            f"truncation {rep.dim} too small for |alpha|+|beta|={abs(alpha) + abs(beta):.3f}"
        )
    return float(overlap), complex(overlap_c / overlap)

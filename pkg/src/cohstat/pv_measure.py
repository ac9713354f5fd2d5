"""Observables, states, and projection-valued measures on finite dimensions.

An observable is a Hermitian matrix whose eigenvalues are the possible
measurement results.  A PV measure assigns to each distinct eigenvalue the
orthogonal projector onto its eigenspace; pairing a projector with a unit
vector state gives the outcome probability.  The module also carries the
one analytic continuous case used here, a centered Gaussian position
density whose interval masses come from the error function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linops import SpectralDecomposition, hermitian_eigendecomposition

__all__ = [
    "FinitePVMeasure",
    "Observable",
    "StateOperator",
    "VectorState",
    "born_probabilities",
    "born_probability",
    "example_family_states",
    "expectation_trace",
    "gaussian_position_probability",
    "pv_from_observable",
]

_UNIT_NORM_TOL = 1e-12
_PROJECTOR_TOL = 1e-10
_OUTCOME_MATCH_TOL = 1e-9
_NEGATIVE_PROBABILITY_TOL = 1e-10


@dataclass(frozen=True)
class VectorState:
    """Unit vector representing a pure state.

    Two states are physically the same when they differ by a unit-modulus
    scalar; comparisons between construction routes should therefore use
    :func:`cohstat.linops.phase_aligned_distance`.
    """

    vector: np.ndarray

    def __post_init__(self):
        vec = np.asarray(self.vector, dtype=complex)
        if vec.ndim != 1 or vec.shape[0] < 1:
            raise ValueError(f"state must be a nonempty vector, got shape {vec.shape}")
        if not np.isfinite(vec).all():
            raise ValueError("state has non-finite entries")
        norm = float(np.linalg.norm(vec))
        if abs(norm - 1.0) > _UNIT_NORM_TOL:
            raise ValueError(f"state is not unit norm (norm {norm!r})")
        object.__setattr__(self, "vector", vec)

    @property
    def dim(self) -> int:
        return self.vector.shape[0]

    @classmethod
    def from_unnormalized(cls, vec) -> "VectorState":
        vec = np.asarray(vec, dtype=complex)
        norm = float(np.linalg.norm(vec))
        if norm == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return cls(vec / norm)


@dataclass(frozen=True)
class Observable:
    """Hermitian matrix with its cached spectral decomposition."""

    matrix: np.ndarray
    spectrum: SpectralDecomposition

    @classmethod
    def from_matrix(cls, matrix, tol: float = 1e-10) -> "Observable":
        matrix = np.asarray(matrix, dtype=complex)
        return cls(matrix=matrix, spectrum=hermitian_eigendecomposition(matrix, tol=tol))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class StateOperator:
    """Hermitian, positive semidefinite, trace-one operator (mixed state)."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"state operator must be square, got shape {m.shape}")
        scale = max(1.0, float(np.linalg.norm(m, "fro")))
        if float(np.linalg.norm(m - m.conj().T, "fro")) > 1e-10 * scale:
            raise ValueError("state operator is not Hermitian")
        eigenvalues = np.linalg.eigvalsh((m + m.conj().T) / 2.0)
        if eigenvalues.min() < -1e-12:
            raise ValueError(f"state operator is not positive semidefinite (min eigenvalue {eigenvalues.min():.3e})")
        trace = complex(np.trace(m))
        if abs(trace - 1.0) > 1e-12:
            raise ValueError(f"state operator trace is {trace!r}, expected 1")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_vector_state(cls, state: VectorState) -> "StateOperator":
        v = state.vector
        return cls(np.outer(v, v.conj()))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class FinitePVMeasure:
    """Projectors of a discrete spectral measure, one per distinct outcome.

    Projectors are idempotent, self-adjoint, mutually orthogonal, and sum
    to the identity; all four properties are checked on construction.
    """

    outcomes: np.ndarray
    projectors: tuple[np.ndarray, ...]

    def __post_init__(self):
        outcomes = np.asarray(self.outcomes, dtype=float)
        projectors = tuple(np.asarray(p, dtype=complex) for p in self.projectors)
        if outcomes.ndim != 1 or len(projectors) != outcomes.shape[0]:
            raise ValueError("need one projector per outcome")
        dim = projectors[0].shape[0]
        total = np.zeros((dim, dim), dtype=complex)
        for p in projectors:
            if np.linalg.norm(p - p.conj().T) > _PROJECTOR_TOL:
                raise ValueError("projector is not self-adjoint")
            if np.linalg.norm(p @ p - p) > _PROJECTOR_TOL:
                raise ValueError("projector is not idempotent")
            total += p
        if np.linalg.norm(total - np.eye(dim)) > _PROJECTOR_TOL:
            raise ValueError("projectors do not sum to the identity")
        for i in range(len(projectors)):
            for j in range(i + 1, len(projectors)):
                if np.linalg.norm(projectors[i] @ projectors[j]) > _PROJECTOR_TOL:
                    raise ValueError("projectors for distinct outcomes are not orthogonal")
        object.__setattr__(self, "outcomes", outcomes)
        object.__setattr__(self, "projectors", projectors)

    @property
    def dim(self) -> int:
        return self.projectors[0].shape[0]

    def outcome_index(self, outcome: float, match_tol: float = _OUTCOME_MATCH_TOL) -> int:
        distances = np.abs(self.outcomes - outcome)
        idx = int(np.argmin(distances))
        if distances[idx] > match_tol:
            raise ValueError(f"outcome {outcome!r} is not in the spectrum {self.outcomes}")
        return idx


def pv_from_observable(obs: Observable, cluster_tol: float = 1e-9) -> FinitePVMeasure:
    """PV measure of an observable, merging eigenvalues within cluster_tol.

    Spectra built here are integers or exact trigonometric values, so
    clusters are well separated and the default threshold is safe.
    """
    eigenvalues = obs.spectrum.eigenvalues
    vectors = obs.spectrum.eigenvectors
    outcomes: list[float] = []
    projectors: list[np.ndarray] = []
    start = 0
    for stop in range(1, eigenvalues.shape[0] + 1):
        if stop < eigenvalues.shape[0] and eigenvalues[start] - eigenvalues[stop] <= cluster_tol:
            continue
        block = vectors[:, start:stop]
        outcomes.append(float(eigenvalues[start:stop].mean()))
        projectors.append(block @ block.conj().T)
        start = stop
    return FinitePVMeasure(outcomes=np.asarray(outcomes), projectors=tuple(projectors))


def born_probability(state: VectorState, pv: FinitePVMeasure, outcome: float) -> float:
    """Probability (phi, E({y}) phi) of the given outcome for a vector state.

    Values in [-1e-12, 1 + 1e-12] are clamped to [0, 1]; anything more
    negative indicates a bug upstream and raises instead of clamping.
    """
    if state.dim != pv.dim:
        raise ValueError(f"dimension mismatch: state {state.dim}, measure {pv.dim}")
    idx = pv.outcome_index(outcome)
    raw = np.vdot(state.vector, pv.projectors[idx] @ state.vector).real
    if raw < -_NEGATIVE_PROBABILITY_TOL:
        raise ValueError(f"projector expectation is {raw!r}, below rounding tolerance")
    return float(min(1.0, max(0.0, raw)))


def born_probabilities(state: VectorState, pv: FinitePVMeasure) -> np.ndarray:
    """Probabilities for every outcome, aligned with ``pv.outcomes``."""
    return np.array([born_probability(state, pv, y) for y in pv.outcomes])


def expectation_trace(state_op: StateOperator, obs: Observable) -> float:
    """Expected result trace(S O) for a state operator and observable."""
    if state_op.dim != obs.dim:
        raise ValueError(f"dimension mismatch: state operator {state_op.dim}, observable {obs.dim}")
    value = complex(np.trace(state_op.matrix @ obs.matrix))
    if abs(value.imag) > 1e-12 * max(1.0, abs(value.real)):
        raise ValueError(f"trace has unexpected imaginary part {value.imag!r}")
    return float(value.real)


def example_family_states(beta: float, theta: float) -> VectorState:
    """Three-level family (e^{-ib} cos^2(t/2), sin t / sqrt2, e^{ib} sin^2(t/2)).

    Against the diag(1, 0, -1) observable this produces outcome
    probabilities (cos^4(t/2), 2 sin^2(t/2) cos^2(t/2), sin^4(t/2)), a
    binomial law with two trials after relabeling.  Expected ranges are
    beta in [0, 2pi) and theta in [0, pi).
    """
    half = theta / 2.0
    vec = np.array(
        [
            np.exp(-1j * beta) * np.cos(half) ** 2,
            np.sin(theta) / np.sqrt(2.0),
            np.exp(1j * beta) * np.sin(half) ** 2,
        ],
        dtype=complex,
    )
    return VectorState.from_unnormalized(vec)


def _standard_normal_cdf(z: float) -> float:
    return 0.5 * (1.0 + math.erf(z / math.sqrt(2.0)))


def gaussian_position_probability(sigma: float, a: float, b: float) -> float:
    """Mass of [a, b] under the N(0, sigma^2) position density, via erf.

    Infinite bounds are passed as ``float('-inf')`` / ``float('inf')``;
    the full line integrates to exactly 1.
    """
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma!r}")
    if a > b:
        raise ValueError(f"need a <= b, got a={a!r}, b={b!r}")
    upper = 1.0 if math.isinf(b) and b > 0 else _standard_normal_cdf(b / sigma)
    lower = 0.0 if math.isinf(a) and a < 0 else _standard_normal_cdf(a / sigma)
    return upper - lower

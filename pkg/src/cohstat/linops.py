"""Dense complex linear algebra kernel.

Everything downstream (observables, ladder operators, coherent states,
quadrature checks) is built on the handful of primitives here: Hermitian
inner products, adjoints, commutators, a matrix exponential, and a
deterministic Hermitian eigendecomposition.  All functions are pure and
operate on plain numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "SpectralDecomposition",
    "adjoint",
    "commutator",
    "hermitian_eigendecomposition",
    "inner_product",
    "matrix_exponential",
    "phase_aligned_distance",
]

_EXP_MAX_TERMS = 64


def _as_complex_matrix(m) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    return m


def _as_complex_vector(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    if v.ndim != 1 or v.shape[0] < 1:
        raise ValueError(f"expected a nonempty 1-d vector, got shape {v.shape}")
    return v


def inner_product(u, v) -> complex:
    """Hermitian inner product, conjugate-linear in the first argument."""
    u = _as_complex_vector(u)
    v = _as_complex_vector(v)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape[0]} vs {v.shape[0]}")
    return complex(np.vdot(u, v))


def adjoint(m) -> np.ndarray:
    """Conjugate transpose."""
    return _as_complex_matrix(m).conj().T.copy()


def commutator(a, b) -> np.ndarray:
    """[a, b] = ab - ba."""
    a = _as_complex_matrix(a)
    b = _as_complex_matrix(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return a @ b - b @ a


def matrix_exponential(m, tol: float = 1e-12) -> np.ndarray:
    """Matrix exponential by scaling and squaring of a truncated power series.

    The input is scaled by a power of two until its Frobenius norm is at
    most one, the series is summed until the next term falls below the
    (scaled) tolerance, and the result is repeatedly squared.  exp(0) is
    the identity exactly.

    Raises ValueError for non-finite entries or a non-positive tolerance,
    RuntimeError when the requested tolerance is not reached within the
    iteration budget.
    """
    m = _as_complex_matrix(m)
    if not np.isfinite(m).all():
        raise ValueError("matrix has non-finite entries")
    if tol <= 0:
        raise ValueError("tol must be positive")
    dim = m.shape[0]
    norm = np.linalg.norm(m, "fro")
    if norm == 0.0:
        return np.eye(dim, dtype=complex)
    squarings = max(0, int(np.ceil(np.log2(norm))))
    series_tol = tol / 2.0**squarings
    b = m / 2.0**squarings

    result = np.eye(dim, dtype=complex)
    term = np.eye(dim, dtype=complex)
    for k in range(1, _EXP_MAX_TERMS + 1):
        term = term @ b / k
        result = result + term
        if np.linalg.norm(term, "fro") <= series_tol * max(1.0, np.linalg.norm(result, "fro")):
            break
    else:
        raise RuntimeError(f"series did not reach tol={tol} within {_EXP_MAX_TERMS} terms")

    for _ in range(squarings):
        result = result @ result
    return result


def phase_aligned_distance(u, v) -> float:
    """Norm of u - eps*v minimized over a unit-modulus scalar eps.

    States are equivalence classes modulo a global phase, so vector
    comparisons between two routes to the same state go through this.
    """
    u = _as_complex_vector(u)
    v = _as_complex_vector(v)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape[0]} vs {v.shape[0]}")
    overlap = np.vdot(v, u)
    eps = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    return float(np.linalg.norm(u - eps * v))


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues (descending) and orthonormal eigenvectors of a Hermitian matrix.

    Column i of ``eigenvectors`` belongs to ``eigenvalues[i]``.  Each
    eigenvector's global phase is fixed by making its first nonzero entry
    positive real, so outputs are deterministic for golden tests.  Within a
    degenerate cluster only the spanned subspace is meaningful; compare
    projectors there, not columns.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def reconstruct(self) -> np.ndarray:
        """Sum of eigenvalue-weighted rank-one projectors."""
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def _fix_column_phases(vectors: np.ndarray) -> np.ndarray:
    fixed = vectors.copy()
    for i in range(fixed.shape[1]):
        col = fixed[:, i]
        nonzero = np.nonzero(np.abs(col) > 1e-12)[0]
        if nonzero.size == 0:
            continue
        lead = col[nonzero[0]]
        fixed[:, i] = col * (lead.conjugate() / abs(lead))
    return fixed


def hermitian_eigendecomposition(m, tol: float = 1e-10) -> SpectralDecomposition:
    """Eigendecomposition of a Hermitian matrix with deterministic ordering.

    The Hermiticity requirement is ||m - m*||_F <= tol * max(1, ||m||_F);
    constructed matrices are Hermitian to rounding only, so the default is
    loose relative to machine precision.
    """
    m = _as_complex_matrix(m)
    scale = max(1.0, float(np.linalg.norm(m, "fro")))
    defect = float(np.linalg.norm(m - m.conj().T, "fro"))
    if defect > tol * scale:
        raise ValueError(f"matrix is not Hermitian within tolerance (defect {defect:.3e})")
    h = (m + m.conj().T) / 2.0
    eigenvalues, eigenvectors = np.linalg.eigh(h)
    eigenvalues = eigenvalues[::-1].copy()
    eigenvectors = _fix_column_phases(eigenvectors[:, ::-1])
    return SpectralDecomposition(eigenvalues=eigenvalues, eigenvectors=eigenvectors)

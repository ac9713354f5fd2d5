"""Shared random-input generators for the test suite."""

import numpy as np


def random_complex_matrix(rng: np.random.Generator, dim: int, scale: float = 1.0) -> np.ndarray:
    real = rng.uniform(-1.0, 1.0, size=(dim, dim))
    imag = rng.uniform(-1.0, 1.0, size=(dim, dim))
    return scale * (real + 1j * imag)


def random_hermitian(rng: np.random.Generator, dim: int, scale: float = 1.0) -> np.ndarray:
    m = random_complex_matrix(rng, dim, scale)
    return (m + m.conj().T) / 2.0


def random_unit_vector(rng: np.random.Generator, dim: int) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)

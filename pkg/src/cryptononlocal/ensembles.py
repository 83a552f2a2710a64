"""Seeded random instances: unitaries, Hermitian operators, Schmidt bases."""

from __future__ import annotations

import numpy as np

from .operators import HermitianOperator


def rng_from(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Haar unitary: QR of a complex Ginibre matrix with the R-diagonal phases removed."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_hermitian(rng: np.random.Generator, dim: int, scale: float = 1.0) -> HermitianOperator:
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return HermitianOperator(scale * 0.5 * (z + z.conj().T), symmetrize=True)


def omega_diagonal(dim: int) -> np.ndarray:
    """diag(1, 0, ..., 0, -1)."""
    d = np.zeros(dim)
    d[0], d[-1] = 1.0, -1.0
    return np.diag(d)


def random_omega(rng: np.random.Generator, dim: int) -> HermitianOperator:
    """Random operator with spectrum {1, 0 (N-2 times), -1}."""
    u = random_unitary(rng, dim)
    return HermitianOperator(u @ omega_diagonal(dim) @ u.conj().T, symmetrize=True)


def random_schmidt(rng: np.random.Generator, dim: int):
    from .states import SchmidtBasis

    return SchmidtBasis(random_unitary(rng, dim), random_unitary(rng, dim))

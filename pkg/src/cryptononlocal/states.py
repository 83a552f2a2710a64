"""Maximally entangled states of two N-level systems and their averages.

The composite state is stored as an explicit dense N^2-vector (Alice's index
major) so the closed-form averages can be checked against brute-force
contractions that do not assume them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, PreconditionError
from .operators import (
    CoefficientVector,
    HermitianOperator,
    OperatorBasis,
    Side,
    build_basis,
    check_orthonormal,
)

# "vanishing average" cutoff for the Pearson coefficient
ZERO_AVERAGE_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class SchmidtBasis:
    """Two orthonormal bases, stored as columns of N x N arrays."""

    alice_vectors: np.ndarray
    bob_vectors: np.ndarray

    def __post_init__(self):
        v = check_orthonormal(self.alice_vectors, name="Alice Schmidt vectors")
        w = check_orthonormal(self.bob_vectors, name="Bob Schmidt vectors")
        if v.shape != w.shape:
            raise DimensionError(f"Alice and Bob bases differ in size: {v.shape} vs {w.shape}")
        object.__setattr__(self, "alice_vectors", v)
        object.__setattr__(self, "bob_vectors", w)

    @property
    def dim(self) -> int:
        return self.alice_vectors.shape[0]

    @classmethod
    def standard(cls, dim: int) -> "SchmidtBasis":
        if dim < 2:
            raise DimensionError(f"dimension must be >= 2, got {dim}")
        return cls(np.eye(dim), np.eye(dim))


@dataclass(frozen=True, eq=False)
class MaxEntangledState:
    schmidt: SchmidtBasis
    vector: np.ndarray

    @property
    def dim(self) -> int:
        return self.schmidt.dim

    @property
    def amplitude(self) -> float:
        return 1.0 / np.sqrt(self.dim)

    def coefficient_matrix(self) -> np.ndarray:
        """psi reshaped so that psi = sum_ab M_ab |a> (x) |b>."""
        return self.vector.reshape(self.dim, self.dim)

    def basis(self, side) -> OperatorBasis:
        return build_basis(self.schmidt, side)


def make_state(schmidt: SchmidtBasis) -> MaxEntangledState:
    n = schmidt.dim
    v, w = schmidt.alice_vectors, schmidt.bob_vectors
    psi = sum(np.kron(v[:, j], w[:, j]) for j in range(n)) / np.sqrt(n)
    psi = np.asarray(psi, dtype=np.complex128)
    psi.setflags(write=False)
    return MaxEntangledState(schmidt, psi)


def reduced_density(state: MaxEntangledState, side=Side.ALICE) -> np.ndarray:
    """Partial trace of |psi><psi| over the other party."""
    m = state.coefficient_matrix()
    if Side(side) is Side.ALICE:
        return m @ m.conj().T
    return m.T @ m.conj()


def dense_expectation(
    state: MaxEntangledState,
    op_a: HermitianOperator | None = None,
    op_b: HermitianOperator | None = None,
) -> float:
    """<psi| A (x) B |psi> by explicit Kronecker product; ``None`` means identity."""
    n = state.dim
    a = np.eye(n) if op_a is None else op_a.matrix
    b = np.eye(n) if op_b is None else op_b.matrix
    if a.shape != (n, n) or b.shape != (n, n):
        raise DimensionError("operator dimension does not match the state")
    psi = state.vector
    return float(np.vdot(psi, np.kron(a, b) @ psi).real)


def _check_pair(state: MaxEntangledState, a: CoefficientVector, b: CoefficientVector) -> None:
    if a.side is not Side.ALICE or b.side is not Side.BOB:
        raise DimensionError(f"expected (Alice, Bob) coefficient vectors, got ({a.side.value}, {b.side.value})")
    if a.dim != state.dim or b.dim != state.dim:
        raise DimensionError(f"coefficient dims ({a.dim}, {b.dim}) do not match state dim {state.dim}")


def joint_average(state: MaxEntangledState, a: CoefficientVector, b: CoefficientVector) -> float:
    """<A(a) B(b)> = a.b / N."""
    _check_pair(state, a, b)
    return a.dot(b) / state.dim


def square_average(state: MaxEntangledState, a: CoefficientVector) -> float:
    """<A(a)^2> = |a|^2 / N, on either side."""
    if a.dim != state.dim:
        raise DimensionError(f"coefficient dim {a.dim} does not match state dim {state.dim}")
    return a.norm_sq / state.dim


def local_average(state: MaxEntangledState, op: HermitianOperator) -> float:
    """Tr(op) / N; the reduced states are maximally mixed on both sides."""
    if op.dim != state.dim:
        raise DimensionError(f"operator dim {op.dim} does not match state dim {state.dim}")
    return op.trace / state.dim


def pearson(state: MaxEntangledState, a: CoefficientVector, b: CoefficientVector) -> float:
    """Correlation coefficient of A(a) and B(b); both must have zero average."""
    _check_pair(state, a, b)
    for label, vec in (("A", a), ("B", b)):
        avg = vec.trace / state.dim
        if abs(avg) > ZERO_AVERAGE_TOL:
            raise PreconditionError(f"<{label}> = {avg:.3e} is not zero; Pearson form needs vanishing averages")
        if vec.norm == 0.0:
            raise PreconditionError(f"{label} is the zero operator")
    return float((a.values / a.norm) @ (b.values / b.norm))

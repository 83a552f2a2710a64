"""Splitting a Hermitian observable into commuting three-valued components.

Any Hermitian ``A`` is written as ``alpha0 * I + sum_j alpha_j C_j`` with
``C_j = P_j - P_{j+1}`` built from consecutive rank-1 projectors of a context
basis that diagonalizes ``A``.  Each ``C_j`` has spectrum {1, 0, -1} with a
(N-2)-fold kernel ({1, -1} for N = 2), and all of them commute.  For a
degenerate ``A`` the context is not fixed by ``A`` itself, which is why it is
carried along explicitly.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import ContextError, DimensionError, SpectrumError
from .operators import (
    DEGENERACY_TOL,
    HermitianOperator,
    check_orthonormal,
    eigensystem,
)

SPECTRUM_TOL = 1e-8
CONTEXT_TOL = 1e-8
COMMUTE_TOL = 1e-10
RECONSTRUCT_TOL = 1e-10


class SpectrumKind(str, enum.Enum):
    OMEGA_N = "OmegaN"
    TWO_LEVEL = "TwoLevel"


@dataclass(frozen=True)
class SpectrumClass:
    kind: SpectrumKind
    dim: int

    @classmethod
    def for_dim(cls, dim: int) -> "SpectrumClass":
        return cls(SpectrumKind.TWO_LEVEL if dim == 2 else SpectrumKind.OMEGA_N, dim)

    @property
    def values(self) -> np.ndarray:
        """The expected eigenvalues, descending, with multiplicity."""
        v = np.zeros(self.dim)
        v[0], v[-1] = 1.0, -1.0
        return v


def spectrum_deviation(op: HermitianOperator) -> float:
    """Max deviation of the sorted eigenvalues from (1, 0, ..., 0, -1)."""
    vals = np.linalg.eigvalsh(op.matrix)[::-1]
    return float(np.max(np.abs(vals - SpectrumClass.for_dim(op.dim).values)))


def has_omega_spectrum(op: HermitianOperator, tol: float = SPECTRUM_TOL) -> bool:
    return spectrum_deviation(op) <= tol


def require_omega_spectrum(op: HermitianOperator, tol: float = SPECTRUM_TOL) -> None:
    dev = spectrum_deviation(op)
    if dev > tol:
        raise SpectrumError(f"operator does not have spectrum {{1, 0, -1}} (eigenvalue deviation {dev:.3e})")


@dataclass(frozen=True, eq=False)
class Context:
    """Ordered orthonormal basis; its rank-1 projectors form a maximal commuting set."""

    eigenbasis: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "eigenbasis", check_orthonormal(self.eigenbasis, name="context basis"))

    @property
    def dim(self) -> int:
        return self.eigenbasis.shape[0]

    def projector(self, k: int) -> np.ndarray:
        e = self.eigenbasis[:, k]
        return np.outer(e, e.conj())

    def diagonal_of(self, op: HermitianOperator) -> tuple[np.ndarray, float]:
        """Diagonal of op in this basis, and the largest off-diagonal magnitude."""
        m = self.eigenbasis.conj().T @ op.matrix @ self.eigenbasis
        off = m - np.diag(np.diag(m))
        return np.diag(m).real.copy(), float(np.max(np.abs(off))) if m.size > 1 else 0.0

    def diagonalizes(self, op: HermitianOperator, tol: float = CONTEXT_TOL) -> bool:
        return self.diagonal_of(op)[1] <= tol


def default_context(op: HermitianOperator) -> Context:
    return Context(eigensystem(op).eigenvectors)


@dataclass(frozen=True, eq=False)
class CartanDecomposition:
    alpha0: float
    terms: tuple[tuple[float, HermitianOperator], ...]
    context: Context

    @property
    def alphas(self) -> np.ndarray:
        return np.array([alpha for alpha, _ in self.terms])

    @property
    def components(self) -> list[HermitianOperator]:
        return [c for _, c in self.terms]

    @property
    def dim(self) -> int:
        return self.context.dim

    def reconstruct(self) -> np.ndarray:
        m = self.alpha0 * np.eye(self.dim, dtype=np.complex128)
        for alpha, comp in self.terms:
            m = m + alpha * comp.matrix
        return m


def cartan_decompose(op: HermitianOperator, context: Context | None = None) -> CartanDecomposition:
    n = op.dim
    if n < 2:
        raise DimensionError("dimension must be >= 2")
    if context is None:
        context = default_context(op)
    elif context.dim != n:
        raise DimensionError(f"context dim {context.dim} does not match operator dim {n}")
    diag, off = context.diagonal_of(op)
    if off > CONTEXT_TOL:
        raise ContextError(f"context does not diagonalize the operator (off-diagonal residual {off:.3e})")
    alpha0 = op.trace / n
    alphas = np.cumsum(diag - alpha0)[:-1]
    projectors = [context.projector(k) for k in range(n)]
    terms = tuple(
        (float(alphas[j]), HermitianOperator(projectors[j] - projectors[j + 1], symmetrize=True))
        for j in range(n - 1)
    )
    return CartanDecomposition(alpha0=alpha0, terms=terms, context=context)


@dataclass(frozen=True)
class DecompositionReport:
    commute_ok: bool
    spectrum_ok: bool
    reconstruct_residual: float
    max_commutator: float
    max_spectrum_deviation: float

    @property
    def ok(self) -> bool:
        return self.commute_ok and self.spectrum_ok and self.reconstruct_residual < RECONSTRUCT_TOL


def verify_decomposition(dec: CartanDecomposition, source: HermitianOperator) -> DecompositionReport:
    if dec.dim != source.dim:
        raise DimensionError(f"decomposition dim {dec.dim} does not match source dim {source.dim}")
    comps = dec.components
    max_comm = 0.0
    for j in range(len(comps)):
        for k in range(j + 1, len(comps)):
            max_comm = max(max_comm, comps[j].commutator_norm(comps[k]))
    max_spec = max((spectrum_deviation(c) for c in comps), default=0.0)
    residual = float(np.max(np.abs(dec.reconstruct() - source.matrix)))
    return DecompositionReport(
        commute_ok=max_comm < COMMUTE_TOL,
        spectrum_ok=max_spec <= SPECTRUM_TOL,
        reconstruct_residual=residual,
        max_commutator=max_comm,
        max_spectrum_deviation=max_spec,
    )


def cross_commutator(first: CartanDecomposition, second: CartanDecomposition) -> float:
    """Largest commutator norm between components of two decompositions."""
    return max(c.commutator_norm(d) for c in first.components for d in second.components)


def decomposition_ambiguity_witness(op: HermitianOperator) -> tuple[Context, Context] | None:
    """Two contexts for a degenerate ``op`` whose decompositions do not commute.

    The second context rotates the first two vectors of the first degenerate
    level by 45 degrees (a Hadamard inside that eigenspace).  Returns ``None``
    when every eigenvalue is simple.
    """
    eig = eigensystem(op)
    degenerate = [g for g in eig.levels(DEGENERACY_TOL) if len(g) > 1]
    if not degenerate:
        return None
    p, q = degenerate[0][:2]
    basis = np.array(eig.eigenvectors)
    rotated = basis.copy()
    rotated[:, p] = (basis[:, p] + basis[:, q]) / np.sqrt(2.0)
    rotated[:, q] = (basis[:, p] - basis[:, q]) / np.sqrt(2.0)
    first, second = Context(basis), Context(rotated)
    if cross_commutator(cartan_decompose(op, first), cartan_decompose(op, second)) <= 1e-6:
        return None
    return first, second

"""Hermitian operators, Hilbert-Schmidt geometry and state-adapted operator bases.

Every Hermitian operator on an N-level system is expanded in an orthonormal
(Hilbert-Schmidt) basis of N^2 Hermitian matrices built from the Schmidt
vectors of a maximally entangled state.  Alice's basis uses the vectors
``v_j``; Bob's basis is its transpose partner built from ``w_j``.  The
coefficient vectors of both sides then live in the same real space R^{N^2}.

Basis order: the N diagonal projectors, then the symmetric off-diagonal
elements for i < j in lexicographic order, then the antisymmetric ones
likewise.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from .errors import DimensionError, NotHermitianError, NotOrthonormalError

if TYPE_CHECKING:
    from .states import SchmidtBasis

HERMITIAN_TOL = 1e-12
ORTHONORMAL_TOL = 1e-12
# eigenvalues closer than this are treated as one degenerate level
DEGENERACY_TOL = 1e-8

__all__ = [
    "Side",
    "HermitianOperator",
    "OperatorBasis",
    "CoefficientVector",
    "EigenSystem",
    "hs_inner",
    "build_basis",
    "vectorize",
    "devectorize",
    "transpose_partner",
    "transpose_partner_inverse",
    "eigensystem",
    "identity",
    "check_orthonormal",
]


class Side(str, enum.Enum):
    ALICE = "alice"
    BOB = "bob"


def _as_side(side) -> Side:
    return side if isinstance(side, Side) else Side(str(side).lower())


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """Dense N x N Hermitian matrix, checked on construction.

    Pass ``symmetrize=True`` to replace the input by (M + M^dagger)/2 before
    the check; nothing is repaired otherwise.
    """

    matrix: np.ndarray
    symmetrize: bool = field(default=False, repr=False)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionError(f"expected a square matrix, got shape {m.shape}")
        if m.shape[0] < 2:
            raise DimensionError(f"dimension must be >= 2, got {m.shape[0]}")
        if self.symmetrize:
            m = 0.5 * (m + m.conj().T)
        asym = float(np.max(np.abs(m - m.conj().T)))
        if asym > HERMITIAN_TOL:
            raise NotHermitianError(asym, HERMITIAN_TOL)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def __add__(self, other: "HermitianOperator") -> "HermitianOperator":
        _check_dims(self, other)
        return HermitianOperator(self.matrix + other.matrix)

    def __sub__(self, other: "HermitianOperator") -> "HermitianOperator":
        _check_dims(self, other)
        return HermitianOperator(self.matrix - other.matrix)

    def __neg__(self) -> "HermitianOperator":
        return HermitianOperator(-self.matrix)

    def __mul__(self, scalar: float) -> "HermitianOperator":
        return HermitianOperator(float(scalar) * self.matrix)

    __rmul__ = __mul__

    def conjugate_by(self, unitary: np.ndarray) -> "HermitianOperator":
        """Return U O U^dagger (re-symmetrized to absorb rounding)."""
        u = np.asarray(unitary)
        return HermitianOperator(u @ self.matrix @ u.conj().T, symmetrize=True)

    def commutator_norm(self, other: "HermitianOperator") -> float:
        """Frobenius norm of [self, other]."""
        _check_dims(self, other)
        c = self.matrix @ other.matrix - other.matrix @ self.matrix
        return float(np.linalg.norm(c))


def identity(dim: int) -> HermitianOperator:
    return HermitianOperator(np.eye(dim))


def _check_dims(x: HermitianOperator, y: HermitianOperator) -> None:
    if x.dim != y.dim:
        raise DimensionError(f"dimension mismatch: {x.dim} vs {y.dim}")


def hs_inner(x: HermitianOperator, y: HermitianOperator) -> float:
    """Hilbert-Schmidt inner product Tr(x y), real for Hermitian arguments."""
    _check_dims(x, y)
    # Tr(xy) = sum_ij x_ij y_ji
    value = np.sum(x.matrix * y.matrix.T)
    return float(value.real)


def check_orthonormal(vectors: np.ndarray, tol: float = ORTHONORMAL_TOL, name: str = "vectors") -> np.ndarray:
    """Validate that the columns of ``vectors`` are orthonormal and return them."""
    v = np.array(vectors, dtype=np.complex128)
    if v.ndim != 2 or v.shape[0] != v.shape[1]:
        raise DimensionError(f"{name}: expected N x N array of column vectors, got shape {v.shape}")
    gram = v.conj().T @ v
    dev = float(np.max(np.abs(gram - np.eye(v.shape[1]))))
    if dev > tol:
        raise NotOrthonormalError(f"{name} are not orthonormal (max Gram deviation {dev:.3e})")
    v.setflags(write=False)
    return v


@dataclass(frozen=True, eq=False)
class CoefficientVector:
    """Real coordinates of an operator in an :class:`OperatorBasis`."""

    values: np.ndarray
    side: Side = Side.ALICE

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64).reshape(-1)
        n = int(round(np.sqrt(v.size)))
        if n * n != v.size or n < 2:
            raise DimensionError(f"coefficient vector length {v.size} is not N^2 with N >= 2")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "side", _as_side(self.side))

    @property
    def dim(self) -> int:
        return int(round(np.sqrt(self.values.size)))

    @property
    def norm_sq(self) -> float:
        return float(self.values @ self.values)

    @property
    def norm(self) -> float:
        return float(np.sqrt(self.norm_sq))

    @property
    def trace(self) -> float:
        """Trace of the represented operator (only diagonal projectors carry trace)."""
        return float(np.sum(self.values[: self.dim]))

    def on(self, side) -> "CoefficientVector":
        """Same coordinates, read in the other party's basis."""
        return CoefficientVector(self.values, _as_side(side))

    def dot(self, other: "CoefficientVector") -> float:
        if other.values.size != self.values.size:
            raise DimensionError("coefficient vectors of different length")
        return float(self.values @ other.values)

    def __neg__(self) -> "CoefficientVector":
        return CoefficientVector(-self.values, self.side)

    def __len__(self) -> int:
        return self.values.size


@dataclass(frozen=True, eq=False)
class OperatorBasis:
    side: Side
    dim: int
    elements: tuple[HermitianOperator, ...]
    labels: tuple[str, ...]

    def __post_init__(self):
        stack = np.stack([e.matrix for e in self.elements])
        stack.setflags(write=False)
        object.__setattr__(self, "_stack", stack)

    def __len__(self) -> int:
        return len(self.elements)

    def __getitem__(self, k: int) -> HermitianOperator:
        return self.elements[k]

    @property
    def stack(self) -> np.ndarray:
        """All elements as an (N^2, N, N) array."""
        return self._stack


def _coordinate_matrices(n: int) -> tuple[list[np.ndarray], list[str]]:
    """Basis elements written in Schmidt coordinates (index matrices)."""
    mats, labels = [], []
    for i in range(n):
        m = np.zeros((n, n), dtype=np.complex128)
        m[i, i] = 1.0
        mats.append(m)
        labels.append(f"F_{i + 1}{i + 1}")
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    s = 1.0 / np.sqrt(2.0)
    for i, j in pairs:
        m = np.zeros((n, n), dtype=np.complex128)
        m[i, j] = m[j, i] = s
        mats.append(m)
        labels.append(f"F+_{i + 1}{j + 1}")
    for i, j in pairs:
        m = np.zeros((n, n), dtype=np.complex128)
        m[i, j] = 1j * s
        m[j, i] = -1j * s
        mats.append(m)
        labels.append(f"F-_{i + 1}{j + 1}")
    return mats, labels


def build_basis(schmidt: "SchmidtBasis", side=Side.ALICE) -> OperatorBasis:
    """Orthonormal Hermitian basis adapted to the Schmidt vectors.

    Alice's elements are V f_k V^dagger, Bob's are W f_k^T W^dagger, where
    f_k are the coordinate matrices and V, W hold the Schmidt vectors as
    columns.
    """
    side = _as_side(side)
    v = check_orthonormal(schmidt.alice_vectors, name="Alice Schmidt vectors")
    w = check_orthonormal(schmidt.bob_vectors, name="Bob Schmidt vectors")
    n = v.shape[0]
    coords, labels = _coordinate_matrices(n)
    if side is Side.ALICE:
        elements = [HermitianOperator(v @ f @ v.conj().T, symmetrize=True) for f in coords]
    else:
        elements = [HermitianOperator(w @ f.T @ w.conj().T, symmetrize=True) for f in coords]
        labels = [lab.replace("F", "G", 1) for lab in labels]
    return OperatorBasis(side=side, dim=n, elements=tuple(elements), labels=tuple(labels))


def vectorize(op: HermitianOperator, basis: OperatorBasis) -> CoefficientVector:
    if op.dim != basis.dim:
        raise DimensionError(f"operator dim {op.dim} does not match basis dim {basis.dim}")
    # a_k = Tr(B_k op) = sum_ij (B_k)_ij op_ji
    values = np.einsum("kij,ji->k", basis.stack, op.matrix)
    return CoefficientVector(values.real, basis.side)


def devectorize(a: CoefficientVector, basis: OperatorBasis) -> HermitianOperator:
    if len(a) != len(basis):
        raise DimensionError(f"coefficient length {len(a)} does not match basis size {len(basis)}")
    m = np.einsum("k,kij->ij", a.values, basis.stack)
    return HermitianOperator(m, symmetrize=True)


def transpose_partner(op: HermitianOperator, schmidt: "SchmidtBasis") -> HermitianOperator:
    """Bob-side operator O^T = sum_ij o_ji |w_i><w_j| for Alice's O = sum_ij o_ij |v_i><v_j|."""
    v, w = schmidt.alice_vectors, schmidt.bob_vectors
    if op.dim != v.shape[0]:
        raise DimensionError(f"operator dim {op.dim} does not match Schmidt dim {v.shape[0]}")
    o = v.conj().T @ op.matrix @ v
    return HermitianOperator(w @ o.T @ w.conj().T, symmetrize=True)


def transpose_partner_inverse(op: HermitianOperator, schmidt: "SchmidtBasis") -> HermitianOperator:
    """Map a Bob-side operator back to its Alice-side partner."""
    v, w = schmidt.alice_vectors, schmidt.bob_vectors
    if op.dim != w.shape[0]:
        raise DimensionError(f"operator dim {op.dim} does not match Schmidt dim {w.shape[0]}")
    p = w.conj().T @ op.matrix @ w
    return HermitianOperator(v @ p.T @ v.conj().T, symmetrize=True)


@dataclass(frozen=True, eq=False)
class EigenSystem:
    """Eigenvalues in descending order; eigenvectors are the matching columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        e = self.eigenvectors
        return (e * self.eigenvalues) @ e.conj().T

    def levels(self, tol: float = DEGENERACY_TOL) -> list[list[int]]:
        """Indices grouped into degenerate levels (consecutive, descending)."""
        return _group_levels(self.eigenvalues, tol)


def _group_levels(values: np.ndarray, tol: float) -> list[list[int]]:
    groups: list[list[int]] = [[0]]
    for k in range(1, len(values)):
        if abs(values[k - 1] - values[k]) < tol:
            groups[-1].append(k)
        else:
            groups.append([k])
    return groups


def _fix_phase(vec: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(vec)))
    phase = vec[k] / abs(vec[k])
    return vec / phase


def _canonical_subspace_basis(vectors: np.ndarray, drop_tol: float = 1e-8) -> np.ndarray:
    """Deterministic orthonormal basis of span(vectors).

    Standard basis vectors are projected onto the subspace in index order and
    orthonormalized sequentially; residuals below ``drop_tol`` are skipped.
    """
    n, m = vectors.shape
    proj = vectors @ vectors.conj().T
    out: list[np.ndarray] = []
    for k in range(n):
        if len(out) == m:
            break
        x = proj[:, k].copy()
        for _ in range(2):  # second pass restores orthogonality lost to cancellation
            for q in out:
                x -= (q.conj() @ x) * q
        r = np.linalg.norm(x)
        if r < drop_tol:
            continue
        out.append(x / r)
    if len(out) != m:
        raise np.linalg.LinAlgError("could not build a canonical basis for a degenerate eigenspace")
    return np.column_stack(out)


def eigensystem(op: HermitianOperator) -> EigenSystem:
    """Deterministic spectral decomposition.

    Non-degenerate eigenvectors get their largest-magnitude component made
    real and positive; degenerate eigenspaces get the canonical basis of
    :func:`_canonical_subspace_basis`.
    """
    vals, vecs = np.linalg.eigh(op.matrix)
    vals = vals[::-1].copy()
    vecs = vecs[:, ::-1].copy()
    for group in _group_levels(vals, DEGENERACY_TOL):
        if len(group) == 1:
            k = group[0]
            vecs[:, k] = _fix_phase(vecs[:, k])
        else:
            vecs[:, group] = _canonical_subspace_basis(vecs[:, group])
    vals.setflags(write=False)
    vecs.setflags(write=False)
    return EigenSystem(vals, vecs)

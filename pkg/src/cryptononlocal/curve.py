"""Unitary curve from a three-valued observable ``a`` to ``-a``.

For an operator with spectrum {1, 0, -1} the space splits into its kernel K
and the plane L spanned by the +1/-1 eigenvectors.  On L the operator is
sigma_z of an embedded Pauli frame.  Rotating with
``V_theta = P_K + exp(i theta/2 c.sigma)`` (c orthogonal to the z axis) turns
sigma_z into ``cos(theta) sigma_z + sin(theta) sigma_perp``, so the
coefficient vectors trace a planar half circle with a(pi) = -a.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .decomposition import require_omega_spectrum
from .errors import DimensionError, PreconditionError
from .operators import (
    CoefficientVector,
    HermitianOperator,
    OperatorBasis,
    devectorize,
    eigensystem,
    vectorize,
)

AXIS_TOL = 1e-12
SPACING_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class PauliFrame:
    e_plus: np.ndarray
    e_minus: np.ndarray
    kernel_basis: np.ndarray  # N x (N-2), possibly empty
    sigma: tuple[HermitianOperator, HermitianOperator, HermitianOperator]
    a_tilde: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 1.0]))

    @property
    def dim(self) -> int:
        return self.e_plus.shape[0]

    @property
    def plane_projector(self) -> np.ndarray:
        return np.outer(self.e_plus, self.e_plus.conj()) + np.outer(self.e_minus, self.e_minus.conj())

    @property
    def kernel_projector(self) -> np.ndarray:
        k = self.kernel_basis
        return k @ k.conj().T


def pauli_frame(op: HermitianOperator) -> PauliFrame:
    """Embedded Pauli frame in which ``op`` is sigma_z on L and zero on K.

    Eigenvector phases follow :func:`eigensystem` (largest component real and
    positive), so the frame is deterministic.
    """
    require_omega_spectrum(op)
    vecs = eigensystem(op).eigenvectors
    e_plus = np.array(vecs[:, 0])
    e_minus = np.array(vecs[:, -1])
    kernel = np.array(vecs[:, 1:-1])
    up_down = np.outer(e_plus, e_minus.conj())
    down_up = up_down.conj().T
    sx = HermitianOperator(up_down + down_up)
    sy = HermitianOperator(-1j * up_down + 1j * down_up)
    sz = HermitianOperator(np.outer(e_plus, e_plus.conj()) - np.outer(e_minus, e_minus.conj()))
    for arr in (e_plus, e_minus, kernel):
        arr.setflags(write=False)
    return PauliFrame(e_plus=e_plus, e_minus=e_minus, kernel_basis=kernel, sigma=(sx, sy, sz))


def _check_axis(frame: PauliFrame, axis) -> np.ndarray:
    c = np.asarray(axis, dtype=np.float64).reshape(-1)
    if c.shape != (3,):
        raise DimensionError(f"axis must be a 3-vector, got shape {c.shape}")
    if abs(np.linalg.norm(c) - 1.0) > AXIS_TOL:
        raise PreconditionError(f"axis must have unit length, |c| = {np.linalg.norm(c):.15g}")
    if abs(c @ frame.a_tilde) > AXIS_TOL:
        raise PreconditionError(f"axis must be orthogonal to the frame's z axis, c.a = {c @ frame.a_tilde:.3e}")
    return c


def rotation_unitary(frame: PauliFrame, axis, theta: float) -> np.ndarray:
    """exp(i theta/2 c.sigma) on L, identity on K, via the closed 2x2 form."""
    c = _check_axis(frame, axis)
    c_sigma = sum(ck * s.matrix for ck, s in zip(c, frame.sigma))
    half = 0.5 * theta
    return frame.kernel_projector + math.cos(half) * frame.plane_projector + 1j * math.sin(half) * c_sigma


@dataclass(frozen=True, eq=False)
class CurveSpec:
    source: CoefficientVector
    frame: PauliFrame
    axis: np.ndarray = field(default_factory=lambda: np.array([1.0, 0.0, 0.0]))
    total_angle: float = math.pi

    def __post_init__(self):
        object.__setattr__(self, "axis", _check_axis(self.frame, self.axis))


def make_curve(a: CoefficientVector, basis: OperatorBasis, axis=(1.0, 0.0, 0.0)) -> CurveSpec:
    """Curve spec for the observable with coefficients ``a`` in ``basis``."""
    if a.side is not basis.side:
        raise DimensionError(f"coefficients are on {a.side.value}'s side, basis on {basis.side.value}'s")
    frame = pauli_frame(devectorize(a, basis))
    return CurveSpec(source=a, frame=frame, axis=np.asarray(axis, dtype=np.float64))


def curve_point(spec: CurveSpec, basis: OperatorBasis, theta: float) -> CoefficientVector:
    if not (-1e-12 <= theta <= spec.total_angle + 1e-12):
        raise PreconditionError(f"theta = {theta} outside [0, {spec.total_angle}]")
    v = rotation_unitary(spec.frame, spec.axis, theta)
    op = devectorize(spec.source, basis)
    return vectorize(op.conjugate_by(v), basis)


def partition(spec: CurveSpec, basis: OperatorBasis, n: int) -> list[CoefficientVector]:
    """Points a(j pi / n), j = 0..n, along the planar curve."""
    if n < 1:
        raise PreconditionError(f"partition count must be >= 1, got {n}")
    if not math.isclose(spec.total_angle, math.pi, rel_tol=0, abs_tol=1e-15):
        raise PreconditionError("only the planar half-circle (total angle pi) can be generated")
    return [curve_point(spec, basis, j * math.pi / n) for j in range(n + 1)]


def partition_angles(n: int, total_angle: float = math.pi) -> np.ndarray:
    return np.arange(n + 1) * (total_angle / n)


@dataclass(frozen=True)
class SpacingReport:
    uniform_ok: bool
    max_deviation: float


def verify_partition_spacing(points: list[CoefficientVector], total_angle: float = math.pi) -> SpacingReport:
    """Check a_{j+1}.a_j = |a|^2 cos(total_angle / n) for every adjacent pair."""
    if len(points) < 2:
        raise PreconditionError("need at least two points")
    n = len(points) - 1
    target = points[0].norm_sq * math.cos(total_angle / n)
    dev = max(abs(points[j + 1].dot(points[j]) - target) for j in range(n))
    return SpacingReport(uniform_ok=dev < SPACING_TOL, max_deviation=float(dev))


def planarity_residual(spec: CurveSpec, basis: OperatorBasis, thetas) -> float:
    """Largest distance of a(theta) from span{a(0), a(pi/2)}."""
    plane = np.column_stack([spec.source.values, curve_point(spec, basis, math.pi / 2).values])
    q, _ = np.linalg.qr(plane)
    worst = 0.0
    for t in thetas:
        x = curve_point(spec, basis, float(t)).values
        worst = max(worst, float(np.linalg.norm(x - q @ (q.T @ x))))
    return worst

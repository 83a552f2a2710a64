"""Exception types shared across the package."""

from __future__ import annotations


class DimensionError(ValueError):
    """Operands live on spaces of different (or invalid) dimension."""


class NotHermitianError(ValueError):
    """A matrix failed the Hermiticity check.

    ``max_asymmetry`` carries max |M_ij - conj(M_ji)| so callers can report it.
    """

    def __init__(self, max_asymmetry: float, tol: float):
        self.max_asymmetry = float(max_asymmetry)
        self.tol = float(tol)
        super().__init__(
            f"matrix is not Hermitian: max asymmetry max |M_ij - conj(M_ji)| = {self.max_asymmetry:.3e} "
            f"exceeds tolerance {self.tol:.1e}"
        )


class NotOrthonormalError(ValueError):
    """A family of vectors is not orthonormal within tolerance."""


class SpectrumError(ValueError):
    """An operator does not have the spectrum an operation requires."""


class ContextError(ValueError):
    """A context basis does not diagonalize the operator it is paired with."""


class PreconditionError(ValueError):
    """A documented precondition of an operation does not hold."""

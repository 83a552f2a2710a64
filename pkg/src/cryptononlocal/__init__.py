"""Numerical checks on the local parts of crypto-nonlocal hidden-variable models.

Operator bases adapted to maximally entangled states, the commuting
three-valued decomposition of observables, the unitary half-circle from a to
-a, the resulting bounds on intermediate averages, and two hidden-variable
models used as positive and negative controls.
"""

from .operators import (
    CoefficientVector,
    EigenSystem,
    HermitianOperator,
    OperatorBasis,
    Side,
    build_basis,
    devectorize,
    eigensystem,
    hs_inner,
    transpose_partner,
    vectorize,
)
from .states import (
    MaxEntangledState,
    SchmidtBasis,
    joint_average,
    local_average,
    make_state,
    pearson,
)
from .decomposition import (
    CartanDecomposition,
    Context,
    cartan_decompose,
    decomposition_ambiguity_witness,
    verify_decomposition,
)
from .curve import CurveSpec, PauliFrame, curve_point, make_curve, partition, pauli_frame, rotation_unitary
from .hvmodels import LeggettModel, QMFaithfulModel, estimate_full_average, estimate_intermediate, make_setting
from .montecarlo import EstimateResult
from .theorem import (
    chain_bound,
    final_bound,
    per_step_bound,
    reduce_to_omega,
    skew_symmetry_check,
    verify_step,
    verify_theorem,
)

__version__ = "0.1.0"

"""Hidden-variable models and Monte Carlo estimators of their averages.

A model samples hidden variables ``lambda = (mu, tau)`` and assigns each party
a definite value from the spectrum of its observable.  Crypto-nonlocal models
additionally expose the intermediate averages over ``mu`` at fixed ``tau``
(``f`` for Alice, ``g`` for Bob) when these are known in closed form.

Two models ship:

* ``qm-faithful`` -- a nonlocal deterministic model that reproduces the
  quantum joint distribution exactly by inverse-CDF sampling of a single
  uniform ``mu``; ``tau`` is a single point.
* ``leggett`` -- qubits only; ``tau`` is a pair of antiparallel unit vectors
  (u, -u) uniformly distributed on the sphere, with ``f = u.a`` and
  ``g = -u.b`` in Bloch coordinates.  Outcomes are independent coin flips
  with those biases.  It contradicts quantum mechanics and serves as the
  negative control.

Hidden-variable batches are plain arrays owned by the model; estimators only
go through ``sample_*`` and ``assign``.
"""

from __future__ import annotations

import abc
from dataclasses import dataclass
from typing import Any

import numpy as np

from .decomposition import Context, default_context, has_omega_spectrum
from .errors import ContextError, DimensionError, PreconditionError, SpectrumError
from .montecarlo import EstimateResult, estimate
from .operators import CoefficientVector, HermitianOperator, OperatorBasis, Side, devectorize
from .states import MaxEntangledState

PROBABILITY_FLOOR = 1e-12
SETTING_CONTEXT_TOL = 1e-8

__all__ = [
    "MeasurementSetting",
    "make_setting",
    "HiddenVariable",
    "HiddenVariableModel",
    "CryptoNonlocalModel",
    "QMFaithfulModel",
    "LeggettModel",
    "qm_faithful_assign",
    "qm_faithful_crypto_split",
    "bloch_vector",
    "leggett_f",
    "leggett_g",
    "estimate_intermediate",
    "estimate_full_average",
    "MODEL_REGISTRY",
    "make_model",
]


@dataclass(frozen=True, eq=False)
class MeasurementSetting:
    """An observable, its context, and its snapped eigenvalues in context order.

    For a {1, 0, -1} observable the eigenvalues are snapped to exact integers so
    that equal outcomes on both sides compare equal bit for bit.
    """

    coefficients: CoefficientVector
    context: Context
    operator: HermitianOperator
    values: np.ndarray
    omega: bool

    @property
    def side(self) -> Side:
        return self.coefficients.side

    @property
    def dim(self) -> int:
        return self.operator.dim

    @property
    def order(self) -> np.ndarray:
        """Context indices sorted by descending eigenvalue (stable)."""
        return np.argsort(-self.values, kind="stable")

    @property
    def spectrum(self) -> frozenset[float]:
        return frozenset(float(x) for x in self.values)


def make_setting(a: CoefficientVector, basis: OperatorBasis, context: Context | None = None) -> MeasurementSetting:
    if a.side is not basis.side:
        raise DimensionError(f"coefficients are on {a.side.value}'s side, basis on {basis.side.value}'s")
    op = devectorize(a, basis)
    if context is None:
        context = default_context(op)
    diag, off = context.diagonal_of(op)
    if off > SETTING_CONTEXT_TOL:
        raise ContextError(f"context does not diagonalize the setting (off-diagonal residual {off:.3e})")
    omega = has_omega_spectrum(op)
    values = np.rint(diag) if omega else diag
    values = values + 0.0  # normalizes -0.0
    values.setflags(write=False)
    return MeasurementSetting(coefficients=a, context=context, operator=op, values=values, omega=omega)


@dataclass(frozen=True, eq=False)
class HiddenVariable:
    """A batch of hidden variables; row k of ``mu`` pairs with row k of ``tau``."""

    mu: Any
    tau: Any

    def __len__(self) -> int:
        return len(self.mu)


class HiddenVariableModel(abc.ABC):
    name: str = ""

    @abc.abstractmethod
    def sample_lambda(self, rng: np.random.Generator, size: int) -> HiddenVariable: ...

    @abc.abstractmethod
    def assign(
        self, setting_a: MeasurementSetting, setting_b: MeasurementSetting, lam: HiddenVariable
    ) -> tuple[np.ndarray, np.ndarray]:
        """Values of A and B for every hidden variable in the batch."""


class CryptoNonlocalModel(HiddenVariableModel):
    @abc.abstractmethod
    def sample_tau(self, rng: np.random.Generator, size: int) -> np.ndarray: ...

    @abc.abstractmethod
    def sample_mu(self, tau: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        """One mu ~ rho(mu | tau) per row of ``tau``."""

    @abc.abstractmethod
    def repeat_tau(self, tau: Any, size: int) -> np.ndarray:
        """A batch holding the single hidden variable ``tau`` ``size`` times."""

    def sample_lambda(self, rng: np.random.Generator, size: int) -> HiddenVariable:
        tau = self.sample_tau(rng, size)
        return HiddenVariable(self.sample_mu(tau, rng), tau)

    def intermediate_f(self, setting: MeasurementSetting, tau: np.ndarray) -> np.ndarray | None:
        """Closed-form f(a, tau) per row of ``tau``; ``None`` means Monte Carlo only."""
        return None

    def intermediate_g(self, setting: MeasurementSetting, tau: np.ndarray) -> np.ndarray | None:
        return None

    @property
    def has_analytic_intermediates(self) -> bool:
        return False


def _check_sides(setting_a: MeasurementSetting, setting_b: MeasurementSetting) -> None:
    if setting_a.side is not Side.ALICE or setting_b.side is not Side.BOB:
        raise DimensionError("settings must be (Alice, Bob)")


def joint_outcome_table(
    state: MaxEntangledState, setting_a: MeasurementSetting, setting_b: MeasurementSetting
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Quantum joint distribution over context outcomes in the fixed sampling order.

    Returns (probabilities, values_a, values_b), flattened lexicographically in
    (Alice rank, Bob rank) with ranks by descending eigenvalue.
    """
    _check_sides(setting_a, setting_b)
    if setting_a.dim != state.dim or setting_b.dim != state.dim:
        raise DimensionError("setting dimension does not match the state")
    ca = setting_a.context.eigenbasis[:, setting_a.order]
    cb = setting_b.context.eigenbasis[:, setting_b.order]
    # <c_i (x) d_j | psi> = c_i^dagger M conj(d_j)
    amp = ca.conj().T @ state.coefficient_matrix() @ cb.conj()
    p = np.abs(amp) ** 2
    p[p < PROBABILITY_FLOOR] = 0.0
    total = p.sum()
    if abs(total - 1.0) > 1e-10:
        raise RuntimeError(f"joint probabilities sum to {total!r}, not 1")
    va = setting_a.values[setting_a.order]
    vb = setting_b.values[setting_b.order]
    n = state.dim
    return p.reshape(-1), np.repeat(va, n), np.tile(vb, n)


def _inverse_cdf(p: np.ndarray, u: np.ndarray) -> np.ndarray:
    cdf = np.cumsum(p)
    idx = np.searchsorted(cdf, u, side="right")
    last = int(np.flatnonzero(p)[-1])
    return np.minimum(idx, last)


def qm_faithful_assign(
    state: MaxEntangledState, setting_a: MeasurementSetting, setting_b: MeasurementSetting, u
) -> tuple:
    """Outcome pair selected by inverse CDF at ``u`` in [0, 1).

    Scalar ``u`` gives a pair of floats; an array gives a pair of arrays.
    """
    p, va, vb = joint_outcome_table(state, setting_a, setting_b)
    u_arr = np.asarray(u, dtype=np.float64)
    if np.any((u_arr < 0.0) | (u_arr >= 1.0)):
        raise PreconditionError("u must lie in [0, 1)")
    idx = _inverse_cdf(p, u_arr)
    if u_arr.ndim == 0:
        return float(va[idx]), float(vb[idx])
    return va[idx], vb[idx]


class QMFaithfulModel(CryptoNonlocalModel):
    """Reproduces the quantum joint statistics; tau is a single point."""

    name = "qm-faithful"

    def __init__(self, state: MaxEntangledState):
        self.state = state

    @property
    def dim(self) -> int:
        return self.state.dim

    def sample_tau(self, rng, size):
        return np.zeros(size)

    def sample_mu(self, tau, rng):
        return rng.random(len(tau))

    def repeat_tau(self, tau, size):
        return np.full(size, 0.0 if tau is None else float(tau))

    def assign(self, setting_a, setting_b, lam):
        return qm_faithful_assign(self.state, setting_a, setting_b, np.asarray(lam.mu))

    def intermediate_f(self, setting, tau):
        # Tr A / N from the snapped eigenvalues: exactly 0 for {1, 0, -1} observables
        return np.full(len(tau), setting.values.sum() / self.dim)

    intermediate_g = intermediate_f

    @property
    def has_analytic_intermediates(self) -> bool:
        return True


def qm_faithful_crypto_split(state: MaxEntangledState) -> QMFaithfulModel:
    """The qm-faithful model read as crypto-nonlocal with a one-point tau and mu = u."""
    return QMFaithfulModel(state)


def bloch_vector(a: CoefficientVector) -> np.ndarray:
    """Bloch vector of a qubit observable, read from its coefficients.

    With coefficients (a_11, a_22, a+_12, a-_12) the operator in Schmidt
    coordinates is ``x sigma_x + y sigma_y + z sigma_z + t I`` with
    x = a+/sqrt2, y = -a-/sqrt2, z = (a_11 - a_22)/2.  The same map is used on
    Bob's side, so identical coefficient vectors share a Bloch vector.
    """
    if a.dim != 2:
        raise DimensionError(f"Bloch vectors need N = 2, got N = {a.dim}")
    a11, a22, ap, am = a.values
    s = np.sqrt(2.0)
    return np.array([ap / s, -am / s, 0.5 * (a11 - a22)])


def _unit(x, name: str) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if np.any(np.abs(np.linalg.norm(x, axis=-1) - 1.0) > 1e-10):
        raise PreconditionError(f"{name} must be unit vectors")
    return x


def leggett_f(a_bloch, tau) -> np.ndarray | float:
    """f(a, tau) = u.a for tau = (u, v); accepts a single tau (2, 3) or a batch (k, 2, 3)."""
    a = _unit(a_bloch, "a_bloch")
    tau = np.asarray(tau, dtype=np.float64)
    u = _unit(tau[..., 0, :], "u")
    return u @ a


def leggett_g(b_bloch, tau) -> np.ndarray | float:
    """g(b, tau) = v.b with v = -u."""
    b = _unit(b_bloch, "b_bloch")
    tau = np.asarray(tau, dtype=np.float64)
    v = _unit(tau[..., 1, :], "v")
    return v @ b


class LeggettModel(CryptoNonlocalModel):
    """Qubit polarization model with tau = (u, -u) uniform on the sphere."""

    name = "leggett"
    dim = 2

    def __init__(self, state: MaxEntangledState | None = None):
        if state is not None and state.dim != 2:
            raise DimensionError("the Leggett-style model is defined for N = 2 only")
        self.state = state

    def sample_tau(self, rng, size):
        u = rng.standard_normal((size, 3))
        u /= np.linalg.norm(u, axis=1, keepdims=True)
        return np.stack([u, -u], axis=1)

    def sample_mu(self, tau, rng):
        return rng.random((len(tau), 2))

    def repeat_tau(self, tau, size):
        tau = np.asarray(tau, dtype=np.float64).reshape(2, 3)
        return np.broadcast_to(tau, (size, 2, 3))

    @staticmethod
    def _bloch(setting: MeasurementSetting) -> np.ndarray:
        if setting.dim != 2 or not setting.omega:
            raise SpectrumError("the Leggett-style model needs qubit observables with spectrum {1, -1}")
        return bloch_vector(setting.coefficients)

    def intermediate_f(self, setting, tau):
        return leggett_f(self._bloch(setting), tau)

    def intermediate_g(self, setting, tau):
        return leggett_g(self._bloch(setting), tau)

    @property
    def has_analytic_intermediates(self) -> bool:
        return True

    def assign(self, setting_a, setting_b, lam):
        _check_sides(setting_a, setting_b)
        f = self.intermediate_f(setting_a, lam.tau)
        g = self.intermediate_g(setting_b, lam.tau)
        mu = np.asarray(lam.mu)
        # descending order puts +1 first
        va = np.where(mu[:, 0] < 0.5 * (1.0 + f), setting_a.values.max(), setting_a.values.min())
        vb = np.where(mu[:, 1] < 0.5 * (1.0 + g), setting_b.values.max(), setting_b.values.min())
        return va, vb


MODEL_REGISTRY = {
    QMFaithfulModel.name: QMFaithfulModel,
    LeggettModel.name: LeggettModel,
}


def make_model(name: str, state: MaxEntangledState) -> CryptoNonlocalModel:
    try:
        cls = MODEL_REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown model {name!r}; choose from {sorted(MODEL_REGISTRY)}") from None
    return cls(state)


def estimate_intermediate(
    model: CryptoNonlocalModel,
    setting_a: MeasurementSetting,
    setting_b: MeasurementSetting,
    tau,
    n_samples: int,
    seed: int,
    workers: int = 1,
) -> EstimateResult:
    """Monte Carlo mean of Alice's value over mu ~ rho(mu | tau) at fixed tau."""
    if n_samples < 2:
        raise ValueError(f"n_samples must be >= 2, got {n_samples}")

    def sampler(rng, k):
        taus = model.repeat_tau(tau, k)
        lam = HiddenVariable(model.sample_mu(taus, rng), taus)
        return model.assign(setting_a, setting_b, lam)[0]

    return estimate(sampler, n_samples, seed, workers)[0]


def estimate_full_average(
    model: HiddenVariableModel,
    setting_a: MeasurementSetting,
    setting_b: MeasurementSetting,
    n_samples: int,
    seed: int,
    workers: int = 1,
) -> tuple[EstimateResult, EstimateResult, EstimateResult]:
    """Monte Carlo <A>, <B>, <AB> over lambda ~ rho(lambda)."""
    if n_samples < 2:
        raise ValueError(f"n_samples must be >= 2, got {n_samples}")

    def sampler(rng, k):
        va, vb = model.assign(setting_a, setting_b, model.sample_lambda(rng, k))
        return np.column_stack([va, vb, va * vb])

    res = estimate(sampler, n_samples, seed, workers)
    return res[0], res[1], res[2]

"""Bounds on intermediate averages and their Monte Carlo verification.

For a {1, 0, -1} observable ``a`` the half-circle partition a_0 = a, ...,
a_n = -a gives, for every crypto-nonlocal model consistent with quantum
mechanics,

    E_tau |f(a_j) - g(a_{j+1})|  <=  4 |a|^2 / N  sin^2(pi / 2n)      (per step)
    E_tau |f(a_0) - f(a_n)|      <=  n  times that                    (chained)
    E_tau |f(a)|                 <=  2n |a|^2 / N  sin^2(pi / 2n)     (final)

and the final bound vanishes as n grows.  Estimates are compared to the
bounds with a three-standard-error rule: FAIL when ``mean - 3 se > bound``,
PASS when ``mean + 3 se <= bound``, INCONCLUSIVE in between (which still
counts as not failing).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .curve import make_curve, partition, partition_angles
from .decomposition import Context, cartan_decompose, require_omega_spectrum
from .errors import PreconditionError
from .hvmodels import CryptoNonlocalModel, HiddenVariable, MeasurementSetting, make_setting
from .montecarlo import EstimateResult, check_seed, derive_seed, estimate, summarize
from .operators import CoefficientVector, HermitianOperator, OperatorBasis, Side, devectorize, vectorize
from .states import MaxEntangledState

SIGMA_RULE = 3.0
ZERO_AVERAGE_TOL = 1e-10
DEFAULT_N_TAU = 10_000
DEFAULT_N_MU = 1_000


def _check_bound_args(n: int, norm_a_sq: float, dim: int) -> None:
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    if int(dim) != dim or dim < 2:
        raise ValueError(f"N must be an integer >= 2, got {dim}")
    if not norm_a_sq > 0:
        raise ValueError(f"|a|^2 must be positive, got {norm_a_sq}")


def per_step_bound(n: int, norm_a_sq: float, dim: int) -> float:
    _check_bound_args(n, norm_a_sq, dim)
    return 4.0 * norm_a_sq / dim * math.sin(math.pi / (2 * n)) ** 2


def chain_bound(n: int, norm_a_sq: float, dim: int) -> float:
    return n * per_step_bound(n, norm_a_sq, dim)


def final_bound(n: int, norm_a_sq: float, dim: int) -> float:
    return chain_bound(n, norm_a_sq, dim) / 2.0


class Verdict(str, enum.Enum):
    PASS = "pass"
    INCONCLUSIVE = "inconclusive"
    FAIL = "fail"


def judge(est: EstimateResult, bound: float, k: float = SIGMA_RULE) -> Verdict:
    if est.mean - k * est.stderr > bound:
        return Verdict.FAIL
    if est.mean + k * est.stderr <= bound:
        return Verdict.PASS
    return Verdict.INCONCLUSIVE


@dataclass(frozen=True)
class StepReport:
    j: int
    theta: float
    lhs_estimate: EstimateResult
    rhs: float
    verdict: Verdict

    @property
    def passed(self) -> bool:
        return self.verdict is not Verdict.FAIL


@dataclass(frozen=True)
class TheoremReport:
    n: int
    dim: int
    norm_a_sq: float
    step_reports: tuple[StepReport, ...]
    final_lhs: EstimateResult
    final_rhs: float
    verdict: Verdict

    @property
    def violated(self) -> bool:
        return self.verdict is Verdict.FAIL

    @property
    def all_steps_pass(self) -> bool:
        return all(s.passed for s in self.step_reports)


def _resolve_mode(model: CryptoNonlocalModel, analytic: bool | None) -> bool:
    if analytic is None:
        return model.has_analytic_intermediates
    if analytic and not model.has_analytic_intermediates:
        raise PreconditionError(f"model {model.name!r} has no closed-form intermediate averages")
    return analytic


def _nested(
    model: CryptoNonlocalModel,
    pairs: list[tuple[MeasurementSetting, MeasurementSetting, str]],
    combine,
    n_tau: int,
    n_mu: int,
    seed: int,
) -> EstimateResult:
    """Outer tau loop, inner mu averages.

    Each entry of ``pairs`` is (setting_a, setting_b, which) with ``which`` in
    {"a", "b", "a-b"}: the per-mu quantity whose mean is taken.  ``combine``
    maps the list of inner means to the outer sample.  The squared standard
    errors of the inner means are averaged over tau and added to the squared
    standard error of the outer mean.
    """
    if n_tau < 2 or n_mu < 2:
        raise ValueError("nested estimation needs n_tau >= 2 and n_mu >= 2")
    rng = np.random.default_rng(np.random.SeedSequence(check_seed(seed)))
    taus = model.sample_tau(rng, n_tau)
    outer = np.empty(n_tau)
    inner_var = np.empty(n_tau)
    for i in range(n_tau):
        rep = model.repeat_tau(taus[i], n_mu)
        means, var = [], 0.0
        for setting_a, setting_b, which in pairs:
            va, vb = model.assign(setting_a, setting_b, HiddenVariable(model.sample_mu(rep, rng), rep))
            x = {"a": va, "b": vb, "a-b": va - vb}[which]
            means.append(x.mean())
            var += x.var(ddof=1) / n_mu
        outer[i] = combine(means)
        inner_var[i] = var
    return summarize(outer, seed, extra_variance=float(inner_var.mean()))


def _alice_bob_settings(state: MaxEntangledState, a: CoefficientVector, b: CoefficientVector):
    return (
        make_setting(a.on(Side.ALICE), state.basis(Side.ALICE)),
        make_setting(b.on(Side.BOB), state.basis(Side.BOB)),
    )


def _require_omega(state: MaxEntangledState, *vectors: CoefficientVector) -> None:
    basis = state.basis(Side.ALICE)
    for v in vectors:
        require_omega_spectrum(devectorize(v.on(Side.ALICE), basis))


def verify_step(
    model: CryptoNonlocalModel,
    state: MaxEntangledState,
    a_j: CoefficientVector,
    a_j1: CoefficientVector,
    n: int,
    n_tau: int = DEFAULT_N_TAU,
    n_mu: int = DEFAULT_N_MU,
    seed: int = 0,
    *,
    j: int = 0,
    theta: float = 0.0,
    analytic: bool | None = None,
    workers: int = 1,
) -> StepReport:
    """Estimate E_tau |f(a_j, tau) - g(a_{j+1}, tau)| and compare with the per-step bound.

    Alice measures ``a_j``, Bob measures ``a_{j+1}`` (read in his basis).
    Closed-form intermediates are used when the model has them, unless
    ``analytic=False`` forces nested Monte Carlo over mu.
    """
    _require_omega(state, a_j, a_j1)
    setting_a, setting_b = _alice_bob_settings(state, a_j, a_j1)
    if _resolve_mode(model, analytic):

        def sampler(rng, k):
            tau = model.sample_tau(rng, k)
            return np.abs(model.intermediate_f(setting_a, tau) - model.intermediate_g(setting_b, tau))

        lhs = estimate(sampler, n_tau, seed, workers)[0]
    else:
        lhs = _nested(model, [(setting_a, setting_b, "a-b")], lambda m: abs(m[0]), n_tau, n_mu, seed)
    rhs = per_step_bound(n, a_j.norm_sq, state.dim)
    return StepReport(j=j, theta=theta, lhs_estimate=lhs, rhs=rhs, verdict=judge(lhs, rhs))


def estimate_abs_intermediate(
    model: CryptoNonlocalModel,
    state: MaxEntangledState,
    a: CoefficientVector,
    n_tau: int,
    n_mu: int,
    seed: int,
    *,
    analytic: bool | None = None,
    workers: int = 1,
) -> EstimateResult:
    """E_tau |f(a, tau)|, with Bob measuring the transpose partner of ``a``."""
    setting_a, setting_b = _alice_bob_settings(state, a, a)
    if _resolve_mode(model, analytic):

        def sampler(rng, k):
            return np.abs(model.intermediate_f(setting_a, model.sample_tau(rng, k)))

        return estimate(sampler, n_tau, seed, workers)[0]
    return _nested(model, [(setting_a, setting_b, "a")], lambda m: abs(m[0]), n_tau, n_mu, seed)


def verify_theorem(
    model: CryptoNonlocalModel,
    state: MaxEntangledState,
    a: CoefficientVector,
    n: int,
    n_tau: int = DEFAULT_N_TAU,
    n_mu: int = DEFAULT_N_MU,
    seed: int = 0,
    *,
    axis=(1.0, 0.0, 0.0),
    analytic: bool | None = None,
    workers: int = 1,
) -> TheoremReport:
    """Run every step of the partition and the final bound on E_tau |f(a, tau)|.

    Step ``j`` uses child seed ``j`` of ``seed``; the final estimate uses child ``n``.
    """
    a = a.on(Side.ALICE)
    _require_omega(state, a)
    basis = state.basis(Side.ALICE)
    points = partition(make_curve(a, basis, axis), basis, n)
    thetas = partition_angles(n)
    steps = tuple(
        verify_step(
            model, state, points[j], points[j + 1], n, n_tau, n_mu, derive_seed(seed, j),
            j=j, theta=float(thetas[j]), analytic=analytic, workers=workers,
        )
        for j in range(n)
    )
    final_lhs = estimate_abs_intermediate(
        model, state, a, n_tau, n_mu, derive_seed(seed, n), analytic=analytic, workers=workers
    )
    final_rhs = final_bound(n, a.norm_sq, state.dim)
    return TheoremReport(
        n=n,
        dim=state.dim,
        norm_a_sq=a.norm_sq,
        step_reports=steps,
        final_lhs=final_lhs,
        final_rhs=final_rhs,
        verdict=judge(final_lhs, final_rhs),
    )


@dataclass(frozen=True)
class SkewReport:
    residual_fg: EstimateResult
    residual_antisym: EstimateResult

    @property
    def passed(self) -> bool:
        return all(r.mean <= SIGMA_RULE * r.stderr for r in (self.residual_fg, self.residual_antisym))


def skew_symmetry_check(
    model: CryptoNonlocalModel,
    state: MaxEntangledState,
    a: CoefficientVector,
    n_tau: int = DEFAULT_N_TAU,
    n_mu: int = DEFAULT_N_MU,
    seed: int = 0,
    *,
    analytic: bool | None = None,
    workers: int = 1,
) -> SkewReport:
    """Estimate E_tau |f(a) - g(a)| and E_tau |f(-a) + f(a)|.

    Both vanish for models that reproduce the perfect (anti)correlations of
    the maximally entangled state.
    """
    a = a.on(Side.ALICE)
    avg = a.trace / state.dim
    if abs(avg) > ZERO_AVERAGE_TOL:
        raise PreconditionError(f"<A(a)> = {avg:.3e}; the skew-symmetry argument needs a zero average")
    seed = check_seed(seed)
    if a.norm == 0.0:
        zero = EstimateResult(0.0, 0.0, n_tau, seed)
        return SkewReport(zero, zero)
    plus_a, plus_b = _alice_bob_settings(state, a, a)
    minus_a, minus_b = _alice_bob_settings(state, -a, -a)
    if _resolve_mode(model, analytic):

        def sampler(rng, k):
            tau = model.sample_tau(rng, k)
            f_plus = model.intermediate_f(plus_a, tau)
            return np.column_stack([
                np.abs(f_plus - model.intermediate_g(plus_b, tau)),
                np.abs(model.intermediate_f(minus_a, tau) + f_plus),
            ])

        fg, anti = estimate(sampler, n_tau, seed, workers)
        return SkewReport(fg, anti)
    fg = _nested(model, [(plus_a, plus_b, "a-b")], lambda m: abs(m[0]), n_tau, n_mu, derive_seed(seed, 0))
    anti = _nested(
        model,
        [(plus_a, plus_b, "a"), (minus_a, minus_b, "a")],
        lambda m: abs(m[0] + m[1]),
        n_tau,
        n_mu,
        derive_seed(seed, 1),
    )
    return SkewReport(fg, anti)


def reduce_to_omega(
    a: CoefficientVector, basis: OperatorBasis, context: Context | None = None
) -> tuple[float, list[tuple[float, CoefficientVector]]]:
    """alpha0 and the (alpha_j, a_j) of the commuting {1, 0, -1} components of A(a)."""
    dec = cartan_decompose(devectorize(a, basis), context)
    return dec.alpha0, [(alpha, vectorize(comp, basis)) for alpha, comp in dec.terms]


def identity_coefficients(dim: int, side=Side.ALICE) -> CoefficientVector:
    v = np.zeros(dim * dim)
    v[:dim] = 1.0
    return CoefficientVector(v, side)


def operator_of(a: CoefficientVector, state: MaxEntangledState) -> HermitianOperator:
    return devectorize(a, state.basis(a.side))

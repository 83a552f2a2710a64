"""Command-line front end.

Exit codes: 0 success, 1 verification verdict differs from what the model
should give, 2 usage or parse error, 3 input-validation error.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import ensembles
from .curve import make_curve, partition, partition_angles, verify_partition_spacing
from .decomposition import cartan_decompose, has_omega_spectrum, verify_decomposition
from .errors import DimensionError, NotHermitianError
from .hvmodels import MODEL_REGISTRY, make_model
from .matrixfile import MatrixFileError, dumps_matrix, fmt, matrix_to_obj, read_matrix, to_json
from .montecarlo import MAX_SEED, derive_seed
from .operators import HermitianOperator, Side, devectorize, hs_inner, transpose_partner, vectorize
from .states import (
    SchmidtBasis,
    dense_expectation,
    joint_average,
    make_state,
    pearson,
    reduced_density,
    square_average,
)
from .theorem import TheoremReport, verify_theorem

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_INVALID = 0, 1, 2, 3

# E_tau |f(a, tau)| for the Leggett-style model with a unit Bloch vector
LEGGETT_ABS_F = 0.5
DEFAULT_SCAN = (1, 2, 4, 8, 16, 32, 64)


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    dim: int
    n: tuple[int, ...]
    seed: int
    n_tau: int
    n_mu: int
    model: str
    input: Path | None
    output: Path | None
    format: str
    workers: int
    nested: bool = False


def _seed(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed {text!r}") from None
    if not 0 <= value <= MAX_SEED:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return value


def _n_list(text: str) -> tuple[int, ...]:
    try:
        values = tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid partition count list {text!r}") from None
    if not values or any(v < 1 for v in values):
        raise argparse.ArgumentTypeError("partition counts must be positive integers")
    return values


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid count {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--dim", type=int, default=2, help="local dimension N (>= 2)")
    common.add_argument("--n", type=_n_list, default=None, help="partition count, or comma list for scans")
    common.add_argument("--seed", type=_seed, default=0, help="64-bit unsigned master seed")
    common.add_argument("--samples-tau", type=_positive, default=10_000, dest="n_tau")
    common.add_argument("--samples-mu", type=_positive, default=1_000, dest="n_mu")
    common.add_argument("--model", default="qm-faithful")
    common.add_argument("--input", type=Path, default=None, help="matrix file")
    common.add_argument("--output", type=Path, default=None, help="write the report here instead of stdout")
    common.add_argument("--format", choices=("human", "csv", "json"), default=None)
    common.add_argument("--workers", type=_positive, default=None, help="parallel workers (default: CPU count)")

    parser = argparse.ArgumentParser(prog="cryptononlocal", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("identities", parents=[common], help="check the closed-form identities on random instances")
    sub.add_parser("decompose", parents=[common], help="split a Hermitian matrix into commuting components")
    sub.add_parser("curve", parents=[common], help="partition of the half-circle from a to -a")
    p = sub.add_parser("theorem", parents=[common], help="verify the bound chain against a model")
    p.add_argument("--nested", action="store_true", help="estimate intermediate averages by nested Monte Carlo")
    sub.add_parser("leggett-scan", parents=[common], help="final bound versus n for the Leggett-style model")
    return parser


def parse_config(argv=None) -> RunConfig:
    args = build_parser().parse_args(argv)
    defaults = {"identities": "human", "decompose": "json", "curve": "csv", "theorem": "csv", "leggett-scan": "csv"}
    return RunConfig(
        command=args.command,
        dim=args.dim,
        n=args.n or (),
        seed=args.seed,
        n_tau=args.n_tau,
        n_mu=args.n_mu,
        model=args.model,
        input=args.input,
        output=args.output,
        format=args.format or defaults[args.command],
        workers=args.workers or os.cpu_count() or 1,
        nested=getattr(args, "nested", False),
    )


def _validate(cfg: RunConfig) -> None:
    if cfg.dim < 2:
        raise UsageError(f"--dim must be >= 2, got {cfg.dim}")
    if cfg.input is not None and not cfg.input.is_file():
        raise UsageError(f"input file not found: {cfg.input}")
    if cfg.output is not None and not cfg.output.parent.exists():
        raise UsageError(f"output directory does not exist: {cfg.output.parent}")
    if cfg.model not in MODEL_REGISTRY:
        raise UsageError(f"unknown model {cfg.model!r}; choose from {', '.join(sorted(MODEL_REGISTRY))}")


def _load_operator(cfg: RunConfig) -> HermitianOperator:
    try:
        matrix = read_matrix(cfg.input)
    except MatrixFileError as exc:
        raise UsageError(str(exc)) from None
    try:
        return HermitianOperator(matrix)
    except NotHermitianError as exc:
        raise InputError(str(exc)) from None
    except DimensionError as exc:
        raise InputError(str(exc)) from None


def _csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(x) if isinstance(x, float) else x for x in row])
    return buf.getvalue()


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.output is None:
        sys.stdout.write(text)
    else:
        cfg.output.write_text(text, encoding="utf-8")


def _setting_operator(cfg: RunConfig, dim: int) -> HermitianOperator:
    """Observable from --input (must be {1, 0, -1}) or a seeded random one."""
    if cfg.input is not None:
        op = _load_operator(cfg)
        if op.dim != dim:
            raise InputError(f"input matrix has dim {op.dim}, expected {dim}")
        if not has_omega_spectrum(op):
            raise InputError("input matrix does not have spectrum {1, 0, -1}")
        return op
    return ensembles.random_omega(np.random.default_rng(derive_seed(cfg.seed, 0)), dim)


# identities -----------------------------------------------------------------


def _identity_checks(dim: int, seed: int, count: int = 100) -> list[tuple[str, float, float]]:
    rng = np.random.default_rng(seed)
    schmidt = ensembles.random_schmidt(rng, dim)
    state = make_state(schmidt)
    fa, fb = state.basis(Side.ALICE), state.basis(Side.BOB)
    checks = []

    gram = max(
        abs(hs_inner(b[k], b[l]) - (k == l)) for b in (fa, fb) for k in range(len(b)) for l in range(len(b))
    )
    checks.append(("basis orthonormality", gram, 1e-10))
    checks.append(("reduced density = I/N", max(
        float(np.max(np.abs(reduced_density(state, s) - np.eye(dim) / dim))) for s in (Side.ALICE, Side.BOB)
    ), 1e-10))

    rt = parseval = partner = 0.0
    for _ in range(count):
        op = ensembles.random_hermitian(rng, dim)
        a = vectorize(op, fa)
        rt = max(rt, float(np.max(np.abs(devectorize(a, fa).matrix - op.matrix))))
        parseval = max(parseval, abs(a.norm_sq - hs_inner(op, op)))
        lhs = np.kron(op.matrix, np.eye(dim)) @ state.vector
        rhs = np.kron(np.eye(dim), transpose_partner(op, schmidt).matrix) @ state.vector
        partner = max(partner, float(np.linalg.norm(lhs - rhs)))
    checks += [
        ("vectorize round trip", rt, 1e-10),
        ("Parseval |a|^2 = Tr(A^2)", parseval, 1e-10),
        ("transpose partner (O x I)psi = (I x O^T)psi", partner, 1e-12),
    ]

    joint = square = corr = 0.0
    for _ in range(2 * count):
        a = vectorize(ensembles.random_hermitian(rng, dim), fa)
        b = vectorize(ensembles.random_hermitian(rng, dim), fb)
        op_a, op_b = devectorize(a, fa), devectorize(b, fb)
        joint = max(joint, abs(joint_average(state, a, b) - dense_expectation(state, op_a, op_b)))
        square = max(square, abs(square_average(state, a) - dense_expectation(state, HermitianOperator(
            op_a.matrix @ op_a.matrix, symmetrize=True))))
        # traceless parts for the correlation coefficient
        ta = HermitianOperator(op_a.matrix - op_a.trace / dim * np.eye(dim), symmetrize=True)
        tb = HermitianOperator(op_b.matrix - op_b.trace / dim * np.eye(dim), symmetrize=True)
        va, vb = vectorize(ta, fa), vectorize(tb, fb)
        sq_a = dense_expectation(state, HermitianOperator(ta.matrix @ ta.matrix, symmetrize=True))
        sq_b = dense_expectation(state, None, HermitianOperator(tb.matrix @ tb.matrix, symmetrize=True))
        dense_r = dense_expectation(state, ta, tb) / math.sqrt(sq_a * sq_b)
        corr = max(corr, abs(pearson(state, va, vb) - dense_r))
    checks += [
        ("joint average <AB> = a.b/N", joint, 1e-10),
        ("square average <A^2> = |a|^2/N", square, 1e-10),
        ("Pearson r = cos(a, b)", corr, 1e-10),
    ]

    recon = 0.0
    for _ in range(count):
        op = ensembles.random_hermitian(rng, dim)
        recon = max(recon, verify_decomposition(cartan_decompose(op), op).reconstruct_residual)
    checks.append(("decomposition reconstruction", recon, 1e-10))
    return checks


def cmd_identities(cfg: RunConfig) -> int:
    checks = _identity_checks(cfg.dim, cfg.seed)
    ok = all(res < tol for _, res, tol in checks)
    if cfg.format == "csv":
        text = _csv(["check", "max_residual", "tolerance", "ok"],
                    [(name, res, tol, str(res < tol).lower()) for name, res, tol in checks])
    elif cfg.format == "json":
        text = to_json({
            "dim": cfg.dim, "seed": cfg.seed, "ok": ok,
            "checks": [{"check": n, "max_residual": r, "tolerance": t, "ok": r < t} for n, r, t in checks],
        }) + "\n"
    else:
        lines = [f"identities N={cfg.dim} seed={cfg.seed}"]
        lines += [f"  {'ok  ' if r < t else 'FAIL'} {name:<45} {fmt(r)} (tol {t:.0e})" for name, r, t in checks]
        lines.append("all checks passed" if ok else "some checks FAILED")
        text = "\n".join(lines) + "\n"
    _emit(cfg, text)
    return EXIT_OK if ok else EXIT_MISMATCH


# decompose ------------------------------------------------------------------


def cmd_decompose(cfg: RunConfig) -> int:
    if cfg.input is None:
        raise UsageError("decompose needs --input")
    op = _load_operator(cfg)
    dec = cartan_decompose(op)
    report = verify_decomposition(dec, op)
    if not report.ok:
        print(f"decomposition failed verification: {report}", file=sys.stderr)
        return EXIT_MISMATCH
    if cfg.format == "human":
        lines = [f"alpha0 {fmt(dec.alpha0)}"]
        for j, (alpha, comp) in enumerate(dec.terms, start=1):
            lines.append(f"term {j} alpha {fmt(alpha)}")
            lines.append(dumps_matrix(comp.matrix).rstrip("\n"))
        lines.append(f"reconstruct_residual {fmt(report.reconstruct_residual)}")
        text = "\n".join(lines) + "\n"
    else:
        text = to_json({
            "dim": op.dim,
            "alpha0": dec.alpha0,
            "terms": [{"alpha": alpha, "component": matrix_to_obj(comp.matrix)} for alpha, comp in dec.terms],
            "context": matrix_to_obj(dec.context.eigenbasis),
            "reconstruct_residual": report.reconstruct_residual,
        }) + "\n"
    _emit(cfg, text)
    return EXIT_OK


# curve ----------------------------------------------------------------------


def cmd_curve(cfg: RunConfig) -> int:
    if len(cfg.n) > 1:
        raise UsageError("curve takes a single --n")
    n = cfg.n[0] if cfg.n else 8
    state = make_state(SchmidtBasis.standard(cfg.dim))
    basis = state.basis(Side.ALICE)
    a = vectorize(_setting_operator(cfg, cfg.dim), basis)
    points = partition(make_curve(a, basis), basis, n)
    thetas = partition_angles(n)
    spacing = verify_partition_spacing(points)
    k = cfg.dim * cfg.dim
    if cfg.format == "json":
        text = to_json({
            "dim": cfg.dim, "n": n, "uniform_ok": spacing.uniform_ok, "max_deviation": spacing.max_deviation,
            "points": [{"j": j, "theta": float(t), "a": p.values} for j, (t, p) in enumerate(zip(thetas, points))],
        }) + "\n"
    else:
        header = ["j", "theta"] + [f"a{k_}" for k_ in range(k)]
        rows = [[j, float(t), *map(float, p.values)] for j, (t, p) in enumerate(zip(thetas, points))]
        if cfg.format == "csv":
            text = _csv(header, rows)
        else:
            text = "\n".join(" ".join(x if isinstance(x, str) else (fmt(x) if isinstance(x, float) else str(x))
                                      for x in row) for row in [header] + rows) + "\n"
    _emit(cfg, text)
    return EXIT_OK if spacing.uniform_ok else EXIT_MISMATCH


# theorem --------------------------------------------------------------------


def _theorem_rows(report: TheoremReport):
    for s in report.step_reports:
        yield [s.j, s.theta, s.lhs_estimate.mean, s.lhs_estimate.stderr, s.rhs, s.verdict.value]
    yield ["final", math.pi, report.final_lhs.mean, report.final_lhs.stderr, report.final_rhs,
           "violated" if report.violated else report.verdict.value]


def _expected_violation(model: str, report: TheoremReport) -> bool:
    if model == "leggett":
        return report.final_rhs < LEGGETT_ABS_F
    return False


def _run_theorem(cfg: RunConfig, n: int):
    state = make_state(SchmidtBasis.standard(cfg.dim))
    model = make_model(cfg.model, state)
    a = vectorize(_setting_operator(cfg, cfg.dim), state.basis(Side.ALICE))
    return verify_theorem(
        model, state, a, n, cfg.n_tau, cfg.n_mu, derive_seed(cfg.seed, 1),
        analytic=False if cfg.nested else None, workers=cfg.workers,
    )


def cmd_theorem(cfg: RunConfig) -> int:
    if cfg.model == "leggett" and cfg.dim != 2:
        raise UsageError("the leggett model needs --dim 2")
    if len(cfg.n) > 1:
        raise UsageError("theorem takes a single --n")
    n = cfg.n[0] if cfg.n else 32
    report = _run_theorem(cfg, n)
    header = ["j", "theta", "lhs_mean", "lhs_stderr", "rhs", "verdict"]
    if cfg.format == "csv":
        text = _csv(header, _theorem_rows(report))
    elif cfg.format == "json":
        text = to_json({
            "model": cfg.model, "dim": cfg.dim, "n": n, "seed": cfg.seed, "workers": cfg.workers,
            "steps": [dict(zip(header, row)) for row in _theorem_rows(report)][:-1],
            "final": {"lhs_mean": report.final_lhs.mean, "lhs_stderr": report.final_lhs.stderr,
                      "rhs": report.final_rhs, "violated": report.violated},
        }) + "\n"
    else:
        lines = [f"theorem model={cfg.model} N={cfg.dim} n={n} seed={cfg.seed}"]
        for s in report.step_reports:
            lines.append(f"  step j={s.j} theta={fmt(s.theta)} lhs={fmt(s.lhs_estimate.mean)} "
                         f"+- {fmt(s.lhs_estimate.stderr)} rhs={fmt(s.rhs)} {s.verdict.value}")
        lines.append(f"final lhs={fmt(report.final_lhs.mean)} +- {fmt(report.final_lhs.stderr)} "
                     f"rhs={fmt(report.final_rhs)} violated={str(report.violated).lower()}")
        text = "\n".join(lines) + "\n"
    _emit(cfg, text)
    return EXIT_OK if report.violated == _expected_violation(cfg.model, report) else EXIT_MISMATCH


# leggett-scan ---------------------------------------------------------------


def cmd_leggett_scan(cfg: RunConfig) -> int:
    if cfg.dim != 2:
        raise UsageError("leggett-scan needs --dim 2")
    cfg.model = "leggett"
    ns = cfg.n or DEFAULT_SCAN
    reports = [_run_theorem(cfg, n) for n in ns]
    violating = [r.n for r in reports if r.violated]
    minimal = min(violating) if violating else None
    summary = f"minimal violating n: {minimal}" if minimal else "no violation found in the scanned n"
    if cfg.format == "csv":
        text = _csv(["n", "lhs_mean", "lhs_stderr", "rhs"],
                    [[r.n, r.final_lhs.mean, r.final_lhs.stderr, r.final_rhs] for r in reports])
        print(summary, file=sys.stderr)
    elif cfg.format == "json":
        text = to_json({
            "seed": cfg.seed, "minimal_violating_n": minimal,
            "rows": [{"n": r.n, "lhs_mean": r.final_lhs.mean, "lhs_stderr": r.final_lhs.stderr,
                      "rhs": r.final_rhs, "violated": r.violated} for r in reports],
        }) + "\n"
    else:
        lines = [f"{'n':>5} {'lhs_mean':>24} {'lhs_stderr':>24} {'rhs':>24}  verdict"]
        for r in reports:
            lines.append(f"{r.n:>5} {fmt(r.final_lhs.mean):>24} {fmt(r.final_lhs.stderr):>24} "
                         f"{fmt(r.final_rhs):>24}  {'violated' if r.violated else 'not violated'}")
        lines.append(summary)
        text = "\n".join(lines) + "\n"
    _emit(cfg, text)
    expected = all(r.violated == _expected_violation("leggett", r) for r in reports)
    return EXIT_OK if expected else EXIT_MISMATCH


COMMANDS = {
    "identities": cmd_identities,
    "decompose": cmd_decompose,
    "curve": cmd_curve,
    "theorem": cmd_theorem,
    "leggett-scan": cmd_leggett_scan,
}


def main(argv=None) -> int:
    try:
        cfg = parse_config(argv)
    except SystemExit as exc:  # argparse usage errors exit with 2 already
        return int(exc.code or 0)
    try:
        _validate(cfg)
        return COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InputError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())

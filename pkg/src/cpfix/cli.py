"""Command-line front end.

Exit codes: 0 = verdict true / no violation, 1 = verdict false or a
failed precondition, 2 = usage or input-format error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import io
from .matcore import DomainError, HermiticityError, ToleranceConfig
from .algebra import BlockAlgebra, commutant_basis
from .channel import (
    DimensionMismatchError,
    choi_psd_check,
    fixed_space_basis,
    normalization_report,
    superoperator_matrix,
)
from .jensen import EpsFunction, jensen_residual
from .verify import (
    PreconditionError,
    TrialConfig,
    corollary_verify,
    hypothesis_explorer,
    spectral_peel,
    theorem_verify,
)

__all__ = ["main", "run"]


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=1e-9, help="equality tolerance (default 1e-9)")
    common.add_argument("--psd-tol", type=float, default=1e-8, help="positivity tolerance (default 1e-8)")
    common.add_argument("--seed", type=int, default=None, help="RNG seed (falls back to $CPFIX_SEED, then 0)")
    common.add_argument("--json", action="store_true", help="emit a machine-readable JSON report")

    parser = argparse.ArgumentParser(
        prog="cpfix",
        description="Fixed points of completely positive unital maps: checks and pipelines.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="normalization flags and CP certificate")
    p.add_argument("channel")

    p = sub.add_parser("fix", parents=[common], help="Hermitian basis of the fixed-point space")
    p.add_argument("channel")

    p = sub.add_parser("commutant", parents=[common], help="basis of the family's commutant")
    p.add_argument("channel")

    p = sub.add_parser("verify", parents=[common], help="run the full fixed-point pipeline")
    p.add_argument("channel")
    p.add_argument("operator")
    p.add_argument("--algebra", default=None, help="block algebra JSON (default: full algebra)")
    p.add_argument("--powers", type=int, default=8)

    p = sub.add_parser("corollary", parents=[common], help="fixed point with finite square")
    p.add_argument("channel")
    p.add_argument("operator")
    p.add_argument("--algebra", default=None)
    p.add_argument("--powers", type=int, default=8)

    p = sub.add_parser("peel", parents=[common], help="eigenprojection peeling pipeline")
    p.add_argument("channel")
    p.add_argument("operator")

    p = sub.add_parser("jensen", parents=[common], help="Jensen operator inequality residual")
    p.add_argument("channel")
    p.add_argument("operator")
    p.add_argument("--eps", type=float, required=True)

    p = sub.add_parser("explore", parents=[common], help="hypothesis-necessity exploration")
    p.add_argument("--mode", choices=("unital-only", "subunital-only"), required=True)
    p.add_argument("--dim", type=int, default=3)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--terms", type=int, default=3)

    return parser


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("CPFIX_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise io.SchemaError(f"CPFIX_SEED is not an integer: {env!r}") from exc
    return 0


def _emit(args, obj: dict, human_lines: list[str]):
    if args.json:
        sys.stdout.write(io.canonical_dumps(obj))
    else:
        for line in human_lines:
            print(line)


def _cmd_check(args, cfg) -> int:
    kf = io.read_channel(args.channel)
    rep = normalization_report(kf, cfg)
    choi = choi_psd_check(superoperator_matrix(kf), cfg)
    verdict = (
        rep.is_unital and rep.is_subunital_dual and rep.rigidity_holds and choi.is_cp
    )
    obj = {
        "verdict": verdict,
        "flags": rep.flags(),
        "choiMinEig": choi.min_eig,
    }
    lines = [f"{k}: {v}" for k, v in rep.flags().items()]
    lines.append(f"choi min eigenvalue: {choi.min_eig:.3e} (CP: {choi.is_cp})")
    lines.append(f"verdict: {verdict}")
    _emit(args, obj, lines)
    return 0 if verdict else 1


def _cmd_fix(args, cfg) -> int:
    kf = io.read_channel(args.channel)
    fs = fixed_space_basis(kf, cfg)
    obj = {
        "dimension": fs.dimension,
        "unital": fs.unital,
        "rankWarning": fs.rank_warning,
        "basis": [io.matrix_to_obj(b) for b in fs.herm_basis],
    }
    lines = [f"fixed-space dimension: {fs.dimension}"]
    if not fs.unital:
        lines.append("warning: family is not unital")
    if fs.rank_warning:
        lines.append("warning: rank decision is numerically ambiguous")
    _emit(args, obj, lines)
    return 0


def _cmd_commutant(args, cfg) -> int:
    kf = io.read_channel(args.channel)
    basis = commutant_basis(kf.operators, cfg)
    obj = {
        "dimension": basis.dimension,
        "rankWarning": basis.rank_warning,
        "basis": [io.matrix_to_obj(b) for b in basis.elements],
    }
    lines = [f"commutant dimension: {basis.dimension}"]
    if basis.rank_warning:
        lines.append("warning: rank decision is numerically ambiguous")
    _emit(args, obj, lines)
    return 0


def _load_algebra(args, dim: int) -> BlockAlgebra:
    if args.algebra is None:
        return BlockAlgebra.full(dim)
    alg = io.read_algebra(args.algebra)
    if alg.dim != dim:
        raise io.SchemaError(
            f"algebra dimension {alg.dim} does not match channel dimension {dim}"
        )
    return alg


def _report_lines(report) -> list[str]:
    d = report.to_dict()
    lines = [f"verdict: {d['verdict']}"]
    for k, v in d["hypotheses"].items():
        lines.append(f"hypothesis {k}: {v}")
    res = d["residuals"]
    if res["fixedness"] is not None:
        lines.append(f"trace gap: {res['traceGap']:.3e}")
        lines.append(f"fixedness residual: {res['fixedness']:.3e}")
        lines.append(f"max power residual: {max(res['powers']):.3e}")
        lines.append(f"max projection residual: {max(res['projections']):.3e}")
        lines.append(f"max commutator residual: {max(res['commutators']):.3e}")
    for msg in d["failures"]:
        lines.append(f"failure: {msg}")
    return lines


def _cmd_verify(args, cfg) -> int:
    kf = io.read_channel(args.channel)
    a = io.read_matrix(args.operator)
    alg = _load_algebra(args, kf.dim)
    report = theorem_verify(kf, alg, a, cfg, powers=args.powers)
    _emit(args, report.to_dict(), _report_lines(report))
    return 0 if report.verdict else 1


def _cmd_corollary(args, cfg) -> int:
    kf = io.read_channel(args.channel)
    a = io.read_matrix(args.operator)
    alg = _load_algebra(args, kf.dim)
    report = corollary_verify(kf, alg, a, cfg, powers=args.powers)
    _emit(args, report.to_dict(), _report_lines(report))
    return 0 if report.verdict else 1


def _cmd_peel(args, cfg) -> int:
    kf = io.read_channel(args.channel)
    a = io.read_matrix(args.operator)
    trace = spectral_peel(kf, a, cfg)
    d = trace.to_dict()
    lines = [f"verdict: {d['verdict']}"]
    for k, step in enumerate(d["steps"]):
        lines.append(
            f"step {k}: eigenvalue {step['eigenvalue']:.6g}, "
            f"commutator {step['commutatorResidual']:.3e}, "
            f"fixedness {step['fixednessResidual']:.3e}"
        )
    lines.append(f"reconstruction residual: {d['reconstructionResidual']:.3e}")
    for msg in d["failures"]:
        lines.append(f"failure: {msg}")
    _emit(args, d, lines)
    return 0 if trace.verdict else 1


def _cmd_jensen(args, cfg) -> int:
    kf = io.read_channel(args.channel)
    a = io.read_matrix(args.operator)
    res = jensen_residual(kf, EpsFunction(args.eps), a, cfg)
    obj = {
        "verdict": res.verdict,
        "minEig": res.min_eig,
        "lhsNorm": res.lhs_norm,
        "rhsNorm": res.rhs_norm,
        "eps": args.eps,
    }
    lines = [
        f"min eigenvalue of (Phi(f(a)) - f(Phi(a))): {res.min_eig:.3e}",
        f"verdict: {res.verdict}",
    ]
    _emit(args, obj, lines)
    return 0 if res.verdict else 1


def _cmd_explore(args, cfg) -> int:
    trial_cfg = TrialConfig(
        dim=args.dim,
        trials=args.trials,
        seed=_resolve_seed(args),
        mode=args.mode,
        n_terms=args.terms,
    )
    report = hypothesis_explorer(trial_cfg, cfg)
    d = report.to_dict()
    lines = [
        f"mode: {report.mode}, dim {report.dim}, trials {report.trials}, seed {report.seed}",
        f"violations: {len(report.violations)}",
        f"max commutator residual: {report.max_commutator_residual:.3e}",
    ]
    _emit(args, d, lines)
    return 0 if report.clean else 1


_COMMANDS = {
    "check": _cmd_check,
    "fix": _cmd_fix,
    "commutant": _cmd_commutant,
    "verify": _cmd_verify,
    "corollary": _cmd_corollary,
    "peel": _cmd_peel,
    "jensen": _cmd_jensen,
    "explore": _cmd_explore,
}


def run(argv: list[str]) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = ToleranceConfig(eq_tol=args.tol, psd_tol=args.psd_tol)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        return _COMMANDS[args.command](args, cfg)
    except json.JSONDecodeError as exc:
        print(
            f"error: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}",
            file=sys.stderr,
        )
        return 2
    except (io.SchemaError, DimensionMismatchError, DomainError, HermiticityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (PreconditionError, ValueError) as exc:
        print(f"precondition failure: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()

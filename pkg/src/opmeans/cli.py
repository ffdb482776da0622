"""Command-line front end. Every successful command prints one JSON document.

Exit codes: 0 success (or PASS), 1 FAIL / counterexample found, 2 bad input,
3 domain error, 4 INCONCLUSIVE.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import __version__
from .catalog import catalog, resolve_function
from .errors import OpMeansError
from .harness import (
    TEMPLATES,
    CONDITIONS,
    Status,
    TrialConfig,
    check_condition,
    decompose_closed_form,
    decompose_mean_pair,
    decomposition_residuals,
    falsify,
    lemma22_witness,
    lemma24_witness,
    prop41_chain,
)
from .hermitian import ToleranceConfig, opnorm, scale_of
from .matrix_io import is_identity_shorthand, matrix_to_json, parse_hermitian
from .means import parse_mean, psd_extend

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_DOMAIN, EXIT_INCONCLUSIVE = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


def _parsed(fn, *args, what="input"):
    try:
        return fn(*args)
    except (ValueError, KeyError, TypeError, OSError) as exc:
        raise UsageError(f"cannot parse {what}: {exc}") from exc


def _pair(text_a: str, text_b: str, names=("A", "B")):
    """Parse two operands; an identity shorthand takes its size from the other one."""
    if is_identity_shorthand(text_a) and not is_identity_shorthand(text_b):
        b = _parsed(parse_hermitian, text_b, what=names[1])
        return _parsed(parse_hermitian, text_a, b.shape[0], what=names[0]), b
    a = _parsed(parse_hermitian, text_a, what=names[0])
    return a, _parsed(parse_hermitian, text_b, a.shape[0], what=names[1])


def _seed(value):
    if value is not None:
        return value
    env = os.environ.get("OPMEANS_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError as exc:
        raise UsageError(f"OPMEANS_SEED must be an integer, got {env!r}") from exc


def _dims(text: str):
    try:
        dims = tuple(int(d) for d in text.split(",") if d.strip())
    except ValueError as exc:
        raise UsageError(f"bad --dims {text!r}") from exc
    if not dims:
        raise UsageError("--dims is empty")
    return dims


def _trial_config(args) -> TrialConfig:
    kw = dict(seed=_seed(args.seed), dims=_dims(args.dims), trials_per_dim=args.trials,
              workers=args.workers)
    if args.tol is not None:
        kw["tol"] = _parsed(ToleranceConfig, args.tol, what="--tol")
    if args.mean is not None:
        _parsed(parse_mean, args.mean, what="--mean")
        kw["mean"] = args.mean
    if getattr(args, "repr", None) is not None:
        kw["representation"] = _parsed(json.loads, args.repr, what="--repr")
    return _parsed(lambda: TrialConfig(**kw), what="trial options")


def cmd_mean(args):
    ident = args.mean
    if args.lam is not None:
        if ":" in ident:
            raise UsageError("--lambda cannot be combined with a weighted mean id")
        ident = f"{ident}:{args.lam}"
    sigma = _parsed(parse_mean, ident, what="--mean")
    a, b = _pair(args.a, args.b)
    if args.psd:
        ext = psd_extend(sigma, a, b)
        return {"mean": sigma.name, "value": matrix_to_json(ext.value),
                "convergence_gap": ext.gap, "gaps": list(ext.gaps)}, EXIT_OK
    return {"mean": sigma.name, "value": matrix_to_json(sigma(a, b))}, EXIT_OK


def cmd_check(args):
    if args.cond not in CONDITIONS:
        raise UsageError(f"unknown condition {args.cond!r}")
    f = _parsed(resolve_function, args.fn, what="--fn")
    cfg = _trial_config(args)
    try:
        report = check_condition(args.cond, f, cfg)
    except KeyError as exc:
        raise UsageError(str(exc)) from exc
    code = {Status.PASS: EXIT_OK, Status.FAIL: EXIT_FAIL,
            Status.INCONCLUSIVE: EXIT_INCONCLUSIVE}[report.status]
    return report.to_json(), code


def cmd_falsify(args):
    if args.template not in TEMPLATES:
        raise UsageError(f"unknown template {args.template!r}")
    f = None if args.fn is None else _parsed(resolve_function, args.fn, what="--fn")
    cfg = _trial_config(args)
    try:
        result = falsify(args.template, f, cfg)
    except (KeyError, ValueError) as exc:
        if isinstance(exc, OpMeansError):
            raise
        raise UsageError(str(exc)) from exc
    return result.to_json(), EXIT_FAIL if result.found else EXIT_OK


def cmd_witness(args):
    try:
        if args.family == "lemma22":
            if args.theta is None:
                raise UsageError("lemma22 needs --theta")
            w = lemma22_witness(args.theta, 1e-4 if args.eps is None else args.eps, args.mean or "harm")
        else:
            if args.eps is None:
                raise UsageError("lemma24 needs --eps")
            w = lemma24_witness(args.eps)
    except (OpMeansError, KeyError) as exc:
        raise UsageError(str(exc)) from exc
    return w.to_json(), EXIT_OK


def cmd_catalog(args):
    return {"functions": [f.to_json() for f in catalog()]}, EXIT_OK


def cmd_decompose(args):
    sigma = _parsed(parse_mean, args.mean, what="--mean")
    x, y = _pair(args.x, args.y, ("X", "Y"))
    out = {"mean": sigma.name}
    if args.method in ("phi", "both"):
        a, b = decompose_mean_pair(sigma, x, y)
        out.update(A=matrix_to_json(a), B=matrix_to_json(b), **decomposition_residuals(sigma, x, y, a, b))
    if args.method in ("closed", "both"):
        a2, b2 = decompose_closed_form(sigma, x, y)
        res = decomposition_residuals(sigma, x, y, a2, b2)
        if args.method == "closed":
            out.update(A=matrix_to_json(a2), B=matrix_to_json(b2), **res)
        else:
            out["closed_form"] = {"A": matrix_to_json(a2), "B": matrix_to_json(b2), **res}
            out["path_agreement"] = max(opnorm(a - a2), opnorm(b - b2)) / scale_of(x)
    return out, EXIT_OK


def cmd_chain(args):
    sigma = _parsed(parse_mean, args.mean, what="--mean")
    f = None if args.fn is None else _parsed(resolve_function, args.fn, what="--fn")
    x, y = _pair(args.x, args.y, ("X", "Y"))
    report = prop41_chain(sigma, f, x, y, args.gamma, args.k)
    return report.to_json(), EXIT_OK


def _add_trial_flags(p):
    p.add_argument("--trials", type=int, default=50, help="random trials per dimension")
    p.add_argument("--dims", default="2,3,4,6", help="comma-separated dimensions")
    p.add_argument("--seed", type=int, default=None, help="defaults to $OPMEANS_SEED, then 0")
    p.add_argument("--tol", type=float, default=None, help="Löwner-order tolerance")
    p.add_argument("--mean", default=None, help="mean for the single-mean conditions")
    p.add_argument("--workers", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="opmeans", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", default=None, help="write the JSON document here instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mean", parents=[common], help="compute A σ B")
    p.add_argument("--mean", required=True)
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--lambda", dest="lam", type=float, default=None)
    p.add_argument("--psd", action="store_true", help="allow singular inputs via the ε-limit")
    p.set_defaults(run=cmd_mean)

    p = sub.add_parser("check", parents=[common], help="run one condition against one function")
    p.add_argument("--cond", required=True)
    p.add_argument("--fn", required=True)
    p.add_argument("--repr", default=None, help="representation JSON for a13/b9")
    _add_trial_flags(p)
    p.set_defaults(run=cmd_check)

    p = sub.add_parser("falsify", parents=[common], help="search for a counterexample")
    p.add_argument("--template", required=True)
    p.add_argument("--fn", default=None)
    p.add_argument("--repr", default=None)
    _add_trial_flags(p)
    p.set_defaults(run=cmd_falsify)

    p = sub.add_parser("witness", parents=[common], help="emit an explicit 2x2 witness")
    p.add_argument("--family", required=True, choices=("lemma22", "lemma24"))
    p.add_argument("--theta", type=float, default=None)
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--mean", default=None)
    p.set_defaults(run=cmd_witness)

    p = sub.add_parser("catalog", parents=[common], help="list the built-in test functions")
    p.set_defaults(run=cmd_catalog)

    p = sub.add_parser("decompose", parents=[common], help="solve A ∇ B = X, A σ B = Y")
    p.add_argument("--mean", required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--method", choices=("phi", "closed", "both"), default="phi")
    p.set_defaults(run=cmd_decompose)

    p = sub.add_parser("chain", parents=[common], help="walk X_k = γ^k X + (1 - γ^k) Y")
    p.add_argument("--mean", default="geom")
    p.add_argument("--fn", default=None)
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--k", type=int, default=10)
    p.set_defaults(run=cmd_chain)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        payload, code = args.run(args)
    except UsageError as exc:
        print(f"opmeans: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OpMeansError as exc:
        print(f"opmeans: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    text = json.dumps({"version": __version__, **payload}, sort_keys=True, indent=2) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())

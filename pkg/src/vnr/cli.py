"""Command-line front end.

Batch semantics: parse inputs, run one computation, write a deterministic
JSON report (and optional CSV curves), exit.  Exit codes: 0 success, 1 input
validation failure, 2 property-suite failure (a counterexample was found),
3 internal invariant breach.  ``--threads`` is accepted for orchestration
compatibility; evaluation is single-threaded and results never depend on it.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from typing import Sequence

import numpy as np

from . import io
from .cones import PhiSpec, tol_for_resolution, verify_thA
from .distributions import ScenarioSpace
from .families import TestFamily, build_family
from .harness import axiom_check, make_family_r, make_pnl_var_r
from .model_risk import alpha_k, cont_spread
from .risk import (
    CertaintyTransform,
    LambdaFn,
    certainty_equivalent,
    default_ramp_grid,
    lambda_var,
    propvolle_lower_bound,
    var,
)
from .vr import VnRContext, h_function, pi, r_measure

log = logging.getLogger("vnr")

_BUILTIN_FAMILIES = {
    "call": "call",
    "identity-shift": "identity_shift",
    "identity_shift": "identity_shift",
    "exp-concave": "exp_concave",
    "exp_concave": "exp_concave",
    "approx-identity": "approx_identity",
    "approx_identity": "approx_identity",
    "insured-put": "insured_put",
    "insured_put": "insured_put",
}

_AXIOM_TARGETS = {
    "call-family": ("call", ["1Mon", "2Mon", "3Mon", "QCo", "CLI", "CA"]),
    "exp-concave-family": ("exp_concave", ["1Mon", "2Mon", "3Mon", "QCo", "CLI", "QCoX"]),
    "approx-identity-family": ("approx_identity", ["1Mon", "2Mon", "3Mon", "QCo", "CLI"]),
    "insured-put-family": ("insured_put", ["1Mon", "2Mon", "3Mon", "QCo", "CLI"]),
    "identity-shift-family": ("identity_shift", ["1Mon", "2Mon", "3Mon", "QCo", "CLI"]),
    "var-control": (None, ["QCoX"]),
}


def _setup_logging() -> None:
    level = os.environ.get("VNR_LOG", "off").lower()
    if level == "off":
        logging.disable(logging.CRITICAL)
        return
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if level == "debug" else logging.INFO,
        format="vnr %(levelname)s %(message)s",
    )


def _resolve_family(spec: str) -> TestFamily:
    if spec in _BUILTIN_FAMILIES:
        return build_family(_BUILTIN_FAMILIES[spec])
    return io.load_family(spec)


def _emit(report: dict, out: str | None) -> None:
    text = io.dumps_report(report)
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    sys.stdout.write(text)


def _parse_grid(spec: str) -> tuple[float, float, int]:
    try:
        lo, hi, n = spec.split(":")
        lo, hi, n = float(lo), float(hi), int(n)
    except ValueError:
        raise io.InputError(f"grid must be lo:hi:count, got {spec!r}") from None
    if not (hi > lo and n >= 2):
        raise io.InputError(f"grid must be increasing with count >= 2, got {spec!r}")
    return lo, hi, n


# -- subcommands -----------------------------------------------------------------


def _cmd_risk(args: argparse.Namespace) -> int:
    d = io.load_distribution(args.dist)
    if args.measure == "var":
        if args.risk_level is None:
            raise io.InputError("var needs --risk-level")
        value = var(d, args.risk_level)
    elif args.measure == "lambda-var":
        if args.lambda_fn is None:
            raise io.InputError("lambda-var needs --lambda-fn")
        value = lambda_var(d, io.load_lambda_fn(args.lambda_fn))
    elif args.measure == "entropic":
        value = certainty_equivalent(d, CertaintyTransform.entropic())
    elif args.measure == "worst-case":
        value = lambda_var(d, LambdaFn.constant(0.0))
    else:  # pragma: no cover - argparse restricts choices
        raise io.InputError(f"unknown risk measure {args.measure!r}")
    _emit({"value": io.encode_value(value)}, args.out)
    return 0


def _make_ctx(args: argparse.Namespace) -> VnRContext:
    family = _resolve_family(args.family)
    scenario = io.load_scenario(args.scenario)
    try:
        return VnRContext(
            family, scenario, args.variable, args.measure, tolerance=args.tolerance
        )
    except (ValueError, KeyError) as exc:
        raise io.InputError(str(exc)) from None


def _cmd_vr(args: argparse.Namespace) -> int:
    ctx = _make_ctx(args)
    value = r_measure(ctx, args.price)
    _emit({"value": io.encode_value(value)}, args.out)
    return 0


def _cmd_price_curve(args: argparse.Namespace) -> int:
    ctx = _make_ctx(args)
    lo, hi, n = _parse_grid(args.grid)
    grid = np.linspace(lo, hi, n)
    fns = {"pi": (("r", "pi"), lambda t: pi(ctx, t)),
           "r": (("p", "r_measure"), lambda t: r_measure(ctx, t)),
           "h": (("p", "h"), lambda t: h_function(ctx, t))}
    header, fn = fns[args.kind]
    rows = [(float(t), fn(float(t))) for t in grid]
    if args.out is None:
        raise io.InputError("price-curve needs --out")
    io.write_curve(args.out, header, rows)
    sys.stdout.write(f"wrote {len(rows)} rows to {args.out}\n")
    return 0


def _cmd_axioms(args: argparse.Namespace) -> int:
    kind, default_suite = _AXIOM_TARGETS[args.target]
    suite = args.suite.split(",") if args.suite else default_suite
    if kind is None:
        impl = make_pnl_var_r(args.risk_level if args.risk_level is not None else 0.25)
    else:
        impl = make_family_r(build_family(kind), tolerance=args.tolerance)
    report = axiom_check(impl, suite, n_cases=args.cases, seed=args.seed)
    payload = report.as_dict()
    payload["target"] = args.target
    payload["seed"] = args.seed
    _emit(payload, args.out)
    return 2 if report.total_failures > 0 else 0


def _cmd_duality(args: argparse.Namespace) -> int:
    cone = io.load_cone(args.cone)
    if args.phi == "min":
        phi = PhiSpec("min")
    else:
        if not args.phi_weights:
            raise io.InputError("linear phi needs --phi-weights")
        weights = tuple(float(w) for w in args.phi_weights.split(","))
        if len(weights) != cone.dim:
            raise io.InputError("weight count must match the state count")
        phi = PhiSpec("linear", weights=weights)
    rng = np.random.default_rng(args.seed)
    y_grid = [rng.uniform(-3.0, 3.0, cone.dim) for _ in range(args.cases)]
    report = verify_thA(cone, phi, y_grid, resolution=args.resolution)
    payload = report.as_dict()
    payload["tolerance"] = tol_for_resolution(args.resolution)
    payload["seed"] = args.seed
    _emit(payload, args.out)
    if report.skipped:
        return 1
    failed = report.weak_violations > 0 or not (
        report.max_gap <= tol_for_resolution(args.resolution)
    )
    return 2 if failed else 0


def _cmd_model_risk(args: argparse.Namespace) -> int:
    ms = io.load_model_set(args.model_set)
    payload: dict = {
        "cont_spread": io.encode_value(cont_spread(ms, args.variable, lambda x: x))
    }
    if args.claims:
        if not args.measure:
            raise io.InputError("alpha_k needs --measure naming the target model")
        claims = io.load_claims(args.claims)
        payload["alpha_k"] = io.encode_value(
            alpha_k(ms, args.measure, args.variable, claims)
        )
        payload["measure"] = args.measure
    _emit(payload, args.out)
    return 0


def _cmd_propvolle(args: argparse.Namespace) -> int:
    d = io.load_distribution(args.dist)
    lam = io.load_lambda_fn(args.lambda_fn)
    grid = default_ramp_grid(d, args.grid, width=args.width)
    bound = propvolle_lower_bound(d, lam, grid)
    primal = lambda_var(d, lam)
    gap = primal - bound if math.isfinite(primal) and math.isfinite(bound) else math.inf
    _emit(
        {
            "lower_bound": io.encode_value(bound),
            "lambda_var": io.encode_value(primal),
            "gap": io.encode_value(gap),
            "ramp_count": args.grid,
        },
        args.out,
    )
    return 0


# -- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vnr",
        description="Value&Risk measures over finite scenario spaces",
    )
    parser.add_argument("--threads", type=int, default=1,
                        help="accepted for compatibility; never changes results")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("risk", help="risk measure of a distribution")
    p.add_argument("--measure", required=True,
                   choices=["var", "lambda-var", "entropic", "worst-case"])
    p.add_argument("--dist", required=True)
    p.add_argument("--risk-level", "--lambda", dest="risk_level", type=float)
    p.add_argument("--lambda-fn")
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_risk)

    p = sub.add_parser("vr", help="intrinsic risk of a priced position")
    _add_ctx_args(p)
    p.add_argument("--price", type=float, required=True)
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_vr)

    p = sub.add_parser("price-curve", help="export pi / r / h curves as CSV")
    _add_ctx_args(p)
    p.add_argument("--kind", choices=["pi", "r", "h"], default="pi")
    p.add_argument("--grid", required=True, help="lo:hi:count")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_price_curve)

    p = sub.add_parser("axioms", help="randomized axiom suite")
    p.add_argument("--target", required=True, choices=sorted(_AXIOM_TARGETS))
    p.add_argument("--suite", help="comma-separated axiom tags overriding the default")
    p.add_argument("--cases", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--risk-level", "--lambda", dest="risk_level", type=float)
    p.add_argument("--tolerance", type=float, default=1e-9)
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_axioms)

    p = sub.add_parser("duality", help="cone duality verification")
    p.add_argument("--cone", required=True)
    p.add_argument("--phi", choices=["min", "linear"], default="min")
    p.add_argument("--phi-weights")
    p.add_argument("--resolution", type=int, default=1)
    p.add_argument("--cases", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_duality)

    p = sub.add_parser("model-risk", help="model-risk spread and indirect model risk")
    p.add_argument("--model-set", required=True)
    p.add_argument("--variable", required=True)
    p.add_argument("--measure")
    p.add_argument("--claims")
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_model_risk)

    p = sub.add_parser("propvolle", help="dual lower bound for the Lambda-V@R")
    p.add_argument("--dist", required=True)
    p.add_argument("--lambda-fn", required=True)
    p.add_argument("--grid", type=int, default=200)
    p.add_argument("--width", type=float)
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_propvolle)

    return parser


def _add_ctx_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--family", required=True,
                   help="built-in family name or path to a family JSON file")
    p.add_argument("--scenario", required=True)
    p.add_argument("--measure", required=True)
    p.add_argument("--variable", required=True)
    p.add_argument("--tolerance", type=float, default=1e-9)


def main(argv: Sequence[str] | None = None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except io.InputError as exc:
        sys.stderr.write(f"vnr: input error: {exc}\n")
        return 1
    except (ValueError, KeyError) as exc:
        sys.stderr.write(f"vnr: input error: {exc}\n")
        return 1
    except Exception as exc:  # internal invariant breach
        log.exception("internal error")
        sys.stderr.write(f"vnr: internal error: {exc}\n")
        return 3


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front door.

Subcommands: normalize, embed, region, estimate, and verify <suite>.
Reports are deterministic for a fixed seed (see reports module); the
seed comes from --seed, else the OPSLAB_SEED environment variable, else
a config file given with --config (key=value lines), else 0.

Exit codes: 0 all passed, 1 verification failure, 2 invalid input,
3 budget refusal.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from fractions import Fraction

import numpy as np

from opslab import errors
from opslab.calculus import (
    Level,
    banach_class,
    derive_embedding,
    normalize,
    parse_expr,
    pretty,
)
from opslab.martingale.filtration import sign_average_check
from opslab.martingale.opnorm import (
    estimate_kp,
    estimate_operator_norm,
    verify_constant_bounds,
)
from opslab.martingale.umd import umd_growth_experiment
from opslab.numlab.estimates import random_complex_matrix, rng_for
from opslab.numlab.factorize import verify_pair_identity
from opslab.numlab.interpolation import interp_upper_lower
from opslab.numlab.schatten import schatten_norm_value
from opslab.regions import (
    ParamPoint,
    build_region,
    contains,
    hull_membership_certificate,
    membership,
)
from opslab.reports import Report, RunConfig

SUITES = ("pair-identity", "averaging", "constants", "interp", "riesz",
          "umd-growth", "region")

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INVALID = 2
EXIT_BUDGET = 3


def _parse_rational(text: str, numerical: bool = False):
    """Rational or 'inf'; floats only on numerical paths, with a warning."""
    text = text.strip()
    if text.lower() in ("inf", "infinity"):
        return "inf"
    try:
        return Fraction(text)
    except ValueError:
        pass
    if numerical:
        try:
            value = float(text)
        except ValueError as exc:
            raise errors.InvalidParameter(f"cannot parse exponent {text!r}") from exc
        print(f"warning: {text!r} is not rational; using float {value}", file=sys.stderr)
        return value
    raise errors.InvalidParameter(
        f"{text!r} is not a rational; the symbolic layer rejects floats"
    )


def _read_config(path: str) -> dict:
    values = {}
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise errors.InvalidParameter(
                    f"{path}:{line_no}: expected key=value, got {line!r}"
                )
            key, value = (part.strip() for part in line.split("=", 1))
            values[key.replace("-", "_")] = value
    return values


def _resolve_seed(args, config: dict) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("OPSLAB_SEED")
    if env is not None:
        return int(env)
    if "seed" in config:
        return int(config["seed"])
    return 0


def _emit_report(report: Report, out_path: str | None):
    for line in report.summary_lines():
        print(line)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as handle:
            handle.write(report.full_text() + "\n")
        print(f"report written to {out_path}")


# --- suites -------------------------------------------------------------------


def _suite_pair_identity(args, seed) -> Report:
    grid = [("inf", "inf"), (1, "inf"), ("inf", 1), (2, 2),
            (4, Fraction(4, 3)), (3, 5)]
    config = RunConfig("verify pair-identity",
                       {"sizes": args.sizes, "samples": args.samples,
                        "restarts": args.restarts, "tol": args.tol,
                        "grid": [f"({u},{v})" for u, v in grid]},
                       seed, args.out)
    report = Report(config)
    citation = ("C_u (x)h C_v is isometric to the Schatten class of index "
                "2/(1 - 1/v + 1/u); the optimizer upper bound must meet the "
                "exact factorization oracle")
    for record in verify_pair_identity(grid, samples=args.samples, size=args.sizes,
                                       seed=seed, restarts=args.restarts,
                                       tol=args.tol):
        record["citation"] = citation
        report.add_record(record)
    return report.finish()


def _suite_averaging(args, seed) -> Report:
    config = RunConfig("verify averaging",
                       {"n": args.n, "samples": args.samples, "tol": args.tol},
                       seed, args.out)
    report = Report(config)
    citation = ("averaging D_eps T_eps(x) over independent signs recovers "
                "the lower-triangular projection of x")
    for sample in range(args.samples):
        rng = rng_for(seed, sample)
        x = random_complex_matrix(rng, args.n, args.n)
        deviation, exact = sign_average_check(x)
        report.add(f"n={args.n},sample={sample}", passed=deviation < args.tol,
                   tolerance=args.tol, citation=citation,
                   deviation=deviation, exact_enumeration=exact)
    return report.finish()


def _suite_constants(args, seed) -> Report:
    ps = [_parse_rational(p, numerical=True) for p in args.p.split(",")]
    sizes = [int(n) for n in args.sizes.split(",")]
    config = RunConfig("verify constants",
                       {"p": args.p, "sizes": args.sizes, "delta": args.delta,
                        "restarts": args.restarts},
                       seed, args.out)
    report = Report(config)
    citation = ("(K_p - 1)/2 <= ||T|| <= K_p, K_p <= 2||T|| + 1, and the "
                "refinement ||T|| <= (K_p + 1)/2, for the canonical matrix "
                "filtration at scalar fiber")
    for p in ps:
        for size in sizes:
            outcome = verify_constant_bounds(float(p), size, delta=args.delta,
                                             seed=seed, restarts=args.restarts)
            for name, ok in outcome.checks.items():
                report.add(f"p={p},N={size}: {name}", passed=ok,
                           tolerance=args.delta, citation=citation,
                           triangular=outcome.triangular.value,
                           kp=outcome.kp.value,
                           caveat=outcome.caveat)
    return report.finish()


def _suite_interp(args, seed) -> Report:
    thetas = [Fraction(t) for t in args.thetas.split(",")]
    config = RunConfig("verify interp",
                       {"size": args.size, "samples": args.samples,
                        "thetas": [str(t) for t in thetas], "tol": args.tol},
                       seed, args.out)
    report = Report(config)
    citation = ("the interpolation space between the compacts and the trace "
                "class at parameter theta is isometrically the Schatten class "
                "of index 1/theta")
    for idx, theta in enumerate(thetas):
        for sample in range(args.samples):
            rng = rng_for(seed, idx, sample)
            x = random_complex_matrix(rng, args.size, args.size)
            upper, lower = interp_upper_lower(x, float(theta))
            reference = schatten_norm_value(x, 1.0 / float(theta))
            width = abs(upper.value - lower.value)
            brackets = lower.value - 1e-9 <= reference <= upper.value + 1e-9
            report.add(f"theta={theta},sample={sample}",
                       passed=bool(width <= args.tol and brackets),
                       tolerance=args.tol, citation=citation,
                       upper=upper.value, lower=lower.value,
                       reference=reference, width=width)
    return report.finish()


def _suite_riesz(args, seed) -> Report:
    ps = [_parse_rational(p, numerical=True) for p in args.p.split(",")]
    config = RunConfig("verify riesz",
                       {"p": args.p, "n": args.n, "degree": args.degree,
                        "restarts": args.restarts, "tol": args.tol},
                       seed, args.out)
    report = Report(config)
    citation = ("the Riesz projection deletes negative frequencies and is "
                "bounded on L_p of the circle for 1 < p < inf; at p = 2 it is "
                "an orthogonal projection of norm exactly 1")
    for p in ps:
        est = estimate_operator_norm("riesz", float(p), args.n, seed=seed,
                                     restarts=args.restarts, degree=args.degree)
        if float(p) == 2.0:
            ok = abs(est.value - 1.0) <= args.tol
        else:
            ok = est.value >= 1.0 - args.tol
        report.add(f"p={p},n={args.n},degree={args.degree}", passed=bool(ok),
                   tolerance=args.tol, citation=citation,
                   estimate=est.value, kind=est.kind)
    return report.finish()


def _suite_umd_growth(args, seed) -> Report:
    p = _parse_rational(args.p, numerical=True)
    q = _parse_rational(args.q, numerical=True)
    config = RunConfig("verify umd-growth",
                       {"p": args.p, "q": args.q, "width": args.width,
                        "pairs": args.pairs, "depth": args.depth,
                        "restarts": args.restarts, "tol": args.tol},
                       seed, args.out)
    report = Report(config)
    citation = ("the order-2 unconditionality constants of the alternating "
                "nestings l_p(l_q(...)) grow without bound when p differs "
                "from q; at desk scale the lower bounds must be nondecreasing "
                "and eventually exceed 1")
    estimates = umd_growth_experiment(float(p), float(q), args.width, args.pairs,
                                      args.depth, seed=seed,
                                      restarts=args.restarts)
    values = [e.value for e in estimates]
    for n, est in enumerate(estimates):
        checks = [values[n] >= (values[n - 1] if n else 1.0) - 1e-12]
        if n == 0:
            checks.append(abs(est.value - 1.0) <= args.tol)
        if n == args.pairs:
            checks.append(est.value > 1.0 + args.tol)
        report.add(f"nesting={n}", passed=all(checks), tolerance=args.tol,
                   citation=citation, value=est.value, pattern=est.pattern,
                   depth=est.depth)
    return report.finish()


def _suite_region(args, seed) -> Report:
    config = RunConfig("verify region", {"points": args.points}, seed, args.out)
    report = Report(config)
    citation = ("Schatten spaces have the order-q unconditionality property "
                "for reciprocal pairs inside the region L, the interior of "
                "the hull of (0,0), (1,1), (1/2,0), (1/2,1)")
    region = build_region("L")

    def oracle(pt: ParamPoint) -> bool:
        # independent half-plane description of L, written by hand
        return (pt.y > 0 and pt.y < 1 and pt.y > 2 * pt.x - 1 and pt.y < 2 * pt.x)

    rng = rng_for(seed, 0)
    disagreements = 0
    for _ in range(args.points):
        pt = ParamPoint(Fraction(int(rng.integers(0, 64)), 63),
                        Fraction(int(rng.integers(0, 64)), 63))
        if contains(region, pt) != oracle(pt):
            disagreements += 1
    report.add(f"random agreement x{args.points}", passed=disagreements == 0,
               tolerance=0, citation=citation, disagreements=disagreements)
    checks = [
        ("vertex (0,0) excluded", not contains(region, ParamPoint(0, 0))),
        ("(1/2,1/2) included", contains(region, ParamPoint(Fraction(1, 2), Fraction(1, 2)))),
        ("(1/4,1/2) boundary excluded",
         not contains(region, ParamPoint(Fraction(1, 4), Fraction(1, 2)))),
    ]
    for name, ok in checks:
        report.add(name, passed=ok, tolerance=0, citation=citation)
    return report.finish()


_SUITE_RUNNERS = {
    "pair-identity": _suite_pair_identity,
    "averaging": _suite_averaging,
    "constants": _suite_constants,
    "interp": _suite_interp,
    "riesz": _suite_riesz,
    "umd-growth": _suite_umd_growth,
    "region": _suite_region,
}


# --- commands -----------------------------------------------------------------


def _cmd_normalize(args, seed) -> int:
    level = {"ci": Level.COMPLETELY_ISOMETRIC, "iso": Level.ISOMETRIC,
             "isomorphic": Level.ISOMORPHIC}[args.level]
    expr = parse_expr(args.expression)
    canonical, trace = normalize(expr, level)
    print(f"input:     {pretty(expr)}")
    print(f"canonical: {pretty(canonical)}")
    print(f"banach:    {banach_class(canonical)}")
    print(trace.render())
    return EXIT_OK


def _cmd_embed(args, seed) -> int:
    p = _parse_rational(args.p)
    for derivation in derive_embedding(p):
        print(f"p = {derivation.p}: embeds into S_u[S_v] with "
              f"u = {derivation.u}, v = {derivation.v}   [{derivation.side} side]")
        print(f"  theta = {derivation.theta}, q = {derivation.q}, r = {derivation.r}")
        print(derivation.trace.render())
    return EXIT_OK


def _cmd_region(args, seed) -> int:
    region = build_region(args.set)
    p = _parse_rational(args.p)
    q = _parse_rational(args.q)
    point = ParamPoint.from_exponents(p, q)
    verdict = membership(region, point)
    print(f"point (1/p, 1/q) = {point} in region {args.set}: {verdict}")
    if verdict == "yes":
        cert = hull_membership_certificate(point, list(region.vertices))
        if cert:
            terms = " + ".join(f"{w} * {g}" for g, w in cert)
            print(f"certificate: {point} = {terms}")
    return EXIT_OK


def _cmd_estimate(args, seed) -> int:
    p = float(_parse_rational(args.p, numerical=True))
    if args.op == "kp":
        est = estimate_kp(p, args.n, mode=args.mode, seed=seed,
                          restarts=args.restarts)
    else:
        est = estimate_operator_norm(args.op, p, args.n, pattern=args.pattern,
                                     seed=seed, restarts=args.restarts,
                                     degree=args.degree)
    print(f"operator:  {args.op}")
    print(f"estimate:  {est.value:.12g}  ({est.kind} bound)")
    print(f"seed={est.seed} restarts={est.restarts} iterations={est.iterations}")
    return EXIT_OK


def _cmd_verify(args, seed) -> int:
    runner = _SUITE_RUNNERS[args.suite]
    report = runner(args, seed)
    _emit_report(report, args.out)
    return EXIT_OK if report.all_passed else EXIT_FAIL


# --- argument parsing -----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="opslab",
        description="symbolic operator-space calculus with numerical verification",
    )
    parser.add_argument("--seed", type=int, default=None,
                        help="master seed (fallback: OPSLAB_SEED, config file, 0)")
    parser.add_argument("--config", default=None, help="key=value config file")
    parser.add_argument("--out", default=None, help="write the report here")
    sub = parser.add_subparsers(dest="command", required=True)

    norm = sub.add_parser("normalize", help="canonicalize an expression")
    norm.add_argument("expression")
    norm.add_argument("--level", choices=("ci", "iso", "isomorphic"), default="ci")
    norm.set_defaults(func=_cmd_normalize)

    embed = sub.add_parser("embed", help="derive the Schatten-valued embedding")
    embed.add_argument("--p", required=True)
    embed.set_defaults(func=_cmd_embed)

    region = sub.add_parser("region", help="membership in a parameter region")
    region.add_argument("--set", choices=("S", "T", "L"), required=True)
    region.add_argument("--p", required=True)
    region.add_argument("--q", required=True)
    region.set_defaults(func=_cmd_region)

    est = sub.add_parser("estimate", help="operator-norm lower bounds")
    est.add_argument("--op", required=True,
                     choices=("triangular-upper", "triangular-lower", "schur",
                              "riesz", "kp"))
    est.add_argument("--p", required=True)
    est.add_argument("--n", type=int, required=True)
    est.add_argument("--pattern", default=None)
    est.add_argument("--degree", type=int, default=None)
    est.add_argument("--mode", choices=("enumerate", "sample"), default="enumerate")
    est.add_argument("--restarts", type=int, default=32)
    est.set_defaults(func=_cmd_estimate)

    verify = sub.add_parser("verify", help="run a verification suite")
    verify.add_argument("suite", choices=SUITES)
    verify.add_argument("--sizes", type=int, default=4)
    verify.add_argument("--samples", type=int, default=20)
    verify.add_argument("--restarts", type=int, default=32)
    verify.add_argument("--tol", type=float, default=None)
    verify.add_argument("--n", type=int, default=8)
    verify.add_argument("--p", default="4/3,4")
    verify.add_argument("--q", default="3/2")
    verify.add_argument("--delta", type=float, default=0.05)
    verify.add_argument("--size", type=int, default=5)
    verify.add_argument("--thetas", default="1/4,1/3,1/2,2/3")
    verify.add_argument("--degree", type=int, default=4)
    verify.add_argument("--width", type=int, default=2)
    verify.add_argument("--pairs", type=int, default=3)
    verify.add_argument("--depth", type=int, default=6)
    verify.add_argument("--points", type=int, default=1000)
    verify.set_defaults(func=_cmd_verify)
    return parser


_SUITE_TOL_DEFAULTS = {
    "pair-identity": 0.005,
    "averaging": 1e-12,
    "interp": 1e-8,
    "riesz": 1e-3,
    "umd-growth": 1e-3,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _read_config(args.config) if args.config else {}
        seed = _resolve_seed(args, config)
        if getattr(args, "tol", None) is None and getattr(args, "suite", None):
            args.tol = float(config.get("tol", _SUITE_TOL_DEFAULTS.get(args.suite, 1e-9)))
        if getattr(args, "suite", None) == "constants":
            args.p = config.get("p", args.p)
        return args.func(args, seed)
    except errors.ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (errors.InvalidParameter, errors.NotApplicable, errors.OutOfRange) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (errors.BudgetExceeded, errors.InfeasibleBudget) as exc:
        print(f"budget refusal: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())

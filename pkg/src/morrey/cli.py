"""Command-line interface.

Exit codes: 0 success (divergent norms included), 2 invalid parameters,
3 a verification check failed, 4 a resource guard tripped.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import __version__
from .constructions import (
    Theorem13Spec,
    ball_indicator,
    bounding_profile_g,
    power_function,
    probe_family,
    section4_function,
    staircase_beta,
    theorem13_function,
)
from .experiments import COUNTEREXAMPLES, RunConfig, jsonable, maximal_probe_rows, run_acceptance
from .geometry import QuadratureError
from .norms import SpaceParams, centered_norm, exact_norm_1d, growth_exponent_fit, offcenter_audit, weak_norm
from .radial import RadialProfile, ResourceGuardError

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_FAILED = 3
EXIT_GUARD = 4

CONSTRUCTS = ("power", "g", "thm13", "sec4", "probe", "ball")
DEFAULT_PROBE_N = [2 ** i for i in range(4, 13)]


class InvalidParameters(ValueError):
    pass


def _require(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        flags = ", ".join("--" + n.replace("_", "-") for n in missing)
        raise InvalidParameters(f"--construct {args.construct} needs {flags}")


def build_profile(args) -> RadialProfile:
    if args.profile is not None:
        text = sys.stdin.read() if args.profile == "-" else Path(args.profile).read_text()
        try:
            return RadialProfile.from_json(text)
        except (KeyError, TypeError, json.JSONDecodeError) as exc:
            raise InvalidParameters(f"unreadable profile JSON: {exc}") from exc
    c = args.construct
    if c is None:
        raise InvalidParameters("give --construct or --profile")
    if c == "power":
        _require(args, "q")
        return power_function(args.d, args.q)
    if c == "g":
        _require(args, "p1", "p2", "q")
        return bounding_profile_g(args.d, staircase_beta(args.d, args.p1, args.p2, args.q))
    if c == "thm13":
        _require(args, "p1", "p2", "q", "K")
        return theorem13_function(Theorem13Spec(args.d, args.p1, args.p2, args.q, args.K))
    if c == "sec4":
        _require(args, "epsilon", "K")
        q = args.q1 if args.q1 is not None else args.q
        if q is None:
            raise InvalidParameters("--construct sec4 needs --q or --q1")
        p = args.p1 if args.p1 is not None else (args.p or 1.0)
        return section4_function(args.d, q, args.epsilon, args.K, p=p)
    if c == "probe":
        _require(args, "N")
        if args.d != 1:
            raise InvalidParameters("the probe family lives in d = 1")
        return probe_family(args.N)
    if c == "ball":
        return ball_indicator(args.radius)
    raise InvalidParameters(f"unknown construct {c!r}")


def _emit(obj, fmt: str, out):
    if fmt == "json":
        out.write(json.dumps(jsonable(obj), indent=2, sort_keys=True) + "\n")
        return
    rows = obj if isinstance(obj, list) else [obj]
    flat = []
    for row in rows:
        flat.append({k: (json.dumps(jsonable(v)) if isinstance(v, (dict, list)) else v) for k, v in row.items()})
    cols = []
    for row in flat:
        cols += [k for k in row if k not in cols]
    w = csv.DictWriter(out, fieldnames=cols, lineterminator="\n")
    w.writeheader()
    for row in flat:
        w.writerow(jsonable(row))


# ---------------------------------------------------------------------------
# subcommands


def cmd_norm(args, out) -> int:
    if args.q is None:
        raise InvalidParameters("norm needs --q")
    p = args.p if args.p is not None else 1.0
    params = SpaceParams(args.d, p, args.q)
    f = build_profile(args)
    if args.exact:
        verdict = exact_norm_1d(params, f, rtol=args.tol or 1e-10)
    else:
        verdict = centered_norm(params, f, tol=args.tol or 1e-10)
    if args.audit and verdict.finite:
        n = args.samples or 32
        verdict.audit = offcenter_audit(params, f, n_centers=n, n_radii=n, seed=args.seed, centered=verdict).to_json_obj()
    result = {"params": {"d": args.d, "p": p, "q": args.q}, "norm": verdict.to_json_obj(), "version": __version__}
    if args.weak:
        result["weak"] = weak_norm(params, f, audit=args.audit, audit_seed=args.seed).to_json_obj()
    if args.r_lo is not None and args.r_hi is not None:
        fit = growth_exponent_fit(params, f, args.r_lo, args.r_hi, n_samples=args.samples or 128, model="offset")
        result["growth_fit"] = {"r_lo": args.r_lo, "r_hi": args.r_hi, "slope": fit.slope}
    if args.format == "csv":
        row = {"d": args.d, "p": p, "q": args.q, **result["norm"]}
        if "weak" in result:
            row.update({f"weak_{k}": v for k, v in result["weak"].items()})
        _emit(row, "csv", out)
    else:
        _emit(result, "json", out)
    return EXIT_OK


def cmd_construct(args, out) -> int:
    f = build_profile(args)
    out.write(f.to_json() + "\n")
    return EXIT_OK


def cmd_counterexample(args, out) -> int:
    fn = COUNTEREXAMPLES[args.example]
    kw = {"d": args.d}
    if args.example == "thm13":
        for k in ("p1", "p2", "q", "K", "r_lo", "r_hi"):
            if getattr(args, k) is not None:
                kw[k] = getattr(args, k)
        if args.tol is not None:
            kw["tol"] = args.tol
    elif args.example == "thm14":
        for k in ("p", "q"):
            if getattr(args, k) is not None:
                kw[k] = getattr(args, k)
        if "p" in kw and "q" not in kw:
            raise InvalidParameters("thm14 needs --q together with --p")
        kw["seed"] = args.seed
        SpaceParams(args.d, kw.get("p", 2.0), kw.get("q", 2.0))
    else:
        for k in ("p1", "q1", "p2", "q2", "epsilon", "r_lo", "r_hi"):
            if getattr(args, k) is not None:
                kw[k] = getattr(args, k)
        if args.K is not None:
            kw["Ks"] = [2 ** i for i in range(4, max(args.K.bit_length(), 5))]
        if args.tol is not None:
            kw["tol_ball"] = args.tol
    rep = fn(**kw)
    obj = rep.to_json_obj()
    if args.format == "csv":
        out.write(rep.checks_csv())
    else:
        _emit(obj, "json", out)
    return EXIT_OK if rep.passed else EXIT_FAILED


def cmd_maximal_probe(args, out) -> int:
    q = args.q if args.q is not None else 2.0
    if not q > 1:
        raise InvalidParameters("maximal-probe needs q > 1")
    Ns = [args.N] if args.N is not None else DEFAULT_PROBE_N
    rows = maximal_probe_rows(q, Ns)
    if args.format == "json":
        _emit(rows, "json", out)
    else:
        _emit(rows, "csv", out)
    return EXIT_OK


def cmd_report(args, out) -> int:
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    reports = run_acceptance(RunConfig(seed=args.seed, quick=args.quick))
    summary = {"version": __version__, "seed": args.seed, "quick": args.quick, "experiments": []}
    for i, rep in enumerate(reports, start=1):
        stem = f"{i:02d}_{rep.id}"
        (outdir / f"{stem}.csv").write_text(rep.checks_csv())
        if rep.series:
            (outdir / f"{stem}_series.csv").write_text(rep.series_csv())
        summary["experiments"].append(rep.to_json_obj())
        out.write(f"[{'PASS' if rep.passed else 'FAIL'}] {i}. {rep.title} ({rep.wall_time:.1f} s)\n")
    summary["passed"] = all(r.passed for r in reports)
    (outdir / "summary.json").write_text(json.dumps(jsonable(summary), indent=2, sort_keys=True) + "\n")
    return EXIT_OK if summary["passed"] else EXIT_FAILED


# ---------------------------------------------------------------------------
# parser


def _common(p: argparse.ArgumentParser):
    g = p.add_argument_group("parameters")
    g.add_argument("--d", type=int, default=1)
    for name in ("p", "q", "p1", "p2", "q1", "q2", "epsilon", "r-lo", "r-hi", "tol"):
        g.add_argument(f"--{name}", type=float, default=None)
    g.add_argument("--K", type=int, default=None)
    g.add_argument("--N", type=int, default=None)
    g.add_argument("--samples", type=int, default=None)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--format", choices=("json", "csv"), default="json")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="morrey", description="Morrey norms of radial functions")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("norm", help="centered Morrey norm of a profile")
    _common(p)
    p.add_argument("--construct", choices=CONSTRUCTS)
    p.add_argument("--profile", help="profile JSON file ('-' for stdin)")
    p.add_argument("--radius", type=float, default=1.0, help="radius for --construct ball")
    p.add_argument("--audit", action="store_true", help="add the off-center audit")
    p.add_argument("--weak", action="store_true", help="also compute the weak quasi-norm")
    p.add_argument("--exact", action="store_true", help="exact sup over all intervals (d = 1, step profiles)")
    p.set_defaults(func=cmd_norm)

    p = sub.add_parser("construct", help="emit a profile as JSON")
    _common(p)
    p.add_argument("--construct", choices=CONSTRUCTS, required=True)
    p.add_argument("--radius", type=float, default=1.0)
    p.set_defaults(func=cmd_construct, profile=None)

    p = sub.add_parser("counterexample", help="run one counterexample report")
    p.add_argument("example", choices=sorted(COUNTEREXAMPLES))
    _common(p)
    p.set_defaults(func=cmd_counterexample)

    p = sub.add_parser("maximal-probe", help="maximal-operator probe table (CSV)")
    _common(p)
    p.set_defaults(func=cmd_maximal_probe, format="csv")

    p = sub.add_parser("report", help="run the acceptance suite and write a report bundle")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--quick", action="store_true")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, out)
    except ResourceGuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (InvalidParameters, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except QuadratureError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())

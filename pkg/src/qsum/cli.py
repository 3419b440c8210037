"""Command-line front end.

Exit codes: 0 success or pass, 1 mathematical failure (pole, divergence,
residual or trend failure), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import mpmath

from . import identities as ids
from . import verifier
from .arith import DEFAULT_DIGITS, MIN_DIGITS, format_value, make_context, relative_error
from .errors import DomainError, PoleError, SchemaError
from .identities import IdentityCase
from .series import DEFAULT_MAX_TERMS, Status

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _default_digits() -> int:
    env = os.environ.get("QSUM_DIGITS")
    if env is None:
        return DEFAULT_DIGITS
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"QSUM_DIGITS must be an integer, got {env!r}") from None


def _context(digits):
    digits = _default_digits() if digits is None else digits
    if digits < MIN_DIGITS:
        raise UsageError(f"--digits must be at least {MIN_DIGITS}")
    return make_context(digits)


def _parse_assignments(items, what="--param") -> dict:
    out = {}
    for item in items or ():
        name, sep, value = item.partition("=")
        if not sep or not name or not value:
            raise UsageError(f"{what} expects name=value, got {item!r}")
        if name in out:
            raise UsageError(f"{what} {name} given twice")
        out[name] = value
    return out


def _emit(payload, as_json: bool, text: str):
    if as_json:
        print(json.dumps(payload, indent=2))
    else:
        print(text)


def cmd_list(args) -> int:
    rows = [{"id": i, "summary": ids.get(i).summary} for i in ids.IDENTITY_IDS]
    width = max(len(r["id"]) for r in rows)
    _emit(rows, args.json, "\n".join(f"{r['id']:<{width}}  {r['summary']}" for r in rows))
    return EXIT_OK


def cmd_describe(args) -> int:
    info = ids.describe(args.id)
    lines = [f"{info['id']}: {info['summary']}", f"  {info['formula']}", "  parameters:"]
    lines += [f"    {p['name']} ({p['kind']}){': ' + p['note'] if p['note'] else ''}"
              for p in info["parameters"]]
    lines += ["  constraints:"] + [f"    {c}" for c in info["constraints"]]
    lines.append(f"  convergence: {info['convergence'] or 'always (or terminating)'}")
    _emit(info, args.json, "\n".join(lines))
    return EXIT_OK


def _check_params_parse(identity_id, params):
    ident = ids.get(identity_id)
    names = set(ident.param_names)
    if set(params) != names:
        missing, extra = sorted(names - set(params)), sorted(set(params) - names)
        parts = ([f"missing {', '.join(missing)}"] if missing else []) + \
                ([f"unexpected {', '.join(extra)}"] if extra else [])
        raise UsageError(f"{identity_id}: " + "; ".join(parts))


def cmd_eval(args) -> int:
    ctx = _context(args.digits)
    params = _parse_assignments(args.param)
    _check_params_parse(args.id, params)
    case = IdentityCase(args.id, params)
    out = {"id": args.id, "digits": ctx.digits, "params": params, "side": args.side}
    lines = []
    try:
        with ctx.work():
            ids.validate(case, ctx)
            out["in_domain"] = ids.in_convergence_domain(case, ctx)
            lhs = rhs = None
            if args.side in ("lhs", "both"):
                lhs = ids.eval_lhs(case, ctx, args.max_terms)
                out.update(lhs=verifier._fmt_complex(lhs.value, ctx.digits),
                           status=str(lhs.status), terms=lhs.terms_used)
                lines.append(f"lhs = {format_value(lhs.value, ctx.digits)}")
                lines.append(f"     status {lhs.status}, {lhs.terms_used} terms")
            if args.side in ("rhs", "both"):
                rhs = ids.eval_rhs(case, ctx)
                out["rhs"] = verifier._fmt_complex(rhs, ctx.digits)
                lines.append(f"rhs = {format_value(rhs, ctx.digits)}")
            code = EXIT_OK
            if lhs is not None and lhs.status is not Status.CONVERGED:
                note = "" if out["in_domain"] else " (parameters outside the convergence region)"
                lines.append(f"series {lhs.status}{note}")
                code = EXIT_FAIL
            elif lhs is not None and rhs is not None:
                res = relative_error(lhs.value, rhs)
                out["residual"] = mpmath.nstr(res, 6, min_fixed=0, max_fixed=0)
                out["pass"] = bool(res <= ctx.cmp_tol)
                lines.append(f"residual = {out['residual']} (tolerance {mpmath.nstr(ctx.cmp_tol, 3)})")
                if not out["pass"]:
                    code = EXIT_FAIL
    except (PoleError, DomainError) as exc:
        out["error"] = str(exc)
        _emit(out, args.json, f"error: {exc}")
        return EXIT_FAIL
    _emit(out, args.json, "\n".join(lines))
    return code


def _summary(report) -> str:
    verdict = "PASS" if report.passed else "FAIL"
    res = verifier._fmt_real(report.max_residual) if report.max_residual is not None else "n/a"
    extra = " (empty grid: vacuous pass)" if report.empty and report.requested == 0 else ""
    if report.empty and report.requested:
        extra = " (no admissible points sampled)"
    return (f"{verdict} {report.id}: {len(report.cases)} cases, max residual {res}, "
            f"{len(report.failures)} failures, {len(report.flagged)} flagged, "
            f"{report.wall_time:.2f} s{extra}")


def cmd_verify(args) -> int:
    ctx = _context(args.digits)
    if args.count < 0:
        raise UsageError("--count must be >= 0")
    targets = ids.IDENTITY_IDS if args.id == "all" else (ids.get(args.id).id,)
    reports = [verifier.sweep(verifier.GridSpec(i, args.count, args.seed, args.profile), ctx,
                              args.workers) for i in targets]
    payload_src = reports if args.id == "all" else reports[0]
    if args.out:
        Path(args.out).write_text(verifier.reports_json(payload_src))
    if args.csv:
        Path(args.csv).write_text(verifier.reports_csv(reports))
    ok = all(r.passed for r in reports)
    if args.json:
        sys.stdout.write(verifier.reports_json(payload_src))
    else:
        for r in reports:
            print(_summary(r))
        if len(reports) > 1:
            print(f"{'PASS' if ok else 'FAIL'} all: {sum(r.passed for r in reports)}/{len(reports)} identities")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_limits(args) -> int:
    ctx = _context(args.digits)
    verifier.get_edge(args.edge)
    schedule = None
    if args.schedule:
        schedule = [v.strip() for v in args.schedule.split(",") if v.strip()]
        for v in schedule:
            try:
                mpmath.mpf(v)
            except (ValueError, TypeError):
                raise UsageError(f"bad schedule value {v!r}") from None
    fixed = _parse_assignments(args.fixed, "--fixed") or None
    if fixed is not None:
        base = dict(verifier.get_edge(args.edge).default_fixed)
        unknown = set(fixed) - set(base)
        if unknown:
            raise UsageError(f"--fixed: unknown parameter(s) {', '.join(sorted(unknown))}")
        base.update(fixed)
        fixed = base
    try:
        trend = verifier.limit_study(args.edge, ctx, schedule, fixed)
    except (PoleError, DomainError) as exc:
        print(f"error: {exc}")
        return EXIT_FAIL
    d = trend.to_dict()
    if args.json:
        print(json.dumps(d, indent=2))
    else:
        print(f"{trend.edge}: {verifier.get_edge(args.edge).description}")
        if trend.parameter:
            for v, g in zip(d["schedule"], d["gaps"]):
                print(f"  {trend.parameter} = {v:<10} gap = {g}")
        else:
            print(f"  substitution residual = {d['final_gap']}")
        print(f"{'PASS' if trend.passed else 'FAIL'}: "
              f"{'strictly decreasing' if trend.decreasing else 'not decreasing'}"
              + (f", final gap {d['final_gap']} (target <= {trend.target})" if trend.target == "1e-3" else ""))
    return EXIT_OK if trend.passed else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qsum", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("list", help="list registered identities")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_list)

    sp = sub.add_parser("describe", help="show an identity's parameter schema")
    sp.add_argument("id")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_describe)

    sp = sub.add_parser("eval", help="evaluate one or both sides of an identity")
    sp.add_argument("id")
    sp.add_argument("--param", "-p", nargs="+", action="extend", default=[], metavar="NAME=VALUE",
                    help="parameter value, e.g. a=0.2 or a=0.2+0.1i")
    sp.add_argument("--digits", type=int, default=None)
    sp.add_argument("--side", choices=("lhs", "rhs", "both"), default="both")
    sp.add_argument("--max-terms", type=int, default=DEFAULT_MAX_TERMS)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("verify", help="seeded residual sweep for an identity or 'all'")
    sp.add_argument("id")
    sp.add_argument("--count", type=int, default=25)
    sp.add_argument("--seed", type=int, default=1)
    sp.add_argument("--digits", type=int, default=None)
    sp.add_argument("--profile", choices=("real", "complex"), default="real")
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--out", help="write the JSON report here")
    sp.add_argument("--csv", help="write one CSV row per case here")
    sp.add_argument("--json", action="store_true", help="print the JSON report to stdout")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("limits", help="limit study along a registered edge")
    sp.add_argument("edge", help=", ".join(verifier.LIMIT_EDGES))
    sp.add_argument("--schedule", help="comma-separated parameter values")
    sp.add_argument("--fixed", nargs="+", action="extend", default=[], metavar="NAME=VALUE")
    sp.add_argument("--digits", type=int, default=None)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_limits)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (UsageError, SchemaError) as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

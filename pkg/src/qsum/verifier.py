"""Seeded parameter sweeps, limit studies and JSON/CSV reports."""

from __future__ import annotations

import csv
import io
import json
import logging
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import mpmath
from mpmath import mpf

from . import identities as ids
from .arith import PrecisionContext, make_context, relative_error, to_complex
from .errors import DomainError, PoleError, SchemaError
from .identities import IdentityCase
from .series import Status

log = logging.getLogger(__name__)

# Sampled points keep every pole factor at least this far from zero.
SAMPLE_POLE_DISTANCE = mpf("1e-3")
# Sampled points keep the limiting term ratio at or below this.
SAMPLE_MAX_RATIO = mpf("0.9")
RESAMPLE_FACTOR = 100


@dataclass(frozen=True)
class Range:
    """Sampling interval: ``lo..hi`` for the modulus, optional random sign and imaginary jitter."""
    lo: float
    hi: float
    signed: bool = False
    integer: bool = False
    im: float = 0.0


_Q = Range(0.05, 0.8)
_A = Range(0.1, 3.0, signed=True)
_ST = Range(0.5, 8.0, signed=True)

DEFAULT_RANGES = {
    "seed3105": {"a": _A, "w": Range(0.1, 3.0, signed=True), "q": _Q, "n": Range(0, 8, integer=True)},
    "intermediate2phizzz": {"a": _A, "w": Range(0.05, 3.0, signed=True),
                            "u": Range(0.05, 3.0, signed=True), "q": _Q},
    "thm1": {"a": _A, "s": _ST, "t": _ST, "q": _Q},
    "bilateralX": {"a": _A, "s": _ST, "t": _ST, "x": Range(0.1, 5.0, signed=True), "q": _Q},
    "thm2": {"a": _A, "b": Range(0.5, 5.0, signed=True), "s": _ST, "t": _ST, "q": _Q},
    "prop41": {"a": _A, "s": _ST, "t": _ST, "q": _Q},
    "cor42": {"a": _A, "s": Range(0.3, 5.0, signed=True), "q": _Q},
    "quintuple": {"x": Range(0.1, 3.0, signed=True), "q": _Q},
    "jacobi": {"a": Range(0.1, 5.0, signed=True), "q": _Q},
    "f43": {"a": Range(0.1, 3.0), "c": Range(-6, -1, integer=True), "d": Range(-3.0, 1.0)},
    "q4f3": {"a": Range(0.1, 3.0), "c": Range(-3.0, 0.5), "d": Range(-3.0, 0.5), "q": _Q},
    "phi65limit": {"a": _A, "c": Range(0.3, 5.0, signed=True), "d": Range(0.3, 5.0, signed=True),
                   "q": _Q},
}

# Parameters kept real in the complex profile.
_REAL_ONLY = {"f43": {"a", "c", "d"}, "q4f3": {"c"}, "seed3105": {"n"}}
COMPLEX_IM = 0.3
COMPLEX_Q_IM = 0.1


def _st_window(p):
    st = abs(p["s"] * p["t"])
    return mpf("1.2") <= st <= 20


# Extra acceptance rules applied while sampling, beyond the schema.
_SAMPLE_RULES = {
    "thm1": _st_window,
    "bilateralX": _st_window,
    "thm2": _st_window,
    "q4f3": lambda p: (p["c"] + p["d"]).real <= mpf("-0.2"),
}


def default_ranges(identity_id: str, profile: str = "real") -> dict:
    base = DEFAULT_RANGES[ids.get(identity_id).id]
    if profile == "real":
        return dict(base)
    if profile != "complex":
        raise ValueError(f"unknown sampling profile {profile!r}")
    keep = _REAL_ONLY.get(identity_id, set())
    out = {}
    for name, r in base.items():
        if name in keep or r.integer:
            out[name] = r
        else:
            out[name] = Range(r.lo, r.hi, r.signed, False, COMPLEX_Q_IM if name == "q" else COMPLEX_IM)
    return out


@dataclass(frozen=True)
class GridSpec:
    id: str
    count: int
    seed: int = 1
    profile: str = "real"
    ranges: dict | None = None

    def resolved_ranges(self) -> dict:
        return self.ranges if self.ranges is not None else default_ranges(self.id, self.profile)


@dataclass
class CaseRecord:
    index: int
    params: dict
    lhs: object = None
    rhs: object = None
    residual: object = None
    status: str = ""
    terms: int = 0
    in_domain: bool = True
    passed: bool = False
    counted: bool = True
    message: str = ""
    raw_residual: object = field(default=None, repr=False)


@dataclass
class VerificationReport:
    id: str
    digits: int
    seed: int
    profile: str
    cases: list = field(default_factory=list)
    max_residual: object = None
    passed: bool = True
    empty: bool = False
    requested: int = 0
    wall_time: float = 0.0

    @property
    def failures(self):
        return [c for c in self.cases if c.counted and not c.passed]

    @property
    def flagged(self):
        return [c for c in self.cases if not c.counted]

    def to_dict(self, timing: bool = False) -> dict:
        out = {
            "id": self.id,
            "digits": self.digits,
            "seed": self.seed,
            "profile": self.profile,
            "requested": self.requested,
            "empty": self.empty,
            "pass": self.passed,
            "max_residual": _fmt_real(self.max_residual),
            "flagged": len(self.flagged),
            "cases": [_case_dict(c) for c in self.cases],
        }
        if timing:
            out["wall_time"] = round(self.wall_time, 3)
        return out


def _fmt_real(x, digits=6):
    if x is None:
        return None
    return mpmath.nstr(mpf(x), digits, min_fixed=0, max_fixed=0)


def _fmt_complex(z, digits):
    if z is None:
        return None
    z = to_complex(z)
    return {"re": mpmath.nstr(z.real, digits), "im": mpmath.nstr(z.imag, digits)}


def _case_dict(c: CaseRecord) -> dict:
    return {
        "index": c.index,
        "params": c.params,
        "lhs": c.lhs,
        "rhs": c.rhs,
        "residual": c.residual,
        "status": c.status,
        "terms": c.terms,
        "in_domain": c.in_domain,
        "pass": c.passed,
        "counted": c.counted,
        "message": c.message,
    }


def _param_strings(params: dict) -> dict:
    out = {}
    for k, v in params.items():
        if isinstance(v, int):
            out[k] = v
        elif isinstance(v, str):
            out[k] = v
        else:
            z = to_complex(v)
            out[k] = mpmath.nstr(z.real, 20) if z.imag == 0 else mpmath.nstr(z, 20)
    return out


def verify_case(case: IdentityCase, ctx: PrecisionContext, index: int = 0) -> CaseRecord:
    """Evaluate both sides and their residual; never raises for mathematical failures."""
    rec = CaseRecord(index, _param_strings(case.params))
    try:
        ids.validate(case, ctx)
        rec.in_domain = ids.in_convergence_domain(case, ctx)
    except DomainError as exc:
        rec.status, rec.message = str(Status.POLE), str(exc)
        return rec
    except SchemaError as exc:
        rec.status, rec.message, rec.in_domain = "SchemaError", str(exc), False
        return rec
    try:
        with ctx.work():
            lhs = ids.eval_lhs(case, ctx)
            rec.lhs = _fmt_complex(lhs.value, ctx.digits)
            rec.terms = lhs.terms_used
            rec.status = str(lhs.status)
            rhs = ids.eval_rhs(case, ctx)
            rec.rhs = _fmt_complex(rhs, ctx.digits)
            res = relative_error(lhs.value, rhs)
            rec.residual = _fmt_real(res)
            rec.raw_residual = res
    except PoleError as exc:
        rec.status, rec.message = str(Status.POLE), str(exc)
        return rec
    if lhs.status is Status.CONVERGED:
        rec.passed = res <= ctx.cmp_tol
        if not rec.passed:
            rec.message = "residual exceeds tolerance"
    else:
        rec.message = f"series {lhs.status.value}"
        # divergence outside the convergence region is expected: flag, don't fail
        rec.counted = rec.in_domain
    return rec


def _point_ok(identity_id, params, ctx) -> bool:
    case = IdentityCase(identity_id, params)
    try:
        p = ids.validate(case, ctx)
    except SchemaError:
        return False
    ident = ids.get(identity_id)
    with ctx.work():
        for site in ident.poles(p):
            if ids._min_factor(site) < SAMPLE_POLE_DISTANCE:
                return False
        for _, v in ident.nonzero(p):
            if abs(v) < SAMPLE_POLE_DISTANCE:
                return False
        if identity_id == "f43":
            a, c, d = p["a"], p["c"], p["d"]
            for v in (a + 1, a - c + 1, a - d + 1, a - c - d + 1):
                r = mpmath.nint(v.real)
                if r <= 0 and abs(v - r) < SAMPLE_POLE_DISTANCE:
                    return False
        if ident.ratio is not None:
            r = ident.ratio(p)
            if r is not None and r > SAMPLE_MAX_RATIO:
                return False
        rule = _SAMPLE_RULES.get(identity_id)
        if rule is not None and not rule(p):
            return False
    return True


def _draw(rng: random.Random, r: Range):
    if r.integer:
        return rng.randint(int(r.lo), int(r.hi))
    x = rng.uniform(r.lo, r.hi)
    if r.signed and rng.random() < 0.5:
        x = -x
    text = f"{x:.6g}"
    if r.im:
        y = rng.uniform(-r.im, r.im)
        text += f"{y:+.6g}i"
    return text


def sample_points(grid: GridSpec, ctx: PrecisionContext):
    """Deterministic schema-respecting samples; returns (points, attempts)."""
    ranges = grid.resolved_ranges()
    ident = ids.get(grid.id)
    missing = set(ident.param_names) - set(ranges)
    if missing:
        raise SchemaError(f"no sampling range for {', '.join(sorted(missing))}")
    rng = random.Random(f"{grid.seed}:{grid.id}:{grid.profile}")
    points, attempts = [], 0
    limit = RESAMPLE_FACTOR * max(grid.count, 1)
    while len(points) < grid.count and attempts < limit:
        attempts += 1
        params = {name: _draw(rng, ranges[name]) for name in ident.param_names}
        if _point_ok(grid.id, params, ctx):
            points.append(params)
    if len(points) < grid.count:
        log.warning("%s: only %d of %d points found in %d attempts", grid.id, len(points),
                    grid.count, attempts)
    return points, attempts


def _verify_worker(args):
    identity_id, params, digits, index = args
    rec = verify_case(IdentityCase(identity_id, params), make_context(digits), index)
    if rec.raw_residual is not None:
        rec.raw_residual = str(rec.raw_residual)
    return rec


def sweep(grid: GridSpec, ctx: PrecisionContext, workers: int = 1) -> VerificationReport:
    """Verify an identity on ``grid.count`` seeded points.

    With ``workers > 1`` cases run in separate processes; records are still
    assembled in sample order, so the report does not depend on scheduling.
    """
    start = time.perf_counter()
    ident = ids.get(grid.id)
    report = VerificationReport(ident.id, ctx.digits, grid.seed, grid.profile, requested=grid.count)
    points, _ = sample_points(grid, ctx)
    if workers > 1 and len(points) > 1:
        jobs = [(grid.id, p, ctx.digits, i) for i, p in enumerate(points)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_verify_worker, jobs))
        records = results
        with ctx.work():
            for rec in records:
                if rec.raw_residual is not None:
                    rec.raw_residual = mpf(rec.raw_residual)
    else:
        records = [verify_case(IdentityCase(grid.id, p), ctx, i) for i, p in enumerate(points)]
    report.cases = records
    report.empty = not records
    residuals = [r.raw_residual for r in records
                 if r.raw_residual is not None and r.status == str(Status.CONVERGED)]
    report.max_residual = max(residuals) if residuals else None
    report.passed = not report.failures and len(records) == grid.count
    report.wall_time = time.perf_counter() - start
    return report


def verify_all(ctx: PrecisionContext, count: int = 25, seed: int = 1, profile: str = "real",
               workers: int = 1) -> list:
    return [sweep(GridSpec(i, count, seed, profile), ctx, workers) for i in ids.IDENTITY_IDS]


def reports_json(reports, timing: bool = False) -> str:
    if isinstance(reports, VerificationReport):
        payload = reports.to_dict(timing)
    else:
        payload = {
            "pass": all(r.passed for r in reports),
            "reports": [r.to_dict(timing) for r in reports],
        }
    return json.dumps(payload, indent=2, sort_keys=False) + "\n"


CSV_FIELDS = ["id", "index", "params", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "residual",
              "status", "terms", "in_domain", "counted", "pass"]


def reports_csv(reports) -> str:
    if isinstance(reports, VerificationReport):
        reports = [reports]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for r in reports:
        for c in r.cases:
            lhs, rhs = c.lhs or {}, c.rhs or {}
            w.writerow([r.id, c.index, ";".join(f"{k}={v}" for k, v in c.params.items()),
                        lhs.get("re", ""), lhs.get("im", ""), rhs.get("re", ""), rhs.get("im", ""),
                        c.residual or "", c.status, c.terms, c.in_domain, c.counted, c.passed])
    return buf.getvalue()


# ---------------------------------------------------------------- limit studies

@dataclass(frozen=True)
class LimitEdge:
    name: str
    parameter: str | None
    default_schedule: tuple
    default_fixed: dict
    description: str


LIMIT_EDGES = {
    "thm2:prop41": LimitEdge(
        "thm2:prop41", "b", ("1e2", "1e4", "1e6"),
        {"a": "0.6", "s": "1.7", "t": "2.2", "q": "0.25"},
        "(1 - a^2) * thm2 closed form as b grows, against the prop41 closed form"),
    "prop41:cor42": LimitEdge(
        "prop41:cor42", "t", ("1e2", "1e4", "1e6"),
        {"a": "0.6", "s": "1.7", "q": "0.25"},
        "prop41 closed form as t grows, against the cor42 closed form"),
    "cor42:quintuple": LimitEdge(
        "cor42:quintuple", None, (),
        {"x": "0.7", "q": "0.2"},
        "cor42 (both sides) at a = x^2 q, s = x q, against the quintuple closed form"),
    "q4f3:f43": LimitEdge(
        "q4f3:f43", "q", ("0.9", "0.99", "0.999"),
        {"a": "1.5", "c": "-2", "d": "0.5"},
        "terminating q4f3 sum as q -> 1-, against the Gamma-ratio value of f43"),
}


@dataclass
class TrendReport:
    edge: str
    parameter: str | None
    schedule: list
    gaps: list
    decreasing: bool
    final_gap: object
    passed: bool
    target: object = None

    def to_dict(self) -> dict:
        return {
            "edge": self.edge,
            "parameter": self.parameter,
            "schedule": self.schedule,
            "gaps": [_fmt_real(g) for g in self.gaps],
            "decreasing": self.decreasing,
            "final_gap": _fmt_real(self.final_gap),
            "target": self.target,
            "pass": self.passed,
        }


def get_edge(name: str) -> LimitEdge:
    try:
        return LIMIT_EDGES[name]
    except KeyError:
        raise SchemaError(f"unknown limit edge {name!r}; known: {', '.join(LIMIT_EDGES)}") from None


def limit_study(edge: str, ctx: PrecisionContext, schedule=None, fixed=None) -> TrendReport:
    """Gap sequence |from(v_i) - to| along the schedule and a strict-decrease verdict."""
    e = get_edge(edge)
    fixed = dict(e.default_fixed if fixed is None else fixed)
    schedule = [str(v) for v in (e.default_schedule if schedule is None else schedule)]
    rhs = lambda i, p: ids.eval_rhs(IdentityCase(i, p), ctx)
    gaps = []
    with ctx.work():
        if edge == "cor42:quintuple":
            x, q = to_complex(fixed["x"]), to_complex(fixed["q"])
            sub = {"a": x * x * q, "s": x * q, "q": q}
            target = rhs("quintuple", {"x": x, "q": q})
            lhs = ids.eval_lhs(IdentityCase("cor42", sub), ctx)
            gap = max(relative_error(lhs.value, target), relative_error(rhs("cor42", sub), target))
            ok = lhs.status is Status.CONVERGED and gap <= ctx.cmp_tol
            return TrendReport(edge, None, [], [gap], True, gap, ok, "cmp_tol")
        if not schedule:
            raise SchemaError(f"{edge}: empty schedule")
        if edge == "thm2:prop41":
            target = rhs("prop41", fixed)
            a = to_complex(fixed["a"])
            for b in schedule:
                gaps.append(abs((1 - a * a) * rhs("thm2", {**fixed, "b": b}) - target))
        elif edge == "prop41:cor42":
            target = rhs("cor42", fixed)
            for t in schedule:
                gaps.append(abs(rhs("prop41", {**fixed, "t": t}) - target))
        elif edge == "q4f3:f43":
            target = rhs("f43", fixed)
            for q in schedule:
                res = ids.eval_lhs(IdentityCase("q4f3", {**fixed, "q": q}), ctx)
                if res.status is not Status.CONVERGED:
                    raise SchemaError(f"q4f3 series did not converge at q = {q}")
                gaps.append(abs(res.value - target))
        decreasing = all(g2 < g1 for g1, g2 in zip(gaps, gaps[1:]))
        final = gaps[-1]
        passed = decreasing
        tgt = None
        if edge == "q4f3:f43":
            tgt = "1e-3"
            passed = passed and final <= mpf("1e-3")
        return TrendReport(edge, e.parameter, schedule, gaps, decreasing, final, passed, tgt)

"""Acceptance criteria, each run at its stated tolerance with one PASS/FAIL line printed."""

import random
import subprocess
import sys
import time

import mpmath
import pytest
from mpmath import mpc, mpf

from qsum import identities as ids
from qsum import verifier
from qsum.arith import make_context, relative_error, to_complex
from qsum.errors import PoleError
from qsum.identities import IdentityCase
from qsum.qpoch import gamma_classical, gamma_q, qpoch_finite, qpoch_infinite
from qsum.verifier import GridSpec

from oracles import lhs as oracle_lhs

pytestmark = pytest.mark.acceptance

RESIDUAL_BOUND = mpf("1e-35")
ORACLE_BOUND = mpf("1e-40")


@pytest.fixture
def announce(capsys):
    def emit(label, ok, detail):
        with capsys.disabled():
            print(f"\n[acceptance] {'PASS' if ok else 'FAIL'} {label}: {detail}")
    return emit


def _sweep_ok(rep, count):
    return (len(rep.cases) == count and rep.max_residual is not None
            and all(c.status == "Converged" and c.raw_residual <= RESIDUAL_BOUND for c in rep.cases))


def _fmt(x):
    return mpmath.nstr(x, 3) if x is not None else "n/a"


def test_c1_thm1_sweep(ctx, announce):
    t0 = time.perf_counter()
    rep = verifier.sweep(GridSpec("thm1", 100, seed=42), ctx)
    elapsed = time.perf_counter() - t0
    ok = _sweep_ok(rep, 100) and elapsed <= 30
    announce("C1 thm1 100 points", ok, f"max residual {_fmt(rep.max_residual)}, {elapsed:.1f} s")
    assert ok


def test_c2_thm2_sweep(ctx, announce):
    rep = verifier.sweep(GridSpec("thm2", 100, seed=1), ctx)
    window = True
    with ctx.work():
        for c in rep.cases:
            p = {k: to_complex(v) for k, v in c.params.items()}
            st = abs(p["s"] * p["t"])
            window &= abs(p["a"] ** 2 / (p["b"] * p["s"] * p["t"])) <= mpf("0.9") and st >= mpf("1.2")
    ok = _sweep_ok(rep, 100) and window
    announce("C2 thm2 100 points", ok, f"max residual {_fmt(rep.max_residual)}, sampling window held: {window}")
    assert ok


COROLLARIES = ["jacobi", "quintuple", "cor42", "prop41", "seed3105",
               "intermediate2phizzz", "bilateralX", "phi65limit"]


@pytest.mark.parametrize("identity", COROLLARIES)
def test_c3_corollary_sweeps(ctx, announce, identity):
    rep = verifier.sweep(GridSpec(identity, 50, seed=1), ctx)
    ok = _sweep_ok(rep, 50)
    if identity == "seed3105":
        ok &= all(0 <= int(c.params["n"]) <= 8 for c in rep.cases)
    announce(f"C3 {identity} 50 points", ok, f"max residual {_fmt(rep.max_residual)}")
    assert ok


def test_c4_f43(ctx, announce):
    rep = verifier.sweep(GridSpec("f43", 25, seed=1), ctx)
    cs = {int(mpf(c.params["c"])) for c in rep.cases}
    ok = _sweep_ok(rep, 25) and cs <= set(range(-6, 0))
    announce("C4 f43 25 points", ok, f"max residual {_fmt(rep.max_residual)}, c values {sorted(cs)}")
    assert ok


@pytest.mark.parametrize("edge, schedule", [
    ("thm2:prop41", ["1e2", "1e4", "1e6"]),
    ("prop41:cor42", ["1e2", "1e4", "1e6"]),
    ("q4f3:f43", ["0.9", "0.99", "0.999"]),
])
def test_c5_limit_edges(ctx, announce, edge, schedule):
    fixed = verifier.get_edge(edge).default_fixed
    tr = verifier.limit_study(edge, ctx, schedule)
    ok = all(a > b for a, b in zip(tr.gaps, tr.gaps[1:]))
    if edge == "q4f3:f43":
        ok &= int(mpf(fixed["c"])) == -2 and tr.final_gap <= mpf("1e-3")
    announce(f"C5 limit {edge}", ok, "gaps " + ", ".join(_fmt(g) for g in tr.gaps))
    assert ok


N_PROPERTY = 200


def _rand_c(rng, r):
    return mpc(rng.uniform(-r, r), rng.uniform(-r, r))


def _rand_q(rng):
    return mpc(rng.uniform(0.05, 0.9)) * mpmath.expj(rng.uniform(-3.1, 3.1))


def _property_run(check):
    """Run ``check(rng)`` until N_PROPERTY non-pole instances; return the worst error."""
    rng = random.Random(2024)
    worst, done = mpf(0), 0
    while done < N_PROPERTY:
        try:
            err = check(rng)
        except PoleError:
            continue
        worst = max(worst, err)
        done += 1
    return worst


def _cocycle(ctx):
    def check(rng):
        a, q = _rand_c(rng, 3), _rand_q(rng)
        n, m = rng.randint(-10, 10), rng.randint(-10, 10)
        whole = qpoch_finite(a, q, n + m, ctx).value
        return relative_error(whole, qpoch_finite(a, q, n, ctx).value
                              * qpoch_finite(a * q ** n, q, m, ctx).value)
    return check


def _splitting(ctx):
    def check(rng):
        a, q, n = _rand_c(rng, 3), _rand_q(rng), rng.randint(-10, 10)
        return relative_error(qpoch_infinite(a, q, ctx).value,
                              qpoch_finite(a, q, n, ctx).value * qpoch_infinite(a * q ** n, q, ctx).value)
    return check


def _inversion(ctx):
    def check(rng):
        a, q, m = _rand_c(rng, 3), _rand_q(rng), rng.randint(1, 15)
        return relative_error(qpoch_finite(a, q, -m, ctx).value
                              * qpoch_finite(a * q ** -m, q, m, ctx).value, 1)
    return check


def _gamma_recurrence(ctx):
    def check(rng):
        x = mpc(rng.uniform(0.01, 10), rng.uniform(-3, 3))
        return relative_error(gamma_classical(x + 1, ctx), x * gamma_classical(x, ctx))
    return check


@pytest.mark.parametrize("name, make", [
    ("cocycle", _cocycle), ("splitting", _splitting), ("inversion", _inversion),
    ("gamma recurrence", _gamma_recurrence),
])
def test_c6_pochhammer_properties(ctx, announce, name, make):
    with ctx.work():
        worst = _property_run(make(ctx))
    tol = 10 * ctx.trunc_eps
    ok = worst <= tol
    announce(f"C6 {name} x{N_PROPERTY}", ok, f"worst error {_fmt(worst)} (tolerance {_fmt(tol)})")
    assert ok


def test_c6_gamma_q_trend(ctx, announce):
    rng = random.Random(2025)
    bad = []
    with ctx.work():
        for _ in range(N_PROPERTY):
            x = mpf(round(rng.uniform(0.1, 8), 4))
            g = gamma_classical(x, ctx)
            gaps = [abs(gamma_q(x, q, ctx) - g) for q in ("0.9", "0.99", "0.999")]
            tight = all(d <= 10 * ctx.trunc_eps * max(1, abs(g)) for d in gaps)  # x = 1, 2
            if not (tight or gaps[0] > gaps[1] > gaps[2]):
                bad.append(x)
    ok = not bad
    announce(f"C6 gamma_q trend x{N_PROPERTY}", ok, f"{len(bad)} non-decreasing instances")
    assert ok


def test_c7_oracle_equivalence(ctx, announce):
    ctx60 = make_context(60)
    worst, worst_id = mpf(0), None
    for identity in ids.IDENTITY_IDS:
        points, _ = verifier.sample_points(GridSpec(identity, 10, seed=1), ctx)
        assert len(points) == 10
        for p in points:
            case = IdentityCase(identity, p)
            r = ids.eval_lhs(case, ctx)
            assert r.converged
            neg = r.negative_terms
            pos = r.terms_used - neg
            with ctx60.work():
                brute = oracle_lhs(identity, ids.validate(case, ctx60), 2 * neg, 2 * pos)
                err = relative_error(r.value, brute)
            if err > worst:
                worst, worst_id = err, identity
    ok = worst <= ORACLE_BOUND
    announce("C7 adaptive vs brute force", ok, f"worst {_fmt(worst)} ({worst_id}), 10 points x 12 identities")
    assert ok


def test_c8_verify_all_deterministic(tmp_path, announce):
    outs = []
    for i in range(2):
        path = tmp_path / f"run{i}.json"
        proc = subprocess.run([sys.executable, "-m", "qsum", "verify", "all", "--seed", "1",
                               "--out", str(path)], capture_output=True, text=True)
        assert proc.returncode == 0, proc.stdout + proc.stderr
        outs.append(path.read_bytes())
    ok = outs[0] == outs[1]
    announce("C8 verify all --seed 1 byte-identical", ok, f"{len(outs[0])} bytes per run")
    assert ok

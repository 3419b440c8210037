import mpmath
import pytest
from mpmath import mpf

from qsum import identities as ids
from qsum.arith import relative_error
from qsum.errors import DomainError, PoleError, SchemaError
from qsum.identities import IdentityCase as Case
from qsum.series import Status

from oracles import lhs as oracle_lhs


def test_registry():
    assert len(ids.IDENTITY_IDS) == 12
    assert ids.IDENTITY_IDS[0] == "seed3105"
    with pytest.raises(SchemaError):
        ids.get("nope")


def test_describe_thm1():
    d = ids.describe("thm1")
    assert [p["name"] for p in d["parameters"]] == ["a", "s", "t", "q"]
    assert d["convergence"] == "|1/(st)| < 1"
    assert not d["bilateral"]


def test_describe_thm2_and_jacobi():
    d = ids.describe("thm2")
    assert {p["name"] for p in d["parameters"]} == {"a", "b", "s", "t", "q"}
    assert "a^2/(bst)" in d["convergence"] and d["bilateral"]
    j = ids.describe("jacobi")
    assert {p["name"] for p in j["parameters"]} == {"a", "q"}
    assert "a != 0" in j["constraints"]


def test_seed_n0(ctx):
    c = Case("seed3105", {"a": "0.7", "w": "1.1", "q": "0.4", "n": 0})
    assert ids.eval_lhs(c, ctx).value == 1
    with ctx.work():
        assert relative_error(ids.eval_rhs(c, ctx), 1) <= ctx.cmp_tol


def test_jacobi_a_equals_q(ctx):
    c = Case("jacobi", {"a": "0.1", "q": "0.1"})
    assert abs(ids.eval_lhs(c, ctx).value) <= ctx.cmp_tol
    assert ids.eval_rhs(c, ctx) == 0


def test_thm1_point_against_oracle(ctx, ctx60):
    c = Case("thm1", {"q": "0.3", "a": "0.2", "s": "2.1", "t": "3.7"})
    r = ids.eval_lhs(c, ctx)
    assert r.converged
    with ctx60.work():
        brute = oracle_lhs("thm1", ids.validate(c, ctx60), 0, 2 * r.terms_used)
    assert relative_error(r.value, brute) <= mpf("1e-40")
    assert ids.residual(c, ctx) <= ctx.cmp_tol


def test_f43_rhs_example(ctx):
    c = Case("f43", {"a": "2", "c": "-1", "d": "0.5"})
    with ctx.work():
        g = mpmath.gamma
        want = g(4) * g(mpf("2.5")) / (g(3) * g(mpf("3.5")))
        # two surviving terms: 1 + (a)(a/2+1)(c)(d)/((a/2)(a-c+1)(a-d+1)) * (-1)
        two_terms = 1 - mpf(2) * 2 * (-1) * mpf("0.5") / (1 * 4 * mpf("2.5"))
        assert relative_error(ids.eval_rhs(c, ctx), want) <= ctx.cmp_tol
        assert relative_error(ids.eval_lhs(c, ctx).value, two_terms) <= ctx.cmp_tol


@pytest.mark.parametrize("identity, params", [
    ("jacobi", {"q": "0.1", "a": "0.5"}),
    ("thm2", {"q": "0.25", "a": "0.6", "b": "1.3", "s": "1.7", "t": "2.2"}),
    ("quintuple", {"q": "0.2", "x": "0.7"}),
    ("prop41", {"q": "0.35", "a": "-1.4", "s": "2.5", "t": "0.9+0.2i"}),
    ("cor42", {"q": "0.5", "a": "0.8", "s": "-1.6"}),
    ("intermediate2phizzz", {"q": "0.6", "a": "2", "w": "0.5", "u": "-0.6"}),
    ("bilateralX", {"q": "0.35", "a": "0.4", "s": "1.9", "t": "-2.3", "x": "0.7"}),
    ("q4f3", {"q": "0.5", "a": "1.2", "c": "-1.5", "d": "0.3"}),
    ("phi65limit", {"q": "0.4", "a": "0.3", "c": "2.2", "d": "-1.1"}),
    ("seed3105", {"q": "0.3", "a": "0.4", "w": "1.3", "n": 5}),
])
def test_residual_small(ctx, identity, params):
    assert ids.residual(Case(identity, params), ctx) <= ctx.cmp_tol


def test_thm1_symmetric_in_s_t(ctx):
    p = {"q": "0.3", "a": "0.2+0.1i", "s": "2.1", "t": "-3.7"}
    swapped = {**p, "s": p["t"], "t": p["s"]}
    with ctx.work():
        a, b = ids.eval_lhs(Case("thm1", p), ctx).value, ids.eval_lhs(Case("thm1", swapped), ctx).value
        assert relative_error(a, b) <= 10 * ctx.trunc_eps
        assert relative_error(ids.eval_rhs(Case("thm1", p), ctx),
                              ids.eval_rhs(Case("thm1", swapped), ctx)) <= 10 * ctx.trunc_eps


def test_thm1_s_equals_minus_t_vanishes(ctx):
    c = Case("thm1", {"q": "0.3", "a": "0.45", "s": "1.8", "t": "-1.8"})
    assert ids.eval_rhs(c, ctx) == 0
    assert abs(ids.eval_lhs(c, ctx).value) <= ctx.cmp_tol


def test_thm2_at_x_matches_bilateral(ctx):
    p = {"q": "0.25", "a": "0.6", "b": "1.3", "s": "1.7", "t": "2.2"}
    with ctx.work():
        x = mpf("0.36") / mpf("1.3")
        b = Case("bilateralX", {"q": p["q"], "a": p["a"], "s": p["s"], "t": p["t"], "x": x})
        assert relative_error(ids.eval_lhs(Case("thm2", p), ctx).value,
                              ids.eval_lhs(b, ctx).value) <= 10 * ctx.trunc_eps


def test_thm2_small_st_still_converges(ctx):
    # |st| < 1 but |a^2/(bst)| < 1: the negative branch ratio is governed by a^2/(bst)
    c = Case("thm2", {"q": "0.3", "a": "0.3", "b": "2", "s": "0.5", "t": "0.5"})
    r = ids.eval_lhs(c, ctx)
    assert r.converged
    assert ids.residual(c, ctx) <= ctx.cmp_tol


def test_thm2_outside_domain_diverges(ctx):
    c = Case("thm2", {"q": "0.25", "a": "0.6", "b": "1.3", "s": "0.5", "t": "0.5"})
    assert not ids.in_convergence_domain(c, ctx)
    assert ids.eval_lhs(c, ctx).status is Status.DIVERGING


def test_thm1_outside_domain(ctx):
    c = Case("thm1", {"q": "0.3", "a": "0.2", "s": "0.5", "t": "0.9"})
    assert not ids.in_convergence_domain(c, ctx)
    assert not ids.eval_lhs(c, ctx).converged


def test_prop41_is_thm2_limit(ctx):
    base = {"q": "0.25", "a": "0.6", "s": "1.7", "t": "2.2"}
    with ctx.work():
        target = ids.eval_rhs(Case("prop41", base), ctx)
        gaps = [abs((1 - mpf("0.36")) * ids.eval_rhs(Case("thm2", {**base, "b": b}), ctx) - target)
                for b in ("1e2", "1e4", "1e6")]
    assert gaps[0] > gaps[1] > gaps[2]


def test_quintuple_from_cor42(ctx):
    with ctx.work():
        x, q = mpf("0.7"), mpf("0.2")
        sub = Case("cor42", {"a": x * x * q, "s": x * q, "q": q})
        five = ids.eval_rhs(Case("quintuple", {"x": x, "q": q}), ctx)
        assert relative_error(ids.eval_lhs(sub, ctx).value, five) <= ctx.cmp_tol


@pytest.mark.parametrize("identity, params", [
    ("thm1", {"a": "0.2", "s": "2"}),
    ("thm1", {"a": "0.2", "s": "2", "t": "3", "q": "0.3", "z": "1"}),
    ("thm1", {"a": "0.2", "s": "2", "t": "3", "q": "1.2"}),
    ("thm1", {"a": "0.2", "s": "x", "t": "3", "q": "0.3"}),
    ("seed3105", {"a": "0.4", "w": "1.3", "q": "0.3", "n": -1}),
    ("seed3105", {"a": "0.4", "w": "1.3", "q": "0.3", "n": "1.5"}),
    ("f43", {"a": "2", "c": "0.5", "d": "0.5"}),
])
def test_schema_errors(ctx, identity, params):
    with pytest.raises(SchemaError):
        ids.validate(Case(identity, params), ctx)


@pytest.mark.parametrize("identity, params", [
    ("jacobi", {"a": "0", "q": "0.3"}),
    ("quintuple", {"x": "0.2", "q": "0.2"}),
    ("f43", {"a": "-1", "c": "-2", "d": "0.5"}),
])
def test_domain_errors(ctx, identity, params):
    with pytest.raises(DomainError):
        ids.validate(Case(identity, params), ctx)


def test_domain_error_is_schema_error():
    assert issubclass(DomainError, SchemaError)
    assert issubclass(PoleError, ZeroDivisionError)

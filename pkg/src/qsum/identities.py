"""Registry of summation identities with executable left- and right-hand sides.

Each :class:`Identity` knows its parameter schema, the hard domain constraints
(nonzero parameters, pole avoidance), the convergence condition of its series
side, how to sum that side and how to evaluate the closed form.

Identity ids::

    seed3105             terminating two-base sum, n in N
    intermediate2phizzz  its nonterminating extension in w, u
    thm1                 nonterminating sum in a, s, t with argument -1/(st)
    bilateralX           bilateral sum in a, s, t, x
    thm2                 bilateral sum in a, b, s, t (x = a^2/b)
    prop41               b -> infinity limit of thm2
    cor42                t -> infinity limit of prop41
    quintuple            quintuple product identity
    jacobi               Jacobi triple product identity
    f43                  classical 4F3 at -1 (terminating)
    q4f3                 thm1 with a, s, t -> q^a, q^c, q^d
    phi65limit           b -> infinity limit of the very-well-poised 6phi5 sum
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import mpmath
from mpmath import mpc, mpf

from .arith import PrecisionContext, relative_error, to_complex
from .errors import DomainError, PoleError, SchemaError
from .qpoch import gamma_classical, qpoch_finite, qpoch_infinite
from .series import (
    DEFAULT_MAX_TERMS,
    SeriesResult,
    SeriesSpec,
    poch_term,
    sum_series,
    sum_summand,
    sum_terms,
)

# Points closer than this multiple of trunc_eps to a pole are rejected.
POLE_MARGIN = 1000


@dataclass(frozen=True)
class Param:
    name: str
    kind: str = "complex"  # complex | integer
    note: str = ""


@dataclass(frozen=True)
class PoleSite:
    """Factors 1 - value*base^j for lo <= j <= hi must not vanish (None = unbounded)."""
    label: str
    value: mpc
    base: mpc
    lo: int | None = 0
    hi: int | None = None


@dataclass(frozen=True)
class IdentityCase:
    id: str
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Identity:
    id: str
    summary: str
    formula: str
    params: tuple
    constraints: tuple
    convergence: str | None
    bilateral: bool
    lhs: Callable
    rhs: Callable
    poles: Callable
    nonzero: Callable = lambda p: []
    ratio: Callable | None = None       # modulus of the limiting term ratio
    extra_check: Callable | None = None  # raises SchemaError

    @property
    def param_names(self):
        return tuple(p.name for p in self.params)

    def describe(self) -> dict:
        return {
            "id": self.id,
            "summary": self.summary,
            "formula": self.formula,
            "parameters": [
                {"name": p.name, "kind": p.kind, "note": p.note} for p in self.params
            ],
            "constraints": list(self.constraints),
            "convergence": self.convergence,
            "bilateral": self.bilateral,
        }


# ---------------------------------------------------------------- helpers

def _P(args, Q, ctx, n=None):
    """Product of (v;Q)_n over args; n=None is the infinite product."""
    out = mpc(1)
    for v in args:
        if n is None:
            out *= qpoch_infinite(v, Q, ctx).value
        else:
            out *= qpoch_finite(v, Q, n, ctx).value
    return out


def _ratio(nums, dens, Q, k, ctx):
    """prod (nums;Q)_k / prod (dens;Q)_k for any integer k, with exact zeros."""
    out = mpc(1)
    for v in nums:
        t = poch_term(v, Q, k, ctx)
        if t == 0:
            return mpc(0)
        out *= t
    for v in dens:
        try:
            t = poch_term(v, Q, k, ctx)
        except PoleError:
            return mpc(0)
        if t == 0:
            raise PoleError("denominator Pochhammer vanishes")
        out /= t
    return out


def _qpow(q, x):
    """q^x on the principal branch; exact repeated multiplication for integer x."""
    if isinstance(x, int):
        return q ** x
    x = to_complex(x)
    if x.imag == 0 and x.real == int(x.real) and abs(x.real) < 10**6:
        return q ** int(x.real)
    return mpmath.exp(x * mpmath.log(q))


def _up(label, v, Q, hi=None):
    return PoleSite(label, v, Q, 0, hi)


def _down(label, v, Q):
    return PoleSite(label, v, Q, None, -1)


def _min_factor(site: PoleSite) -> mpf:
    v, Q = site.value, site.base
    best = mpf("inf")
    if v == 0:
        return best
    if site.hi is None or site.hi >= 0:
        j = max(site.lo, 0) if site.lo is not None else 0
        p = v * Q ** j
        while site.hi is None or j <= site.hi:
            best = min(best, abs(1 - p))
            if abs(p) < mpf("0.5"):
                break
            p *= Q
            j += 1
    if site.lo is None or site.lo < 0:
        j = min(site.hi, -1) if site.hi is not None else -1
        p = v * Q ** j
        qinv = 1 / Q
        while site.lo is None or j >= site.lo:
            best = min(best, abs(1 - p))
            if abs(p) > 2:
                break
            p *= qinv
            j -= 1
    return best


# ---------------------------------------------------------------- LHS/RHS per identity

def _seed_spec(p):
    a, w, q, n = p["a"], p["w"], p["q"], p["n"]
    q2 = q * q
    return SeriesSpec.build(
        base=q2, numerators=(a * a, a * q2, -a * q2), denominators=(a, -a),
        groups=((q, (-a * q / w, q ** (-n)), (w, -a * q ** (n + 1))),),
        argument=w * q ** (n - 1) / a,
    )


def _seed_rhs(p, ctx):
    a, w, q, n = p["a"], p["w"], p["q"], p["n"]
    return (_P((-a * q, a * q * q / w, w / (a * q)), q, ctx, n)
            / _P((-q, a * q / w, w), q, ctx, n))


def _seed_poles(p):
    a, w, q, n = p["a"], p["w"], p["q"], p["n"]
    q2 = q * q
    return [_up("a", a, q2), _up("-a", -a, q2), _up("w", w, q),
            _up("-aq^(n+1)", -a * q ** (n + 1), q),
            _up("-q", -q, q, n - 1), _up("aq/w", a * q / w, q, n - 1)]


def _zzz_spec(p):
    a, w, u, q = p["a"], p["w"], p["u"], p["q"]
    q2 = q * q
    return SeriesSpec.build(
        base=q2, numerators=(a * a, a * q2, -a * q2), denominators=(a, -a),
        groups=((q, (-a * q / w, -a * q / u), (w, u)),),
        argument=-w * u / (a * a * q2),
    )


def _zzz_rhs(p, ctx):
    a, w, u, q = p["a"], p["w"], p["u"], p["q"]
    return (-(u + w) / (a * q)
            * _P((-a * q, w / a, u / a, -w * u / (a * q)), q, ctx)
            / _P((-q, w, u, -w * u / (a * a * q * q)), q, ctx))


def _zzz_poles(p):
    a, w, u, q = p["a"], p["w"], p["u"], p["q"]
    q2 = q * q
    return [_up("a", a, q2), _up("-a", -a, q2), _up("w", w, q), _up("u", u, q),
            _up("-q", -q, q), _up("-wu/(a^2q^2)", -w * u / (a * a * q2), q)]


def _thm1_spec(p):
    a, s, t, q = p["a"], p["s"], p["t"], p["q"]
    q2 = q * q
    return SeriesSpec.build(
        base=q2, numerators=(a * a, a * q2, -a * q2), denominators=(a, -a),
        groups=((q, (s, t), (a * q / s, a * q / t)),),
        argument=-1 / (s * t),
    )


def _thm1_rhs(p, ctx):
    a, s, t, q = p["a"], p["s"], p["t"], p["q"]
    return ((s + t) / (s * t)
            * _P((a * q, -q / s, -q / t, a * q / (s * t)), q, ctx)
            / _P((-q, a * q / s, a * q / t, -1 / (s * t)), q, ctx))


def _thm1_poles(p):
    a, s, t, q = p["a"], p["s"], p["t"], p["q"]
    q2 = q * q
    return [_up("a", a, q2), _up("-a", -a, q2), _up("aq/s", a * q / s, q),
            _up("aq/t", a * q / t, q), _up("-q", -q, q), _up("-1/(st)", -1 / (s * t), q)]


def _bilateral_spec(a, s, t, x, q):
    q2 = q * q
    return SeriesSpec.build(
        base=q2, numerators=(a * q2, -a * q2, a * a / x), denominators=(a, -a, x * q2),
        groups=((q, (s, t), (a * q / s, a * q / t)),),
        argument=-x / (s * t), bilateral=True,
    )


def _bilateral_rhs(a, s, t, x, q, ctx):
    q2 = q * q
    num = (_P((x * q2 / (s * s), x * q2 / (t * t)), q2, ctx)
           * _P((-x / a, q, q / a, a * q, a * q / (s * t)), q, ctx))
    den = (_P((x * q2, x * q2 / (a * a)), q2, ctx)
           * _P((q / s, q / t, a * q / s, a * q / t, -x / (s * t)), q, ctx))
    return a * (s + t) / ((a + 1) * s * t) * num / den


def _bilateral_poles(a, s, t, x, q):
    q2 = q * q
    return [
        _down("aq^2", a * q2, q2), _down("-aq^2", -a * q2, q2), _down("a^2/x", a * a / x, q2),
        _down("s", s, q), _down("t", t, q),
        _up("a", a, q2), _up("-a", -a, q2), _up("xq^2", x * q2, q2),
        _up("aq/s", a * q / s, q), _up("aq/t", a * q / t, q),
        _up("xq^2/a^2", x * q2 / (a * a), q2), _up("q/s", q / s, q), _up("q/t", q / t, q),
        _up("-x/(st)", -x / (s * t), q),
    ]


def _x_of(p):
    return p["x"] if "x" in p else p["a"] ** 2 / p["b"]


def _prop41_summand(p, ctx):
    a, s, t, q = p["a"], p["s"], p["t"], p["q"]
    z = a * a / (s * t)

    def f(k):
        r = _ratio((s, t), (a * q / s, a * q / t), q, k, ctx)
        if r == 0:
            return r
        return (1 - a * a * q ** (4 * k)) * r * q ** (k * k - k) * z ** k
    return f


def _prop41_rhs(p, ctx):
    a, s, t, q = p["a"], p["s"], p["t"], p["q"]
    return (a * (s + t) / (s * t) * _P((q, q / a, a, a * q / (s * t)), q, ctx)
            / _P((q / s, q / t, a * q / s, a * q / t), q, ctx))


def _prop41_poles(p):
    a, s, t, q = p["a"], p["s"], p["t"], p["q"]
    return [_down("s", s, q), _down("t", t, q), _up("aq/s", a * q / s, q),
            _up("aq/t", a * q / t, q), _up("q/s", q / s, q), _up("q/t", q / t, q)]


def _cor42_summand(p, ctx):
    a, s, q = p["a"], p["s"], p["q"]
    z = -a * a / s

    def f(k):
        r = _ratio((s,), (a * q / s,), q, k, ctx)
        if r == 0:
            return r
        return (1 - a * a * q ** (4 * k)) * r * q ** (3 * k * (k - 1) // 2) * z ** k
    return f


def _cor42_rhs(p, ctx):
    a, s, q = p["a"], p["s"], p["q"]
    return a * _P((q, q / a, a), q, ctx) / (s * _P((q / s, a * q / s), q, ctx))


def _cor42_poles(p):
    a, s, q = p["a"], p["s"], p["q"]
    return [_down("s", s, q), _up("aq/s", a * q / s, q), _up("q/s", q / s, q)]


def _quintuple_summand(p, ctx):
    x, q = p["x"], p["q"]
    x3 = x ** 3

    def f(k):
        sign = -1 if k % 2 else 1
        return sign * q ** (k * (3 * k - 1) // 2) * x3 ** k * (1 + x * q ** k)
    return f


def _quintuple_rhs(p, ctx):
    x, q = p["x"], p["q"]
    return _P((q, q / (x * x), x * x), q, ctx) / _P((x, q / x), q, ctx)


def _jacobi_summand(p, ctx):
    a, q = p["a"], p["q"]

    def f(k):
        sign = -1 if k % 2 else 1
        return sign * q ** (k * (k - 1) // 2) * a ** k
    return f


def _jacobi_rhs(p, ctx):
    a, q = p["a"], p["q"]
    return _P((q, q / a, a), q, ctx)


def _f43_terms(p):
    """Terms of 4F3(a, a/2+1, c, d; a/2, a-c+1, a-d+1; -1) until a numerator vanishes."""
    a, c, d = p["a"], p["c"], p["d"]
    half = a / 2
    nums = (a, half + 1, c, d)
    dens = (half, a - c + 1, a - d + 1)
    t = mpc(1)
    k = 0
    yield t
    while True:
        top = mpc(1)
        for v in nums:
            f = v + k
            if f == 0:
                return
            top *= f
        bottom = mpc(k + 1)
        for v in dens:
            bottom *= v + k
        t = -t * top / bottom
        k += 1
        yield t


def _f43_rhs(p, ctx):
    a, c, d = p["a"], p["c"], p["d"]
    g = lambda x: gamma_classical(x, ctx)
    return g(a - c + 1) * g(a - d + 1) / (g(a + 1) * g(a - c - d + 1))


def _nonpositive_int(z) -> bool:
    return z.imag == 0 and z.real <= 0 and z.real == int(z.real)


def _near_nonpositive_int(z, tol) -> bool:
    r = mpmath.nint(z.real)
    return r <= 0 and abs(z - r) < tol


def _f43_check(p, ctx):
    a, c, d = p["a"], p["c"], p["d"]
    if not (_nonpositive_int(c) or _nonpositive_int(d)):
        raise SchemaError("f43 is implemented for terminating cases only: c or d must be a nonpositive integer")
    n_terms = int(-(c.real if _nonpositive_int(c) else d.real))
    tol = POLE_MARGIN * ctx.trunc_eps
    for label, v in (("a+1", a + 1), ("a-c+1", a - c + 1), ("a-d+1", a - d + 1),
                     ("a-c-d+1", a - c - d + 1)):
        if _near_nonpositive_int(v, tol):
            raise DomainError(f"f43: {label} is a nonpositive integer (Gamma pole)")
    for j in range(n_terms):
        if abs(a / 2 + j) < tol:
            raise DomainError("f43: (a/2)_k vanishes")


def _q4f3_spec(p):
    a, c, d, q = p["a"], p["c"], p["d"], p["q"]
    q2 = q * q
    qa = _qpow(q, a)
    return SeriesSpec.build(
        base=q2, numerators=(qa * qa, qa * q2, -qa * q2), denominators=(qa, -qa),
        groups=((q, (_qpow(q, c), _qpow(q, d)), (_qpow(q, a - c + 1), _qpow(q, a - d + 1))),),
        argument=-1 / (_qpow(q, c) * _qpow(q, d)),
    )


def _q4f3_rhs(p, ctx):
    a, c, d, q = p["a"], p["c"], p["d"], p["q"]
    qc, qd = _qpow(q, c), _qpow(q, d)
    num = _P((_qpow(q, 1 + a), -_qpow(q, 1 - c), -_qpow(q, 1 - d), _qpow(q, a - c - d + 1)), q, ctx)
    den = _P((-q, _qpow(q, a - c + 1), _qpow(q, a - d + 1), -_qpow(q, -c - d)), q, ctx)
    return (qc + qd) / (qc * qd) * num / den


def _q4f3_terminating(p) -> bool:
    return _nonpositive_int(p["c"]) or _nonpositive_int(p["d"])


def _q4f3_poles(p):
    a, c, d, q = p["a"], p["c"], p["d"], p["q"]
    q2 = q * q
    qa = _qpow(q, a)
    return [_up("q^a", qa, q2), _up("-q^a", -qa, q2),
            _up("q^(a-c+1)", _qpow(q, a - c + 1), q), _up("q^(a-d+1)", _qpow(q, a - d + 1), q),
            _up("-q", -q, q), _up("-q^(-c-d)", -_qpow(q, -c - d), q)]


def _phi65_spec(p):
    a, c, d, q = p["a"], p["c"], p["d"], p["q"]
    return SeriesSpec.build(
        base=q, numerators=(a, c, d), denominators=(a * q / c, a * q / d),
        groups=((q * q, (a * q * q,), (a,)),),
        argument=-a * q / (c * d), quadratic=(q, 1),
    )


def _phi65_rhs(p, ctx):
    a, c, d, q = p["a"], p["c"], p["d"], p["q"]
    return _P((a * q, a * q / (c * d)), q, ctx) / _P((a * q / c, a * q / d), q, ctx)


def _phi65_poles(p):
    a, c, d, q = p["a"], p["c"], p["d"], p["q"]
    return [_up("a", a, q * q), _up("aq/c", a * q / c, q), _up("aq/d", a * q / d, q)]


# ---------------------------------------------------------------- registry

def _spec_lhs(builder):
    def lhs(p, ctx, max_terms):
        return sum_series(builder(p), ctx, max_terms)
    return lhs


def _summand_lhs(maker, bilateral=True):
    def lhs(p, ctx, max_terms):
        return sum_summand(maker(p, ctx), ctx, bilateral, max_terms)
    return lhs


Q = Param("q", note="0 < |q| < 1")

_REGISTRY = [
    Identity(
        "seed3105", "terminating two-base summation (q^2 and q), n a nonnegative integer",
        "Phi(a^2, aq^2, -aq^2 : -aq/w, q^-n / a, -a : w, -aq^(n+1); q^2, q; w q^(n-1)/a)"
        " = (-aq, aq^2/w, w/(aq); q)_n / (-q, aq/w, w; q)_n",
        (Param("a", note="nonzero"), Param("w", note="nonzero"), Q,
         Param("n", "integer", "n >= 0")),
        ("a != 0", "w != 0", "n >= 0", "no poles in (a, -a; q^2)_k, (w, -aq^(n+1); q)_k, (-q, aq/w, w; q)_n"),
        None, False, _spec_lhs(_seed_spec), _seed_rhs, _seed_poles,
        nonzero=lambda p: [("a", p["a"]), ("w", p["w"])],
    ),
    Identity(
        "intermediate2phizzz", "nonterminating extension of seed3105 in two free parameters w, u",
        "Phi(a^2, aq^2, -aq^2 : -aq/w, -aq/u / a, -a : w, u; q^2, q; -wu/(a^2 q^2))"
        " = -(u+w)/(aq) (-aq, w/a, u/a, -wu/(aq); q)_inf / (-q, w, u, -wu/(a^2 q^2); q)_inf",
        (Param("a", note="nonzero"), Param("w", note="nonzero"), Param("u", note="nonzero"), Q),
        ("a, w, u != 0", "no poles in (a, -a; q^2)_k, (w, u; q)_k, (-q, -wu/(a^2q^2); q)_inf"),
        "|wu/(a^2 q^2)| < 1", False, _spec_lhs(_zzz_spec), _zzz_rhs, _zzz_poles,
        nonzero=lambda p: [("a", p["a"]), ("w", p["w"]), ("u", p["u"])],
        ratio=lambda p: abs(p["w"] * p["u"] / (p["a"] ** 2 * p["q"] ** 2)),
    ),
    Identity(
        "thm1", "nonterminating two-base summation in a, s, t",
        "Phi(a^2, aq^2, -aq^2 : s, t / a, -a : aq/s, aq/t; q^2, q; -1/(st))"
        " = (s+t)/(st) (aq, -q/s, -q/t, aq/(st); q)_inf / (-q, aq/s, aq/t, -1/(st); q)_inf",
        (Param("a", note="nonzero"), Param("s", note="nonzero"), Param("t", note="nonzero"), Q),
        ("a, s, t != 0", "no poles in aq/s, aq/t, (a, -a; q^2)_k, (-1/(st); q)_inf"),
        "|1/(st)| < 1", False, _spec_lhs(_thm1_spec), _thm1_rhs, _thm1_poles,
        nonzero=lambda p: [("a", p["a"]), ("s", p["s"]), ("t", p["t"])],
        ratio=lambda p: abs(1 / (p["s"] * p["t"])),
    ),
    Identity(
        "bilateralX", "bilateral two-base summation in a, s, t, x",
        "sum_k (aq^2, -aq^2, a^2/x; q^2)_k (s, t; q)_k / ((a, -a, xq^2; q^2)_k (aq/s, aq/t; q)_k) (-x/(st))^k"
        " = a(s+t)/((a+1)st) (xq^2/s^2, xq^2/t^2; q^2)_inf (-x/a, q, q/a, aq, aq/(st); q)_inf"
        " / ((xq^2, xq^2/a^2; q^2)_inf (q/s, q/t, aq/s, aq/t, -x/(st); q)_inf)",
        (Param("a", note="nonzero, != -1"), Param("s", note="nonzero"), Param("t", note="nonzero"),
         Param("x", note="nonzero"), Q),
        ("a, s, t, x != 0", "a != -1", "no poles in either side"),
        "|x/(st)| < 1 (limiting ratio of both tails)", True,
        lambda p, ctx, m: sum_series(_bilateral_spec(p["a"], p["s"], p["t"], p["x"], p["q"]), ctx, m),
        lambda p, ctx: _bilateral_rhs(p["a"], p["s"], p["t"], p["x"], p["q"], ctx),
        lambda p: _bilateral_poles(p["a"], p["s"], p["t"], p["x"], p["q"]),
        nonzero=lambda p: [("a", p["a"]), ("s", p["s"]), ("t", p["t"]), ("x", p["x"]),
                           ("a+1", p["a"] + 1)],
        ratio=lambda p: abs(p["x"] / (p["s"] * p["t"])),
    ),
    Identity(
        "thm2", "bilateral two-base summation in a, b, s, t",
        "Psi(aq^2, -aq^2, b : s, t / a, -a, a^2q^2/b : aq/s, aq/t; q^2, q; -a^2/(bst))"
        " = a(s+t)/((a+1)st) (q, q/a, aq, aq/(st), -a/b; q)_inf (a^2q^2/(bs^2), a^2q^2/(bt^2); q^2)_inf"
        " / ((q/s, q/t, aq/s, aq/t, -a^2/(bst); q)_inf (a^2q^2/b, q^2/b; q^2)_inf)",
        (Param("a", note="nonzero, != -1"), Param("b", note="nonzero"), Param("s", note="nonzero"),
         Param("t", note="nonzero"), Q),
        ("a, b, s, t != 0", "a != -1", "no poles in either side (b != q^(2j), j >= 1, etc.)"),
        "|a^2/(bst)| < 1 (limiting ratio of both tails)", True,
        lambda p, ctx, m: sum_series(_bilateral_spec(p["a"], p["s"], p["t"], _x_of(p), p["q"]), ctx, m),
        lambda p, ctx: _bilateral_rhs(p["a"], p["s"], p["t"], _x_of(p), p["q"], ctx),
        lambda p: _bilateral_poles(p["a"], p["s"], p["t"], _x_of(p), p["q"]),
        nonzero=lambda p: [("a", p["a"]), ("b", p["b"]), ("s", p["s"]), ("t", p["t"]),
                           ("a+1", p["a"] + 1)],
        ratio=lambda p: abs(p["a"] ** 2 / (p["b"] * p["s"] * p["t"])),
    ),
    Identity(
        "prop41", "bilateral sum with factor (1 - a^2 q^(4k)); b -> infinity limit of thm2",
        "sum_k (1 - a^2 q^(4k)) (s, t; q)_k / (aq/s, aq/t; q)_k q^(k^2-k) (a^2/(st))^k"
        " = a(s+t)/(st) (q, q/a, a, aq/(st); q)_inf / (q/s, q/t, aq/s, aq/t; q)_inf",
        (Param("a", note="nonzero"), Param("s", note="nonzero"), Param("t", note="nonzero"), Q),
        ("a, s, t != 0", "no poles in either side"),
        None, True, _summand_lhs(_prop41_summand), _prop41_rhs, _prop41_poles,
        nonzero=lambda p: [("a", p["a"]), ("s", p["s"]), ("t", p["t"])],
    ),
    Identity(
        "cor42", "t -> infinity limit of prop41, unifying the triple and quintuple products",
        "sum_k (1 - a^2 q^(4k)) (s; q)_k / (aq/s; q)_k q^((3k^2-3k)/2) (-a^2/s)^k"
        " = a (q, q/a, a; q)_inf / (s (q/s, aq/s; q)_inf)",
        (Param("a", note="nonzero"), Param("s", note="nonzero"), Q),
        ("a, s != 0", "no poles in either side"),
        None, True, _summand_lhs(_cor42_summand), _cor42_rhs, _cor42_poles,
        nonzero=lambda p: [("a", p["a"]), ("s", p["s"])],
    ),
    Identity(
        "quintuple", "quintuple product identity",
        "sum_k (-1)^k q^(k(3k-1)/2) x^(3k) (1 + x q^k) = (q, q/x^2, x^2; q)_inf / (x, q/x; q)_inf",
        (Param("x", note="nonzero"), Q),
        ("x != 0", "x != q^j for any integer j"),
        None, True, _summand_lhs(_quintuple_summand), _quintuple_rhs,
        lambda p: [_up("x", p["x"], p["q"]), _up("q/x", p["q"] / p["x"], p["q"])],
        nonzero=lambda p: [("x", p["x"])],
    ),
    Identity(
        "jacobi", "Jacobi triple product identity",
        "sum_n (-1)^n q^(n(n-1)/2) a^n = (q, q/a, a; q)_inf",
        (Param("a", note="nonzero"), Q),
        ("a != 0",),
        None, True, _summand_lhs(_jacobi_summand), _jacobi_rhs, lambda p: [],
        nonzero=lambda p: [("a", p["a"])],
    ),
    Identity(
        "f43", "classical 4F3 summation at argument -1 (terminating cases)",
        "4F3(a, a/2+1, c, d; a/2, a-c+1, a-d+1; -1)"
        " = Gamma(a-c+1) Gamma(a-d+1) / (Gamma(a+1) Gamma(a-c-d+1))",
        (Param("a", note="nonzero"), Param("c", note="nonpositive integer (or d)"), Param("d")),
        ("c or d a nonpositive integer", "a != 0",
         "a+1, a-c+1, a-d+1, a-c-d+1 not nonpositive integers"),
        None, False,
        lambda p, ctx, m: sum_terms(_f43_terms(p), ctx, m),
        _f43_rhs, lambda p: [],
        nonzero=lambda p: [("a", p["a"])],
        extra_check=_f43_check,
    ),
    Identity(
        "q4f3", "thm1 with a, s, t replaced by q^a, q^c, q^d (q-analogue of f43)",
        "sum_k (q^(2a), q^(a+2), -q^(a+2); q^2)_k (q^c, q^d; q)_k"
        " / ((q^2, q^a, -q^a; q^2)_k (q^(a-c+1), q^(a-d+1); q)_k) (-q^(-c-d))^k"
        " = (q^c+q^d)/q^(c+d) (q^(1+a), -q^(1-c), -q^(1-d), q^(a-c-d+1); q)_inf"
        " / (-q, q^(a-c+1), q^(a-d+1), -q^(-c-d); q)_inf",
        (Param("a"), Param("c"), Param("d"), Q),
        ("Re(c+d) < 0, or c or d a nonpositive integer (terminating)", "no poles in either side"),
        "|q^(-c-d)| < 1 unless terminating", False,
        _spec_lhs(_q4f3_spec), _q4f3_rhs, _q4f3_poles,
        ratio=lambda p: None if _q4f3_terminating(p) else abs(_qpow(p["q"], -p["c"] - p["d"])),
    ),
    Identity(
        "phi65limit", "b -> infinity limit of the very-well-poised 6phi5 summation",
        "sum_k (a, qa^(1/2), -qa^(1/2), c, d; q)_k / (q, a^(1/2), -a^(1/2), aq/c, aq/d; q)_k"
        " q^(k(k-1)/2) (-aq/(cd))^k = (aq, aq/(cd); q)_inf / (aq/c, aq/d; q)_inf",
        (Param("a", note="nonzero"), Param("c", note="nonzero"), Param("d", note="nonzero"), Q),
        ("a, c, d != 0", "no poles in (a; q^2)_k, (aq/c, aq/d; q)_k"),
        None, False, _spec_lhs(_phi65_spec), _phi65_rhs, _phi65_poles,
        nonzero=lambda p: [("a", p["a"]), ("c", p["c"]), ("d", p["d"])],
    ),
]

REGISTRY = {ident.id: ident for ident in _REGISTRY}
IDENTITY_IDS = tuple(REGISTRY)


def get(identity_id: str) -> Identity:
    try:
        return REGISTRY[identity_id]
    except KeyError:
        raise SchemaError(f"unknown identity {identity_id!r}; known: {', '.join(IDENTITY_IDS)}") from None


def describe(identity_id: str) -> dict:
    return get(identity_id).describe()


# ---------------------------------------------------------------- validation & evaluation

def _coerce(param: Param, value):
    if param.kind == "integer":
        if isinstance(value, bool):
            raise SchemaError(f"{param.name} must be an integer")
        if isinstance(value, int):
            return value
        z = to_complex(value)
        if z.imag != 0 or z.real != int(z.real):
            raise SchemaError(f"{param.name} must be an integer, got {value!r}")
        return int(z.real)
    try:
        return to_complex(value)
    except (ValueError, TypeError) as exc:
        raise SchemaError(f"{param.name}: {exc}") from None


def validate(case: IdentityCase, ctx: PrecisionContext) -> dict:
    """Check a case against its schema and return the coerced parameter dict.

    Raises SchemaError for unknown/missing/extra parameters, a base outside
    the unit disc, vanishing parameters and points within POLE_MARGIN *
    trunc_eps of a pole.  The convergence condition is not checked here; see
    :func:`in_convergence_domain`.
    """
    ident = get(case.id)
    names = set(ident.param_names)
    given = set(case.params)
    if given != names:
        missing, extra = sorted(names - given), sorted(given - names)
        msg = []
        if missing:
            msg.append(f"missing {', '.join(missing)}")
        if extra:
            msg.append(f"unexpected {', '.join(extra)}")
        raise SchemaError(f"{case.id}: " + "; ".join(msg))
    with ctx.work():
        p = {prm.name: _coerce(prm, case.params[prm.name]) for prm in ident.params}
        if "q" in p and not 0 < abs(p["q"]) < 1:
            raise SchemaError(f"{case.id}: need 0 < |q| < 1")
        if "n" in p and p["n"] < 0:
            raise SchemaError(f"{case.id}: n must be >= 0")
        tol = POLE_MARGIN * ctx.trunc_eps
        for label, v in ident.nonzero(p):
            if abs(v) < tol:
                raise DomainError(f"{case.id}: {label} must be nonzero")
        if ident.extra_check is not None:
            ident.extra_check(p, ctx)
        if case.id == "q4f3" and not _q4f3_terminating(p) and not (p["c"] + p["d"]).real < 0:
            raise SchemaError("q4f3: need Re(c+d) < 0 or a terminating c/d")
        for site in ident.poles(p):
            if _min_factor(site) < tol:
                raise DomainError(f"{case.id}: parameters sit on a pole of ({site.label}; .)")
    return p


def convergence_ratio(case: IdentityCase, ctx: PrecisionContext):
    """Modulus of the limiting term ratio, or None when the series always converges."""
    ident = get(case.id)
    if ident.ratio is None:
        return None
    p = validate(case, ctx)
    with ctx.work():
        return ident.ratio(p)


def in_convergence_domain(case: IdentityCase, ctx: PrecisionContext) -> bool:
    r = convergence_ratio(case, ctx)
    return r is None or r < 1


def eval_lhs(case: IdentityCase, ctx: PrecisionContext,
             max_terms: int = DEFAULT_MAX_TERMS) -> SeriesResult:
    p = validate(case, ctx)
    with ctx.work():
        return get(case.id).lhs(p, ctx, max_terms)


def eval_rhs(case: IdentityCase, ctx: PrecisionContext) -> mpc:
    p = validate(case, ctx)
    with ctx.work():
        return get(case.id).rhs(p, ctx)


def residual(case: IdentityCase, ctx: PrecisionContext) -> mpf:
    with ctx.work():
        return relative_error(eval_lhs(case, ctx).value, eval_rhs(case, ctx))


def lhs_spec(case: IdentityCase, ctx: PrecisionContext) -> SeriesSpec | None:
    """The SeriesSpec behind a Phi/Psi-shaped left side, or None for direct summand sums."""
    builders = {"seed3105": _seed_spec, "intermediate2phizzz": _zzz_spec, "thm1": _thm1_spec,
                "q4f3": _q4f3_spec, "phi65limit": _phi65_spec}
    p = validate(case, ctx)
    with ctx.work():
        if case.id in builders:
            return builders[case.id](p)
        if case.id in ("bilateralX", "thm2"):
            return _bilateral_spec(p["a"], p["s"], p["t"], _x_of(p), p["q"])
    return None

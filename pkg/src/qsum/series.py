"""Adaptive summation of unilateral and bilateral multibasic series.

A :class:`SeriesSpec` describes

    sum_k  prod_i (a_i;q)_k / prod_i (b_i;q)_k
           * prod_j [ prod (c_{j,.};q_j)_k / prod (d_{j,.};q_j)_k ]
           * z^k * p^(c k(k-1)/2)

where the unilateral form also divides by (q;q)_k.  Terms are produced by
multiplying the one-step ratio, so each term costs a handful of
multiplications regardless of k.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Iterator

from mpmath import mpc, mpf

from .arith import PrecisionContext, to_complex
from .errors import PoleError

DEFAULT_MAX_TERMS = 10_000
SMALL_RUN = 5
GROWTH_RUN = 10
GROWTH_START = 50


class Status(str, enum.Enum):
    CONVERGED = "Converged"
    MAX_TERMS = "MaxTermsExceeded"
    DIVERGING = "Diverging"
    POLE = "Pole"

    def __str__(self):
        return self.value


# worst-first ordering used when combining two branch statuses
_SEVERITY = {Status.CONVERGED: 0, Status.MAX_TERMS: 1, Status.DIVERGING: 2, Status.POLE: 3}


@dataclass(frozen=True)
class FactorGroup:
    base: mpc
    numerators: tuple = ()
    denominators: tuple = ()


@dataclass(frozen=True)
class SeriesSpec:
    base: mpc
    numerators: tuple = ()
    denominators: tuple = ()
    groups: tuple = ()
    argument: mpc = mpc(1)
    bilateral: bool = False
    # (p, c): extra factor p^(c k(k-1)/2)
    quadratic: tuple | None = None

    @classmethod
    def build(cls, base, numerators=(), denominators=(), groups=(), argument=1,
              bilateral=False, quadratic=None):
        """Coerce every parameter to ``mpc`` and validate the bases."""
        conv = lambda xs: tuple(to_complex(x) for x in xs)
        grps = tuple(
            FactorGroup(to_complex(g[0]), conv(g[1]), conv(g[2])) if not isinstance(g, FactorGroup)
            else FactorGroup(to_complex(g.base), conv(g.numerators), conv(g.denominators))
            for g in groups
        )
        quad = None if quadratic is None else (to_complex(quadratic[0]), int(quadratic[1]))
        spec = cls(to_complex(base), conv(numerators), conv(denominators), grps,
                   to_complex(argument), bool(bilateral), quad)
        for q in spec.bases():
            if not 0 < abs(q) < 1:
                raise ValueError("every base must have modulus in (0, 1)")
        return spec

    def bases(self):
        yield self.base
        for g in self.groups:
            yield g.base

    def linear_factors(self):
        """(numerator, denominator) lists of (value, base) pairs, (q;q)_k included for Phi."""
        num = [(v, self.base) for v in self.numerators]
        den = [(v, self.base) for v in self.denominators]
        if not self.bilateral:
            den.append((self.base, self.base))
        for g in self.groups:
            num.extend((v, g.base) for v in g.numerators)
            den.extend((v, g.base) for v in g.denominators)
        return num, den


@dataclass(frozen=True)
class SeriesResult:
    value: mpc
    terms_used: int
    status: Status
    tail_estimate: mpf = mpf(0)
    negative_terms: int = 0

    @property
    def converged(self) -> bool:
        return self.status is Status.CONVERGED


def _is_zero(x, ctx) -> bool:
    return abs(x) < ctx.trunc_eps


def poch_term(v, Q, k, ctx):
    """(v;Q)_k with vanishing factors reported as exact zeros (k >= 0) or poles (k < 0)."""
    out = mpc(1)
    if k >= 0:
        p = mpc(1)
        for _ in range(k):
            f = 1 - v * p
            if _is_zero(f, ctx):
                return mpc(0)
            out *= f
            p *= Q
        return out
    qinv = 1 / Q
    p = qinv
    for _ in range(-k):
        f = 1 - v * p
        if _is_zero(f, ctx):
            raise PoleError("negative-order Pochhammer has a vanishing factor")
        out *= f
        p *= qinv
    return 1 / out


def term_at(spec: SeriesSpec, k: int, ctx: PrecisionContext) -> mpc:
    """The k-th summand computed from scratch (no ratio recursion)."""
    if k < 0 and not spec.bilateral:
        raise ValueError("unilateral series have no negative-index terms")
    with ctx.work():
        num, den = spec.linear_factors()
        value = mpc(1)
        for v, Q in num:
            p = poch_term(v, Q, k, ctx)
            if p == 0:
                return mpc(0)
            value *= p
        for v, Q in den:
            try:
                p = poch_term(v, Q, k, ctx)
            except PoleError:
                # 1/(v;Q)_k vanishes for k < 0
                return mpc(0)
            if p == 0:
                raise PoleError(f"denominator Pochhammer vanishes at k = {k}")
            value /= p
        value *= spec.argument ** k
        if spec.quadratic is not None:
            pb, c = spec.quadratic
            value *= pb ** (c * k * (k - 1) // 2)
        return value


class _Terminated(Exception):
    pass


def _ratio_stepper(spec: SeriesSpec, ctx: PrecisionContext, direction: int):
    """Return a stateful ``step()`` yielding successive term ratios.

    Going up it returns term_{k+1}/term_k for k = 0, 1, ...; going down,
    term_{k-1}/term_k for k = 0, -1, ....

    Raises ``_Terminated`` when the next term and all after it are exactly zero.
    """
    num, den = spec.linear_factors()
    bases = []

    def slot(Q):
        for i, b in enumerate(bases):
            if b == Q:
                return i
        bases.append(Q)
        return len(bases) - 1

    num_idx = [(v, slot(Q)) for v, Q in num]
    den_idx = [(v, slot(Q)) for v, Q in den]
    quad_i = slot(spec.quadratic[0]) if spec.quadratic is not None else None
    quad_c = spec.quadratic[1] if spec.quadratic is not None else 0
    z = spec.argument
    if direction > 0:
        powers = [mpc(1) for _ in bases]          # Q^k, starting at k = 0
        mult = list(bases)
    else:
        mult = [1 / b for b in bases]
        powers = list(mult)                       # Q^(k-1), starting at k = 0

    def step():
        top = mpc(1)
        for v, i in num_idx:
            f = 1 - v * powers[i]
            if _is_zero(f, ctx):
                if direction > 0:
                    raise _Terminated
                raise PoleError("numerator Pochhammer of negative order has a pole")
            top *= f
        bottom = mpc(1)
        for v, i in den_idx:
            f = 1 - v * powers[i]
            if _is_zero(f, ctx):
                if direction > 0:
                    raise PoleError("denominator Pochhammer vanishes")
                raise _Terminated
            bottom *= f
        r = z * top / bottom
        if quad_i is not None:
            r *= powers[quad_i] ** quad_c
        for i, m in enumerate(mult):
            powers[i] *= m
        return r if direction > 0 else 1 / r

    return step


def _spec_terms(spec, ctx, direction) -> Iterator[mpc]:
    step = _ratio_stepper(spec, ctx, direction)
    t = mpc(1)
    if direction > 0:
        yield t
    while True:
        try:
            t = t * step()
        except _Terminated:
            return
        yield t


def sum_terms(terms: Iterator[mpc], ctx: PrecisionContext,
              max_terms: int = DEFAULT_MAX_TERMS) -> SeriesResult:
    """Sum a term stream under the adaptive stopping rule; exhaustion means an exact finite sum."""
    total = mpc(0)
    used = small = grow = 0
    prev = None
    for t in terms:
        total += t
        used += 1
        at = abs(t)
        scale = max(mpf(1), abs(total))
        small = small + 1 if at < ctx.trunc_eps * scale else 0
        if small >= SMALL_RUN:
            return SeriesResult(total, used, Status.CONVERGED, at / scale)
        if prev is not None and used > GROWTH_START and at > prev:
            grow += 1
            if grow >= GROWTH_RUN:
                return SeriesResult(total, used, Status.DIVERGING, at / scale)
        else:
            grow = 0
        prev = at
        if used >= max_terms:
            return SeriesResult(total, used, Status.MAX_TERMS, at / scale)
    # ran out of nonzero terms: exact (terminating) sum
    return SeriesResult(total, used, Status.CONVERGED, mpf(0))


def sum_unilateral(spec: SeriesSpec, ctx: PrecisionContext,
                   max_terms: int = DEFAULT_MAX_TERMS) -> SeriesResult:
    if spec.bilateral:
        raise ValueError("sum_unilateral needs a unilateral spec")
    with ctx.work():
        return sum_terms(_spec_terms(spec, ctx, +1), ctx, max_terms)


def _combine(pos: SeriesResult, neg: SeriesResult) -> SeriesResult:
    status = max(pos.status, neg.status, key=_SEVERITY.__getitem__)
    return SeriesResult(pos.value + neg.value, pos.terms_used + neg.terms_used, status,
                        max(pos.tail_estimate, neg.tail_estimate), neg.terms_used)


def sum_bilateral(spec: SeriesSpec, ctx: PrecisionContext,
                  max_terms: int = DEFAULT_MAX_TERMS) -> SeriesResult:
    """Sum k >= 0 and k <= -1 as two independent adaptive branches."""
    if not spec.bilateral:
        raise ValueError("sum_bilateral needs a bilateral spec")
    with ctx.work():
        pos = sum_terms(_spec_terms(spec, ctx, +1), ctx, max_terms)
        neg = sum_terms(_spec_terms(spec, ctx, -1), ctx, max_terms)
        return _combine(pos, neg)


def sum_series(spec: SeriesSpec, ctx: PrecisionContext,
               max_terms: int = DEFAULT_MAX_TERMS) -> SeriesResult:
    if spec.bilateral:
        return sum_bilateral(spec, ctx, max_terms)
    return sum_unilateral(spec, ctx, max_terms)


def sum_summand(summand: Callable[[int], mpc], ctx: PrecisionContext, bilateral: bool = True,
                max_terms: int = DEFAULT_MAX_TERMS) -> SeriesResult:
    """Adaptive sum of an explicit summand ``f(k)`` with the same stopping rule.

    For sums whose terms carry factors outside the Pochhammer schema, such as
    (1 - a^2 q^(4k)).
    """
    def upward():
        k = 0
        while True:
            yield summand(k)
            k += 1

    def downward():
        k = -1
        while True:
            yield summand(k)
            k -= 1

    with ctx.work():
        pos = sum_terms(upward(), ctx, max_terms)
        if not bilateral:
            return pos
        neg = sum_terms(downward(), ctx, max_terms)
        return _combine(pos, neg)

"""q-shifted factorials, the q-Gamma function and the classical Gamma function."""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
from mpmath import mpc, mpf

from .arith import PrecisionContext, to_complex
from .errors import PoleError

# Past this many direct factors the infinite product switches to the
# log-series tail (only reached for |q| close to 1).
DIRECT_FACTOR_LIMIT = 4000
# Modulus of a*q^i below which the log-series tail is used.
TAIL_SWITCH = mpf("0.5")


@dataclass(frozen=True)
class QPochResult:
    value: mpc
    factors_used: int = 0
    tail_bound: mpf = mpf(0)


def _check_base(q):
    aq = abs(q)
    if not 0 < aq < 1:
        raise ValueError(f"base must satisfy 0 < |q| < 1, got |q| = {mpmath.nstr(aq, 8)}")


def _is_infinite(n) -> bool:
    return n is None or (isinstance(n, float) and math.isinf(n)) or n == mpmath.inf


def qpoch_finite(a, q, n: int, ctx: PrecisionContext) -> QPochResult:
    """(a;q)_n for any integer n.

    Negative orders use ``(a;q)_{-m} = 1 / prod_{i=1..m} (1 - a q^{-i})``; a
    factor with modulus below ``trunc_eps`` is a pole.
    """
    if isinstance(n, bool) or not isinstance(n, int):
        raise TypeError(f"order must be an int, got {n!r}")
    with ctx.work():
        a, q = to_complex(a), to_complex(q)
        _check_base(q)
        prod = mpc(1)
        if n >= 0:
            p = mpc(1)
            for _ in range(n):
                prod *= 1 - a * p
                p *= q
            return QPochResult(+prod, n)
        qinv = 1 / q
        p = qinv
        for i in range(1, -n + 1):
            factor = 1 - a * p
            if abs(factor) < ctx.trunc_eps:
                raise PoleError(f"(a;q)_{n} has a pole: a*q^-{i} = 1")
            prod *= factor
            p *= qinv
        return QPochResult(1 / prod, -n)


def _log_tail(y, q, eps):
    """log prod_{i>=0} (1 - y q^i) for |y| <= 1/2 via -sum_k y^k / (k (1 - q^k))."""
    total = mpc(0)
    yk, qk = mpc(1), mpc(1)
    ay, aq = abs(y), abs(q)
    k = 0
    while True:
        k += 1
        yk *= y
        qk *= q
        total -= yk / (k * (1 - qk))
        bound = ay ** (k + 1) / ((k + 1) * (1 - aq) * (1 - ay))
        if bound < eps:
            return total, k, bound


def qpoch_infinite(a, q, ctx: PrecisionContext) -> QPochResult:
    """(a;q)_inf truncated where the geometric tail bound drops below ``trunc_eps``.

    When the direct product would need more than ``DIRECT_FACTOR_LIMIT``
    factors, the factors with |a q^i| <= 1/2 are summed as a log series
    instead; the reported ``tail_bound`` is then that series' remainder bound.
    """
    with ctx.work():
        a, q = to_complex(a), to_complex(q)
        _check_base(q)
        if a == 0:
            return QPochResult(mpc(1), 0, mpf(0))
        aa, aq = abs(a), abs(q)
        eps = ctx.trunc_eps
        # smallest N with |a| |q|^(N+1) / (1 - |q|) < eps
        n_direct = max(0, int(mpmath.ceil(mpmath.log(eps * (1 - aq) / aa) / mpmath.log(aq))))
        if n_direct <= DIRECT_FACTOR_LIMIT:
            prod, p = mpc(1), mpc(1)
            for _ in range(n_direct + 1):
                prod *= 1 - a * p
                p *= q
            bound = aa * aq ** (n_direct + 1) / (1 - aq)
            return QPochResult(+prod, n_direct + 1, bound)
        prod, y = mpc(1), a
        used = 0
        while abs(y) > TAIL_SWITCH:
            prod *= 1 - y
            y *= q
            used += 1
        log_tail, k, bound = _log_tail(y, q, eps)
        return QPochResult(prod * mpmath.exp(log_tail), used + k, bound)


def qpoch(a, q, n, ctx: PrecisionContext) -> mpc:
    """Value of (a;q)_n, with ``n=None`` or ``inf`` meaning the infinite product."""
    if _is_infinite(n):
        return qpoch_infinite(a, q, ctx).value
    return qpoch_finite(a, q, n, ctx).value


def qpoch_multi(args, q, n, ctx: PrecisionContext) -> mpc:
    """(a, b, ..., c; q)_n as the product of the single-argument symbols."""
    args = list(args)
    if not args:
        raise ValueError("qpoch_multi needs at least one argument")
    with ctx.work():
        out = mpc(1)
        for a in args:
            out *= qpoch(a, q, n, ctx)
        return out


def gamma_q(x, q, ctx: PrecisionContext) -> mpc:
    """(q;q)_inf / (q^x;q)_inf * (1-q)^(1-x) for real 0 < q < 1."""
    with ctx.work():
        x, q = to_complex(x), to_complex(q)
        if q.imag != 0 or not 0 < q.real < 1:
            raise ValueError("gamma_q needs a real base 0 < q < 1")
        qr = q.real
        logq = mpmath.log(qr)
        qx = mpmath.exp(x * logq)
        # only the factor with Re(x + i) nearest 0 can vanish
        i0 = int(mpmath.nint(-x.real))
        if i0 >= 0 and abs(1 - mpmath.exp((x + i0) * logq)) < ctx.trunc_eps:
            raise PoleError(f"gamma_q pole at x = {mpmath.nstr(x, 10)}")
        den = qpoch_infinite(qx, qr, ctx).value
        num = qpoch_infinite(qr, qr, ctx).value
        return num / den * mpmath.exp((1 - x) * mpmath.log(1 - qr))


def _nonpositive_integer_distance(x) -> mpf:
    r = mpmath.nint(x.real)
    if r > 0:
        return mpf("inf")
    return abs(x - r)


def gamma_classical(x, ctx: PrecisionContext) -> mpc:
    """Gamma(x) from the Stirling series after shifting Re(x) past the working digit count."""
    with ctx.work():
        x = to_complex(x)
        if _nonpositive_integer_distance(x) < ctx.trunc_eps:
            raise PoleError(f"Gamma pole at x = {mpmath.nstr(x, 10)}")
        wd = ctx.working_digits
        shift = max(0, int(mpmath.ceil(wd - x.real)))
        z = x + shift
        eps = mpf(10) ** (-wd - 5)
        s = (z - mpf(1) / 2) * mpmath.log(z) - z + mpmath.log(2 * mpmath.pi) / 2
        zinv = 1 / z
        zinv2 = zinv * zinv
        zpow = zinv
        k = 1
        while True:
            term = mpmath.bernoulli(2 * k) / (2 * k * (2 * k - 1)) * zpow
            s += term
            if abs(term) < eps:
                break
            zpow *= zinv2
            k += 1
        value = mpmath.exp(s)
        rising = mpc(1)
        for i in range(shift):
            rising *= x + i
        return value / rising

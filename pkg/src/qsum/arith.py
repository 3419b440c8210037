"""Arbitrary-precision complex scalars and tolerance-aware comparison.

Every scalar in the package is an ``mpmath.mpc``.  A :class:`PrecisionContext`
fixes the working precision together with the two thresholds that drive the
rest of the engine: ``trunc_eps`` (when to stop summing or multiplying) and
``cmp_tol`` (when two evaluations count as equal).
"""

from __future__ import annotations

import re
from contextlib import contextmanager
from dataclasses import dataclass

import mpmath
from mpmath import mpc, mpf

MIN_DIGITS = 20
DEFAULT_DIGITS = 50

# Extra decimal digits carried internally so that the results are at least
# as accurate as the nominal precision.
GUARD_DIGITS = 10

ComplexValue = mpc


@dataclass(frozen=True)
class PrecisionContext:
    digits: int
    trunc_eps: mpf
    cmp_tol: mpf

    def __post_init__(self):
        if not isinstance(self.digits, int) or self.digits < MIN_DIGITS:
            raise ValueError(f"digits must be an integer >= {MIN_DIGITS}, got {self.digits!r}")
        floor = mpf(10) ** (5 - self.digits)
        if self.trunc_eps < floor * (1 - mpf(10) ** -10):
            raise ValueError("trunc_eps below 10^(5-digits)")
        if self.cmp_tol < 10 * self.trunc_eps * (1 - mpf(10) ** -10):
            raise ValueError("cmp_tol must be at least 10 * trunc_eps")

    @property
    def working_digits(self) -> int:
        return self.digits + GUARD_DIGITS

    @contextmanager
    def work(self):
        """Run the enclosed block at this context's working precision."""
        with mpmath.workdps(self.working_digits):
            yield self


def make_context(digits: int = DEFAULT_DIGITS) -> PrecisionContext:
    if isinstance(digits, bool) or not isinstance(digits, int):
        raise TypeError("digits must be an int")
    if digits < MIN_DIGITS:
        raise ValueError(f"digits must be >= {MIN_DIGITS}, got {digits}")
    with mpmath.workdps(digits + GUARD_DIGITS):
        trunc_eps = mpf(10) ** (5 - digits)
        cmp_tol = mpf(10) ** (15 - digits)
    return PrecisionContext(digits, trunc_eps, cmp_tol)


_UNSIGNED = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_REAL_RE = re.compile(rf"^[+-]?{_UNSIGNED}$")
_IMAG_RE = re.compile(rf"^(?P<sign>[+-]?)(?P<mag>{_UNSIGNED})?[ij]$")
_FULL_RE = re.compile(rf"^(?P<re>[+-]?{_UNSIGNED})(?P<sign>[+-])(?P<mag>{_UNSIGNED})?[ij]$")


def _imag(sign: str, mag: str | None) -> mpf:
    v = mpf(mag) if mag else mpf(1)
    return -v if sign == "-" else v


def parse_complex(text: str) -> mpc:
    """Parse ``"0.2"``, ``"-1e-3+0.5i"``, ``"2i"`` at the current precision.

    Decimal strings are handed to mpmath directly so no digits are lost to
    binary floats.
    """
    s = text.strip().replace(" ", "")
    if _REAL_RE.match(s):
        return mpc(mpf(s), 0)
    m = _IMAG_RE.match(s)
    if m:
        return mpc(0, _imag(m["sign"], m["mag"]))
    m = _FULL_RE.match(s)
    if m:
        return mpc(mpf(m["re"]), _imag(m["sign"], m["mag"]))
    raise ValueError(f"malformed complex number: {text!r}")


def to_complex(x) -> mpc:
    if isinstance(x, str):
        return parse_complex(x)
    return mpmath.mpmathify(x) + mpc(0)


def relative_error(x, y) -> mpf:
    """``|x - y| / max(|x|, |y|, 1)``; symmetric and zero on identical input."""
    if x == y:
        return mpf(0)
    x, y = to_complex(x), to_complex(y)
    return abs(x - y) / max(abs(x), abs(y), mpf(1))


def approx_equal(x, y, ctx: PrecisionContext) -> bool:
    with ctx.work():
        return relative_error(x, y) <= ctx.cmp_tol


def is_real(z, tol=0) -> bool:
    return abs(mpmath.im(z)) <= tol


def format_value(z, digits: int) -> str:
    """Render a scalar with ``digits`` significant digits as ``re``, ``re+imi`` or ``re-imi``.

    The output is accepted by :func:`parse_complex`.
    """
    z = to_complex(z)
    re_part = mpmath.nstr(z.real, digits)
    if z.imag == 0:
        return re_part
    im_part = mpmath.nstr(abs(z.imag), digits)
    return f"{re_part}{'-' if z.imag < 0 else '+'}{im_part}i"

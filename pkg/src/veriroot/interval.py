"""Closed binary64 intervals with outward rounding.

Every operation returns an interval containing all point results of the
operation applied to members of its operands. Bounds come from the active
rounding backend (see :mod:`veriroot.rounding`); switch it with
:func:`set_backend` or the :func:`rounding_backend` context manager.
"""

from __future__ import annotations

import contextlib
import math
from enum import IntEnum

from . import rounding

__all__ = [
    "ContractError",
    "EMPTY",
    "Interval",
    "Sign",
    "WHOLE",
    "add",
    "add_down",
    "add_up",
    "contains",
    "contains_zero",
    "div",
    "div_down",
    "div_up",
    "hull",
    "intersect",
    "midpoint",
    "mul",
    "mul_down",
    "mul_up",
    "neg",
    "next_down",
    "next_up",
    "pow_int",
    "rounding_backend",
    "set_backend",
    "sign_of",
    "sqr",
    "sub",
    "width",
]

_INF = math.inf
_nextafter = math.nextafter


class ContractError(ValueError):
    """A caller broke an operation's precondition."""


class Sign(IntEnum):
    """Certified sign of a quantity; ``UNKNOWN`` means not certified."""

    NEG = -1
    UNKNOWN = 0
    POS = 1


def next_up(t: float) -> float:
    return _nextafter(t, _INF)


def next_down(t: float) -> float:
    return _nextafter(t, -_INF)


# Active backend primitives, rebound by set_backend().
_add_up = rounding.PORTABLE.add_up
_add_down = rounding.PORTABLE.add_down
_mul_up = rounding.PORTABLE.mul_up
_mul_down = rounding.PORTABLE.mul_down
_div_up = rounding.PORTABLE.div_up
_div_down = rounding.PORTABLE.div_down
_backend_name = "portable"


def set_backend(name: str) -> str:
    """Select the rounding backend process-wide; returns the previous name."""
    global _add_up, _add_down, _mul_up, _mul_down, _div_up, _div_down, _backend_name
    backend = rounding.get_backend(name)
    previous = _backend_name
    _add_up, _add_down = backend.add_up, backend.add_down
    _mul_up, _mul_down = backend.mul_up, backend.mul_down
    _div_up, _div_down = backend.div_up, backend.div_down
    _backend_name = backend.name
    return previous


def get_backend_name() -> str:
    return _backend_name


@contextlib.contextmanager
def rounding_backend(name: str):
    previous = set_backend(name)
    try:
        yield
    finally:
        set_backend(previous)


class Interval:
    """Closed interval ``[lo, hi]`` of doubles, possibly unbounded or empty.

    Construct a point interval with ``Interval(t)``. The empty interval is the
    singleton :data:`EMPTY`; test for it with :attr:`is_empty`.
    """

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi=None):
        lo = float(lo)
        hi = lo if hi is None else float(hi)
        if lo != lo or hi != hi:
            raise ValueError("interval bounds must not be NaN")
        if lo > hi:
            raise ValueError(f"empty bounds [{lo!r}, {hi!r}]; use EMPTY")
        if lo == _INF or hi == -_INF:
            raise ValueError("interval bounds must straddle the real line")
        self.lo = lo
        self.hi = hi

    @property
    def is_empty(self) -> bool:
        return self.lo > self.hi

    @property
    def is_bounded(self) -> bool:
        return -_INF < self.lo and self.hi < _INF

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    def width(self) -> float:
        return width(self)

    def midpoint(self) -> float:
        return midpoint(self)

    def contains(self, t) -> bool:
        return self.lo <= t <= self.hi

    def contains_zero(self) -> bool:
        return self.lo <= 0.0 <= self.hi

    def issubset(self, other: Interval) -> bool:
        if self.lo > self.hi:
            return True
        return other.lo <= self.lo and self.hi <= other.hi

    def intersect(self, other: Interval) -> Interval:
        return intersect(self, other)

    def hull(self, other: Interval) -> Interval:
        return hull(self, other)

    def __add__(self, other):
        return add(self, _coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return sub(self, _coerce(other))

    def __rsub__(self, other):
        return sub(_coerce(other), self)

    def __mul__(self, other):
        return mul(self, _coerce(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return div(self, _coerce(other))

    def __rtruediv__(self, other):
        return div(_coerce(other), self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, n):
        return pow_int(self, n)

    def __eq__(self, other):
        if not isinstance(other, Interval):
            return NotImplemented
        if self.lo > self.hi:
            return other.lo > other.hi
        return self.lo == other.lo and self.hi == other.hi

    def __hash__(self):
        if self.lo > self.hi:
            return hash("empty-interval")
        return hash((self.lo, self.hi))

    def __iter__(self):
        yield self.lo
        yield self.hi

    def __repr__(self):
        if self.lo > self.hi:
            return "Interval.EMPTY"
        return f"Interval({self.lo!r}, {self.hi!r})"

    def __reduce__(self):
        if self.lo > self.hi:
            return (_empty, ())
        return (Interval, (self.lo, self.hi))


def _make(lo: float, hi: float) -> Interval:
    iv = object.__new__(Interval)
    iv.lo = lo
    iv.hi = hi
    return iv


EMPTY = _make(_INF, -_INF)
WHOLE = _make(-_INF, _INF)
Interval.EMPTY = EMPTY
Interval.WHOLE = WHOLE


def _empty():
    return EMPTY


def _coerce(value) -> Interval:
    if isinstance(value, Interval):
        return value
    return Interval(value)


def sign_of(w: Interval) -> Sign:
    """Certified sign of every member of ``w``."""
    if w.lo > 0.0:
        return Sign.POS
    if w.hi < 0.0:
        return Sign.NEG
    return Sign.UNKNOWN


# --------------------------------------------------------------------------
# arithmetic


def add(a: Interval, b: Interval) -> Interval:
    if a.lo > a.hi or b.lo > b.hi:
        return EMPTY
    return _make(_add_down(a.lo, b.lo), _add_up(a.hi, b.hi))


def sub(a: Interval, b: Interval) -> Interval:
    if a.lo > a.hi or b.lo > b.hi:
        return EMPTY
    return _make(_add_down(a.lo, -b.hi), _add_up(a.hi, -b.lo))


def neg(a: Interval) -> Interval:
    if a.lo > a.hi:
        return EMPTY
    return _make(-a.hi, -a.lo)


def mul(a: Interval, b: Interval) -> Interval:
    al, ah, bl, bh = a.lo, a.hi, b.lo, b.hi
    if al > ah or bl > bh:
        return EMPTY
    if al >= 0.0:
        if bl >= 0.0:
            return _make(_mul_down(al, bl), _mul_up(ah, bh))
        if bh <= 0.0:
            return _make(_mul_down(ah, bl), _mul_up(al, bh))
        return _make(_mul_down(ah, bl), _mul_up(ah, bh))
    if ah <= 0.0:
        if bl >= 0.0:
            return _make(_mul_down(al, bh), _mul_up(ah, bl))
        if bh <= 0.0:
            return _make(_mul_down(ah, bh), _mul_up(al, bl))
        return _make(_mul_down(al, bh), _mul_up(al, bl))
    # 0 strictly inside a
    if bl >= 0.0:
        return _make(_mul_down(al, bh), _mul_up(ah, bh))
    if bh <= 0.0:
        return _make(_mul_down(ah, bl), _mul_up(al, bl))
    lo = min(_mul_down(al, bh), _mul_down(ah, bl))
    hi = max(_mul_up(al, bl), _mul_up(ah, bh))
    return _make(lo, hi)


def div(a: Interval, b: Interval) -> Interval:
    """Quotient; a divisor containing 0 yields the whole line."""
    al, ah, bl, bh = a.lo, a.hi, b.lo, b.hi
    if al > ah or bl > bh:
        return EMPTY
    if bl <= 0.0 <= bh:
        return WHOLE
    if bl > 0.0:
        if al >= 0.0:
            return _make(_div_down(al, bh), _div_up(ah, bl))
        if ah <= 0.0:
            return _make(_div_down(al, bl), _div_up(ah, bh))
        return _make(_div_down(al, bl), _div_up(ah, bl))
    if al >= 0.0:
        return _make(_div_down(ah, bh), _div_up(al, bl))
    if ah <= 0.0:
        return _make(_div_down(ah, bl), _div_up(al, bh))
    return _make(_div_down(ah, bh), _div_up(al, bh))


def _pow_up(t: float, n: int) -> float:
    # t >= 0
    r = t
    for _ in range(n - 1):
        r = _mul_up(r, t)
    return r


def _pow_down(t: float, n: int) -> float:
    r = t
    for _ in range(n - 1):
        r = _mul_down(r, t)
    return r


def pow_int(a: Interval, n: int) -> Interval:
    """``a**n`` for a nonnegative integer ``n``, sharp on sign-straddling ``a``."""
    if n < 0:
        raise ContractError("pow_int needs a nonnegative exponent")
    if a.lo > a.hi:
        return EMPTY
    if n == 0:
        return _make(1.0, 1.0)
    if n == 1:
        return a
    lo, hi = a.lo, a.hi
    if lo >= 0.0:
        return _make(_pow_down(lo, n), _pow_up(hi, n))
    if n % 2 == 0:
        if hi <= 0.0:
            return _make(_pow_down(-hi, n), _pow_up(-lo, n))
        return _make(0.0, _pow_up(max(-lo, hi), n))
    # odd power is increasing
    upper = _pow_up(hi, n) if hi >= 0.0 else -_pow_down(-hi, n)
    return _make(-_pow_up(-lo, n), upper)


def sqr(a: Interval) -> Interval:
    return pow_int(a, 2)


# --------------------------------------------------------------------------
# set operations


def intersect(a: Interval, b: Interval) -> Interval:
    lo = a.lo if a.lo > b.lo else b.lo
    hi = a.hi if a.hi < b.hi else b.hi
    if lo > hi:
        return EMPTY
    return _make(lo, hi)


def hull(a: Interval, b: Interval) -> Interval:
    if a.lo > a.hi:
        return b
    if b.lo > b.hi:
        return a
    return _make(min(a.lo, b.lo), max(a.hi, b.hi))


def width(a: Interval) -> float:
    """Upper bound on ``hi - lo``; 0 for the empty interval."""
    if a.lo > a.hi:
        return 0.0
    return _add_up(a.hi, -a.lo)


def midpoint(a: Interval) -> float:
    """A double inside ``a`` at or next to its exact midpoint."""
    lo, hi = a.lo, a.hi
    if lo > hi:
        raise ContractError("midpoint of the empty interval")
    if lo == -_INF or hi == _INF:
        raise ContractError("midpoint of an unbounded interval")
    m = 0.5 * lo + 0.5 * hi
    if m < lo:
        return lo
    if m > hi:
        return hi
    return m


def contains(a: Interval, t: float) -> bool:
    return a.lo <= t <= a.hi


def contains_zero(a: Interval) -> bool:
    return a.lo <= 0.0 <= a.hi


# --------------------------------------------------------------------------
# directed scalar ops through the active backend


def add_up(a: float, b: float) -> float:
    return _add_up(a, b)


def add_down(a: float, b: float) -> float:
    return _add_down(a, b)


def mul_up(a: float, b: float) -> float:
    return _mul_up(a, b)


def mul_down(a: float, b: float) -> float:
    return _mul_down(a, b)


def div_up(a: float, b: float) -> float:
    return _div_up(a, b)


def div_down(a: float, b: float) -> float:
    return _div_down(a, b)

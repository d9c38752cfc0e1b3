"""Directed rounding of binary64 arithmetic.

Two interchangeable backends compute ``op_up(a, b)`` (smallest double not
below the exact result) and ``op_down(a, b)`` (largest double not above it)
for ``+``, ``*`` and ``/``:

``portable``
    Default. Evaluates in round-to-nearest, recovers the sign of the rounding
    error with error-free transformations (TwoSum, Dekker's TwoProduct, the
    exact division residual) and moves one ulp outward only when the result
    was inexact in the wrong direction. Outside the range where those
    transformations are exact (near overflow, gradual underflow) the result
    is rounded from the exact rational value instead.

``hardware``
    Switches the FPU to round-upward around each single operation via
    ``fesetround`` and derives lower bounds from the negation identity
    ``down(a op b) = -up((-a) op b)``. The rounding mode never outlives one
    call, so nothing leaks to other code running in the same thread, and the
    mode is per-thread state on every supported platform.

Away from overflow both backends agree bit for bit; the test suite checks
this on random bit patterns.
"""

from __future__ import annotations

import ctypes
import ctypes.util
import math
import platform
import sys
from fractions import Fraction

__all__ = [
    "Backend",
    "PORTABLE",
    "available_backends",
    "get_backend",
    "hardware_backend",
]

_INF = math.inf
_MAX = sys.float_info.max
_nextafter = math.nextafter
_isfinite = math.isfinite

_SPLIT = 134217729.0  # 2**27 + 1
# Dekker splitting overflows above this magnitude.
_BIG = 2.0**995
# Below this product magnitude the TwoProduct error term may underflow.
_TINY = 2.0**-969
# Above this product magnitude the split partial products may overflow.
_HUGE = 2.0**1020


class Backend:
    """A named bundle of directed-rounding primitives."""

    def __init__(self, name, add_up, add_down, mul_up, mul_down, div_up, div_down):
        self.name = name
        self.add_up = add_up
        self.add_down = add_down
        self.mul_up = mul_up
        self.mul_down = mul_down
        self.div_up = div_up
        self.div_down = div_down

    def __repr__(self):
        return f"Backend({self.name!r})"


# --------------------------------------------------------------------------
# portable backend


def _add_special(s, a, b, up):
    if s != s:
        # inf + (-inf): no information
        return _INF if up else -_INF
    if _isfinite(a) and _isfinite(b):
        # finite operands overflowed
        if up and s == -_INF:
            return -_MAX
        if not up and s == _INF:
            return _MAX
    return s


def _p_add_up(a, b):
    s = a + b
    if s - s == 0.0:
        bb = s - a
        if (a - (s - bb)) + (b - bb) > 0.0:
            return _nextafter(s, _INF)
        return s
    return _add_special(s, a, b, True)


def _p_add_down(a, b):
    s = a + b
    if s - s == 0.0:
        bb = s - a
        if (a - (s - bb)) + (b - bb) < 0.0:
            return _nextafter(s, -_INF)
        return s
    return _add_special(s, a, b, False)


def _round_exact(exact: Fraction, up: bool) -> float:
    """Directed rounding of a rational; slow, only for the edges of the range."""
    try:
        r = float(exact)  # correctly rounded to nearest
    except OverflowError:
        if exact > 0:
            return _INF if up else _MAX
        return -_MAX if up else -_INF
    fr = Fraction(r)
    if fr == exact:
        return r
    if up:
        return r if fr > exact else _nextafter(r, _INF)
    return r if fr < exact else _nextafter(r, -_INF)


def _prod_error(a, b, p):
    """Exact ``a*b - p`` for ``p = fl(a*b)`` inside the safe range."""
    c = _SPLIT * a
    ah = c - (c - a)
    al = a - ah
    c = _SPLIT * b
    bh = c - (c - b)
    bl = b - bh
    return ((ah * bh - p) + ah * bl + al * bh) + al * bl


def _mul_special(p, a, b, up):
    if a == 0.0 or b == 0.0:
        # 0 * inf is taken as 0: interval bounds treat 0 as exact
        return 0.0
    if _isfinite(a) and _isfinite(b):
        if up and p == -_INF:
            return -_MAX
        if not up and p == _INF:
            return _MAX
    return p


def _p_mul_up(a, b):
    p = a * b
    if p - p == 0.0:
        if a == 0.0 or b == 0.0:
            return 0.0
        if _TINY < abs(p) < _HUGE and abs(a) < _BIG and abs(b) < _BIG:
            if _prod_error(a, b, p) > 0.0:
                return _nextafter(p, _INF)
            return p
        return _round_exact(Fraction(a) * Fraction(b), True)
    return _mul_special(p, a, b, True)


def _p_mul_down(a, b):
    p = a * b
    if p - p == 0.0:
        if a == 0.0 or b == 0.0:
            return 0.0
        if _TINY < abs(p) < _HUGE and abs(a) < _BIG and abs(b) < _BIG:
            if _prod_error(a, b, p) < 0.0:
                return _nextafter(p, -_INF)
            return p
        return _round_exact(Fraction(a) * Fraction(b), False)
    return _mul_special(p, a, b, False)


def _div_error_sign(a, b, q):
    """Sign of ``a/b - q`` (exact quotient minus computed), or None if unsure."""
    aq = abs(q)
    if not (_TINY < aq < _BIG and abs(b) < _BIG and _TINY < abs(a) < _HUGE):
        return None
    p = q * b
    r = (a - p) - _prod_error(q, b, p)
    if r == 0.0:
        return 0
    return 1 if (r > 0.0) == (b > 0.0) else -1


def _div_special(q, a, b, up):
    if a == 0.0:
        return 0.0
    if not _isfinite(b):
        if _isfinite(a):
            return 0.0
        return _INF if up else -_INF
    if _isfinite(a):
        if up and q == -_INF:
            return -_MAX
        if not up and q == _INF:
            return _MAX
    return q


def _p_div_up(a, b):
    q = a / b
    if q - q == 0.0 and _isfinite(b):
        if a == 0.0:
            return 0.0
        s = _div_error_sign(a, b, q)
        if s is None:
            return _round_exact(Fraction(a) / Fraction(b), True)
        if s > 0:
            return _nextafter(q, _INF)
        return q
    return _div_special(q, a, b, True)


def _p_div_down(a, b):
    q = a / b
    if q - q == 0.0 and _isfinite(b):
        if a == 0.0:
            return 0.0
        s = _div_error_sign(a, b, q)
        if s is None:
            return _round_exact(Fraction(a) / Fraction(b), False)
        if s < 0:
            return _nextafter(q, -_INF)
        return q
    return _div_special(q, a, b, False)


PORTABLE = Backend(
    "portable", _p_add_up, _p_add_down, _p_mul_up, _p_mul_down, _p_div_up, _p_div_down
)


# --------------------------------------------------------------------------
# hardware backend

_FE_CONSTANTS = {
    # machine: (FE_TONEAREST, FE_UPWARD)
    "x86_64": (0x000, 0x800),
    "amd64": (0x000, 0x800),
    "i386": (0x000, 0x800),
    "i686": (0x000, 0x800),
    "aarch64": (0x000, 0x400000),
    "arm64": (0x000, 0x400000),
}

_hardware = None


def _load_hardware():
    consts = _FE_CONSTANTS.get(platform.machine().lower())
    if consts is None:
        return None
    name = ctypes.util.find_library("m")
    try:
        libm = ctypes.CDLL(name)
        fesetround = libm.fesetround
    except (OSError, AttributeError, TypeError):
        return None
    fesetround.argtypes = [ctypes.c_int]
    fesetround.restype = ctypes.c_int
    nearest, upward = consts

    def add_up(a, b):
        fesetround(upward)
        r = a + b
        fesetround(nearest)
        return r

    def add_down(a, b):
        fesetround(upward)
        r = (-a) + (-b)
        fesetround(nearest)
        return -r

    def mul_up(a, b):
        if a == 0.0 or b == 0.0:
            return 0.0
        fesetround(upward)
        r = a * b
        fesetround(nearest)
        return r

    def mul_down(a, b):
        if a == 0.0 or b == 0.0:
            return 0.0
        fesetround(upward)
        r = (-a) * b
        fesetround(nearest)
        return -r

    def div_up(a, b):
        if a == 0.0:
            return 0.0
        fesetround(upward)
        r = a / b
        fesetround(nearest)
        return r

    def div_down(a, b):
        if a == 0.0:
            return 0.0
        fesetround(upward)
        r = (-a) / b
        fesetround(nearest)
        return -r

    # sanity probe: 1/3 must differ between the two directions
    if div_up(1.0, 3.0) == div_down(1.0, 3.0):
        return None
    return Backend("hardware", add_up, add_down, mul_up, mul_down, div_up, div_down)


def hardware_backend():
    """The round-upward FPU backend, or None when the platform lacks it."""
    global _hardware
    if _hardware is None:
        _hardware = _load_hardware() or False
    return _hardware or None


def available_backends():
    names = ["portable"]
    if hardware_backend() is not None:
        names.append("hardware")
    return names


def get_backend(name):
    if name == "portable":
        return PORTABLE
    if name == "hardware":
        backend = hardware_backend()
        if backend is None:
            raise ValueError("hardware rounding control is not available here")
        return backend
    raise ValueError(f"unknown rounding backend {name!r}")

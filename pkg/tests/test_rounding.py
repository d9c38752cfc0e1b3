import math
import random
import struct
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from veriroot import rounding
from veriroot.rounding import PORTABLE, get_backend, hardware_backend

HW = hardware_backend()
needs_hw = pytest.mark.skipif(HW is None, reason="no rounding-mode control here")

doubles = st.floats(allow_nan=False, allow_infinity=False)

OPS = [
    ("add_up", "add_down", lambda a, b: Fraction(a) + Fraction(b)),
    ("mul_up", "mul_down", lambda a, b: Fraction(a) * Fraction(b)),
    ("div_up", "div_down", lambda a, b: Fraction(a) / Fraction(b)),
]


def _random_double(rng):
    # mix of bit-pattern draws (covers subnormals and huge values) and tame ones
    if rng.random() < 0.5:
        while True:
            t = struct.unpack("<d", struct.pack("<Q", rng.getrandbits(64)))[0]
            if math.isfinite(t):
                return t
    return rng.uniform(-1, 1) * 2.0 ** rng.randint(-60, 60)


def _check_directed(up, down, exact, a, b):
    if exact is None:
        return
    u, d = up(a, b), down(a, b)
    if math.isfinite(u):
        assert Fraction(u) >= exact
        below = math.nextafter(u, -math.inf)
        assert not math.isfinite(below) or Fraction(below) < exact
    if math.isfinite(d):
        assert Fraction(d) <= exact
        above = math.nextafter(d, math.inf)
        assert not math.isfinite(above) or Fraction(above) > exact


@pytest.mark.parametrize("up,down,fn", OPS)
@given(a=doubles, b=doubles)
def test_portable_tight_and_safe(up, down, fn, a, b):
    if fn is OPS[2][2] and b == 0.0:
        return
    _check_directed(getattr(PORTABLE, up), getattr(PORTABLE, down), fn(a, b), a, b)


@needs_hw
@pytest.mark.parametrize("up,down,fn", OPS)
def test_backends_agree_bitwise(up, down, fn):
    rng = random.Random(11)
    pu, pd = getattr(PORTABLE, up), getattr(PORTABLE, down)
    hu, hd = getattr(HW, up), getattr(HW, down)
    for _ in range(40_000):
        a, b = _random_double(rng), _random_double(rng)
        if up == "div_up" and b == 0.0:
            continue
        ru, rd = pu(a, b), pd(a, b)
        if math.isfinite(ru) and abs(ru) < 1.7976931348623157e308:
            assert ru == hu(a, b), (up, a, b)
        if math.isfinite(rd) and abs(rd) < 1.7976931348623157e308:
            assert rd == hd(a, b), (down, a, b)


@needs_hw
def test_hardware_mode_does_not_leak():
    HW.div_up(1.0, 3.0)
    assert 1.0 / 3.0 == float(Fraction(1, 3))
    assert 0.1 + 0.2 == 0.30000000000000004


def test_overflow_saturates():
    big = 1.7976931348623157e308
    assert PORTABLE.add_down(big, big) == big
    assert PORTABLE.add_up(big, big) == math.inf
    assert PORTABLE.mul_down(big, 2.0) == big
    assert PORTABLE.mul_up(-big, 2.0) == -big


def test_zero_times_infinity_is_zero():
    assert PORTABLE.mul_up(0.0, math.inf) == 0.0
    assert PORTABLE.mul_down(math.inf, 0.0) == 0.0


def test_registry():
    assert "portable" in rounding.available_backends()
    assert get_backend("portable") is PORTABLE
    with pytest.raises(ValueError):
        get_backend("bogus")

import math
import random
from fractions import Fraction

import pytest
from gmpy2 import mpq
from hypothesis import given
from hypothesis import strategies as st

from veriroot import expr as ex
from veriroot import interval as ia
from veriroot.expr import (
    ExprSyntaxError,
    centered_form,
    derivative,
    eval_interval,
    eval_point,
    eval_slope,
    parse,
)
from veriroot.interval import Interval

from _oracle import Undefined, compile_exact, contains, q, random_expr

WILK = "(x-1)*(x-2)*(x-3)*(x-4)*(x-5)"


def ulp(v):
    return math.ulp(v)


# -- parsing ------------------------------------------------------------------


def test_parse_wilkinson_is_five_factor_product():
    f = parse(WILK)
    factors = []
    node = f
    while isinstance(node, ex.Mul):
        factors.append(node.b)
        node = node.a
    factors.append(node)
    assert len(factors) == 5
    assert all(isinstance(s, ex.Sub) and isinstance(s.a, ex.Var) for s in factors)
    assert sorted(s.b.value for s in factors) == [1, 2, 3, 4, 5]


def test_parse_variable():
    assert isinstance(parse("x"), ex.Var)
    assert isinstance(parse("  ( x ) "), ex.Var)


@pytest.mark.parametrize(
    "text,offset",
    [("x^", 2), ("", 0), ("x +", 3), ("(x", 2), ("x)", 1), ("x^-1", 2), ("2x", 1), ("x $ 1", 2)],
)
def test_syntax_errors_carry_offset(text, offset):
    with pytest.raises(ExprSyntaxError) as info:
        parse(text)
    assert info.value.position == offset
    assert isinstance(info.value, SyntaxError)


def test_chained_power_rejected():
    with pytest.raises(ExprSyntaxError):
        parse("x^2^3")
    assert parse("(x^2)^3").to_text() == "((x)^2)^3"


def test_unary_minus_binds_looser_than_power():
    f = parse("-x^2")
    assert eval_point(f, 3.0) == Interval(-9.0)
    assert eval_point(parse("-2^2"), 0.0) == Interval(-4.0)


def test_decimal_literals_are_exact():
    c = parse("0.1")
    assert c.value == Fraction(1, 10)
    w = eval_point(c, 0.0)
    assert w.lo < w.hi and q(w.lo) < mpq(1, 10) < q(w.hi)
    assert parse("1e-3").value == Fraction(1, 1000)
    assert eval_point(parse("0.5"), 0.0) == Interval(0.5)


@given(st.integers(0, 10_000))
def test_text_round_trip(seed):
    f = random_expr(random.Random(seed), depth=4)
    g = parse(f.to_text())
    assert g.to_text() == f.to_text()
    assert g == f


# -- derivative ---------------------------------------------------------------


def test_derivative_of_square_is_two_x():
    d = derivative(parse("x^2"))
    assert isinstance(d, ex.Mul)
    assert isinstance(d.a, ex.Const) and d.a.value == 2
    assert isinstance(d.b, ex.Var)


def test_derivative_wilkinson_at_one():
    w = eval_point(derivative(parse(WILK)), 1.0)
    assert w.contains(24.0)
    assert ia.width(w) <= 16 * ulp(24.0)


def test_derivative_constant_and_linear():
    assert derivative(parse("7")).to_text() == "0"
    assert derivative(parse("3*x+1")).to_text() == "3"


def test_derivative_finite_difference():
    rng = random.Random(5)
    h = 2.0**-20
    for _ in range(400):
        f = random_expr(rng, depth=3, allow_div=False)
        fe = compile_exact(f)
        d = derivative(f)
        t = rng.uniform(-2, 2)
        fd = (fe(q(t) + mpq(h)) - fe(q(t))) / mpq(h)
        # widened enclosure on [t, t+h]; the mean value theorem puts the quotient inside
        enc = eval_interval(d, Interval(t, t + h))
        assert contains(enc, fd)


# -- extensions ---------------------------------------------------------------


def test_square_minus_two_on_one_two():
    w = eval_interval(parse("x^2-2"), Interval(1, 2))
    assert w.lo <= -1 and w.hi >= 2
    assert w.lo >= -1 - ulp(1.0) and w.hi <= 2 + ulp(2.0)


def test_identity_extension_is_exact():
    for a, b in [(0.1, 0.7), (-3.5, 2.25), (1e-300, 1e300)]:
        assert eval_interval(ex.X, Interval(a, b)) == Interval(a, b)
        assert eval_point(ex.X, a) == Interval(a)


def test_quadratic_range_contained():
    w = eval_interval(parse("(x-1)*(x-2)"), Interval(0, 3))
    assert w.lo <= -0.25 and w.hi >= 2


def test_point_eval_narrow():
    w = eval_point(parse("x^2-2"), 1.0)
    assert w.contains(-1.0) and ia.width(w) <= 2 * ulp(1.0)


def test_point_eval_wilkinson_root():
    w = eval_point(parse(WILK), 3.0)
    assert w.contains(0.0)
    assert ia.width(w) <= 16 * ulp(24.0)


def test_division_by_zero_box_gives_whole_line():
    assert eval_interval(parse("1/x"), Interval(-1, 1)) == ia.WHOLE


@given(st.integers(0, 2**32), st.floats(-4, 4), st.sampled_from([0.0, 1e-9, 1e-3, 0.5, 3.0]), st.floats(0, 1))
def test_extension_contains_oracle(seed, a, wid, u):
    f = random_expr(random.Random(seed), depth=4)
    x = Interval(a, a + wid)
    t = min(max(a + u * wid, x.lo), x.hi)
    try:
        v = compile_exact(f)(q(t))
    except Undefined:
        return
    assert contains(eval_interval(f, x), v)
    assert contains(eval_point(f, t), v)


# -- slopes and the centered form ---------------------------------------------


def test_slope_of_square_is_sharp():
    sp = eval_slope(parse("x^2"), 0.0, Interval(-1, 1))
    assert sp.slope == Interval(-1, 1)
    assert sp.value_at_center == Interval(0.0)
    assert eval_interval(derivative(parse("x^2")), Interval(-1, 1)) == Interval(-2, 2)


@pytest.mark.parametrize("c,x", [(0.0, (-1, 1)), (5.0, (2, 9)), (-0.25, (-0.25, 0.75))])
def test_slope_of_linear_is_constant(c, x):
    sp = eval_slope(parse("3*x+7"), c, Interval(*x))
    assert sp.slope == Interval(3.0)


def test_slope_contains_divided_differences_cubic():
    rng = random.Random(17)
    n = 0
    while n < 100_000:
        coeffs = [rng.randint(-9, 9) for _ in range(4)]
        f = parse("(((%d)*x+(%d))*x+(%d))*x+(%d)" % tuple(coeffs))
        fe = compile_exact(f)
        a = rng.uniform(-3, 3)
        x = Interval(a, a + rng.choice([1e-6, 0.1, 1.0, 4.0]))
        c = x.lo + (x.hi - x.lo) * rng.random()
        c = min(max(c, x.lo), x.hi)
        s = eval_slope(f, c, x).slope
        fc = fe(q(c))
        for _ in range(50):
            t = x.lo + (x.hi - x.lo) * rng.random()
            if t == c or not x.contains(t):
                continue
            assert contains(s, (fe(q(t)) - fc) / (q(t) - q(c)))
            n += 1


def test_slope_meets_derivative():
    rng = random.Random(3)
    for _ in range(2000):
        f = random_expr(rng, depth=4, allow_div=False)
        a = rng.uniform(-3, 3)
        x = Interval(a, a + rng.random())
        c = ia.midpoint(x)
        s = eval_slope(f, c, x).slope
        d = eval_interval(derivative(f), x)
        assert not ia.intersect(s, d).is_empty


def test_centered_narrower_on_small_box():
    f = parse("x^2")
    x = Interval(0.9, 1.1)
    cf = centered_form(f, ia.midpoint(x), x)
    assert ia.width(cf) <= ia.width(eval_interval(f, x))
    assert cf.lo <= 0.81 and cf.hi >= 1.21


def test_centered_degenerate_box_is_point_value():
    f = parse("x^3-2*x+0.1")
    assert centered_form(f, 1.5, Interval(1.5)) == eval_point(f, 1.5)


def test_centered_wilkinson_near_three():
    f = parse(WILK)
    x = Interval(2.9, 3.1)
    cf = centered_form(f, 3.0, x)
    nat = eval_interval(f, x)
    assert cf.issubset(nat)
    fe = compile_exact(f)
    # the range on this box, sampled on a fine grid, lies inside
    for k in range(2001):
        t = 2.9 + 0.2 * k / 2000
        t = min(max(t, 2.9), 3.1)
        assert contains(cf, fe(q(t)))


def test_centered_contains_oracle_fuzz():
    rng = random.Random(23)
    for _ in range(100_000 // 20):
        f = random_expr(rng, depth=3)
        fe = compile_exact(f)
        a = rng.uniform(-3, 3)
        x = Interval(a, a + rng.choice([1e-6, 0.01, 0.5, 2.0]))
        c = ia.midpoint(x)
        cf = centered_form(f, c, x)
        for _ in range(20):
            t = min(max(x.lo + (x.hi - x.lo) * rng.random(), x.lo), x.hi)
            try:
                v = fe(q(t))
            except Undefined:
                continue
            assert contains(cf, v)

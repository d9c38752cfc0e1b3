import math
import random
from fractions import Fraction as F

import pytest
from gmpy2 import mpq
from hypothesis import given
from hypothesis import strategies as st

from veriroot.expr import derivative, eval_float, parse
from veriroot.interval import EMPTY, Interval
from veriroot.point_newton import (
    SecantState,
    corrected_step,
    exact_newton,
    modified_step,
    newton_bracket,
)

from _oracle import compile_exact


def test_modified_step_plain_newton():
    assert modified_step(0.0, -1.0, 1.0, 0.0) == 1.0


def test_modified_step_concave_correction():
    assert modified_step(0.0, -1.0, 1.0, -0.5) == 1.5


@given(st.floats(0.01, 10), st.floats(-10, -1e-3), st.floats(0.1, 10), st.floats(0, 10))
def test_modified_step_convex_is_plain(t, w, d, h):
    assert modified_step(t, w, d, h) == t - w / d


@given(st.floats(-10, -1e-3), st.floats(0.1, 10), st.floats(-10, 10))
def test_corrected_step_matches_normalized_form(w, d, h):
    # same geometry seen from the mirrored frame t -> -t
    assert corrected_step(w, d, h) == pytest.approx(modified_step(0.0, w, d, h))
    assert corrected_step(-w, d, -h) == pytest.approx(-modified_step(0.0, w, d, h))


def test_secant_state_updates_only_on_distinct_points():
    s = SecantState()
    s.update(1.0, 2.0)
    assert s.h == 0.0
    s.update(1.0, 5.0)
    assert s.h == 0.0
    s.update(2.0, 3.0)
    assert s.h == (5.0 - 3.0) / (1.0 - 2.0)
    assert (s.d, s.t_d) == (3.0, 2.0)


def test_sqrt_two():
    r = exact_newton(Interval(1, 2), parse("x^2-2"), 1e-12, 0.0)
    assert r.contains(1.4142135623730951)
    assert r.hi - r.lo <= 1e-12
    # bracket check with exact arithmetic: f(lo) <= 0 <= f(hi)
    assert mpq(r.lo) ** 2 <= 2 <= mpq(r.hi) ** 2


def test_linear_converges_at_once():
    res = newton_bracket(Interval(-1, 1), lambda t: t, lambda t: 1.0, 1e-12, 0.0)
    assert res.converged and res.iterations <= 3
    assert res.interval().contains(0.0)


def test_no_sign_change_is_empty():
    assert exact_newton(Interval(1, 2), parse("x^2+1"), 1e-9, 0.0) is EMPTY
    assert exact_newton(Interval(-3, -2), parse("x"), 1e-9, 0.0) is EMPTY


def test_callable_needs_derivative():
    with pytest.raises(TypeError):
        exact_newton(Interval(0, 1), lambda t: t, 1e-9, 0.0)


def test_tau_w_stops_early():
    res = newton_bracket(Interval(0, 2), lambda t: t - 1, lambda t: 1.0, 1e-15, 10.0)
    assert res.iterations == 0 and (res.lo, res.hi) == (0, 2)


def _alternates(ws):
    return all((a > 0) != (b > 0) for a, b in zip(ws, ws[1:]))


@pytest.mark.parametrize(
    "f,df,lo,hi",
    [
        (lambda t: t * t - 2, lambda t: 2 * t, F(1), F(2)),
        (lambda t: -((t - 2) ** 2) + 2, lambda t: -2 * (t - 2), F(0), F(2)),
        (lambda t: 3 * t * t + t - 1, lambda t: 6 * t + 1, F(0), F(1)),
    ],
    ids=["convex", "concave", "convex-offset"],
)
def test_alternation_and_quadratic_rate(f, df, lo, hi):
    res = newton_bracket(None, f, df, F(1, 10**60), 0, lo=lo, hi=hi)
    assert res.converged
    ws = [w for kind, _, w in res.trace if kind == "newton"][-5:]
    assert len(ws) == 5 and _alternates(ws)
    ratios = [abs(b) / a**2 for a, b in zip(ws, ws[1:])]
    assert max(ratios) <= 10 * min(ratios)


def _random_cubic(rng):
    roots = sorted(rng.uniform(-3, 3) for _ in range(3))
    lead = rng.choice([-1, 1]) * rng.uniform(0.5, 3)
    c = [F(lead)]
    for r in roots:
        r = F(r)
        c = [a - r * b for a, b in zip([F(0)] + c, c + [F(0)])]
    # c is ascending: c[k] multiplies x^k
    text = "+".join(f"({float(v)!r})*x^{k}" for k, v in enumerate(c))
    return parse(text)


def test_termination_bound_on_cubics():
    rng = random.Random(41)
    runs = 0
    while runs < 2000:
        f = _random_cubic(rng)
        df = derivative(f)
        a = rng.uniform(-4, 3)
        x = Interval(a, a + rng.uniform(0.1, 4))
        fl = lambda t: eval_float(f, t)  # noqa: E731
        dfl = lambda t: eval_float(df, t)  # noqa: E731
        wl, wh = fl(x.lo), fl(x.hi)
        if wl == 0 or wh == 0 or (wl > 0) == (wh > 0):
            continue
        if wl > 0:
            fl, dfl = (lambda t, g=fl: -g(t)), (lambda t, g=dfl: -g(t))
        tau_x = 10.0 ** -rng.randint(3, 12)
        res = newton_bracket(x, fl, dfl, tau_x, 0.0)
        runs += 1
        bound = 2 * math.log2((x.hi - x.lo) / tau_x) + 60
        assert res.converged and res.iterations <= bound
        assert res.w_lo <= 0 <= res.w_hi
        assert res.hi - res.lo < tau_x


def test_bracket_contains_dyadic_roots():
    # dyadic roots keep the floating-point evaluation exact near the root
    rng = random.Random(8)
    for _ in range(500):
        r = F(rng.randint(-250, 250), 64)
        f = parse(f"(x-({float(r)!r}))*(x^2+1)")
        res = exact_newton(Interval(-4, 4), f, 1e-10, 0.0)
        fe = compile_exact(f)
        assert fe(mpq(res.lo)) <= 0 <= fe(mpq(res.hi))
        assert res.contains(float(r))

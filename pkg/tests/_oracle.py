"""Exact rational reference evaluation and random expression generators.

Kept independent of the package internals: expressions are walked through
their public node attributes and evaluated with gmpy2 rationals.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction

from gmpy2 import mpq

from veriroot import expr as ex


class Undefined(Exception):
    pass


def compile_exact(f):
    """Closure computing f(t) exactly for a rational t; raises Undefined on x/0."""
    if isinstance(f, ex.Const):
        v = mpq(f.value.numerator, f.value.denominator)
        return lambda t: v
    if isinstance(f, ex.Var):
        return lambda t: t
    if isinstance(f, ex.Neg):
        a = compile_exact(f.a)
        return lambda t: -a(t)
    if isinstance(f, ex.Pow):
        a = compile_exact(f.a)
        n = f.n
        return lambda t: a(t) ** n
    a, b = compile_exact(f.a), compile_exact(f.b)
    if isinstance(f, ex.Add):
        return lambda t: a(t) + b(t)
    if isinstance(f, ex.Sub):
        return lambda t: a(t) - b(t)
    if isinstance(f, ex.Mul):
        return lambda t: a(t) * b(t)
    if isinstance(f, ex.Div):

        def div(t):
            den = b(t)
            if den == 0:
                raise Undefined
            return a(t) / den

        return div
    raise TypeError(f)


def exact(f, t):
    return compile_exact(f)(mpq(t) if not isinstance(t, Fraction) else mpq(t.numerator, t.denominator))


def q(t: float):
    return mpq(t)


def contains(iv, v) -> bool:
    """Does the float interval ``iv`` hold the rational ``v``?"""
    if iv.is_empty:
        return False
    lo_ok = iv.lo == -math.inf or q(iv.lo) <= v
    hi_ok = iv.hi == math.inf or v <= q(iv.hi)
    return lo_ok and hi_ok


_LITERALS = ["0.5", "1", "2", "3", "0.1", "1.5", "0.25", "7", "10", "0.3"]


def random_expr(rng: random.Random, depth: int = 3, allow_div: bool = True):
    """Random polynomial/rational expression tree over x."""
    if depth == 0 or rng.random() < 0.25:
        if rng.random() < 0.6:
            return ex.X
        lit = rng.choice(_LITERALS)
        return ex.Const(("-" if rng.random() < 0.3 else "") + lit)
    kind = rng.random()
    a = random_expr(rng, depth - 1, allow_div)
    if kind < 0.1:
        return ex.Neg(a)
    if kind < 0.25:
        return ex.Pow(a, rng.randint(0, 4))
    b = random_expr(rng, depth - 1, allow_div)
    if kind < 0.5:
        return ex.Add(a, b)
    if kind < 0.65:
        return ex.Sub(a, b)
    if kind < 0.9 or not allow_div:
        return ex.Mul(a, b)
    return ex.Div(a, b)


def random_box(rng: random.Random, scale: float = 4.0):
    a = rng.uniform(-scale, scale)
    b = a + rng.choice([1e-9, 1e-4, 0.01, 0.5, 2.0]) * rng.random()
    return a, b


def poly_from_roots(roots, lead=1):
    """Expanded integer/rational coefficients (ascending) of lead*prod(x - r)."""
    coeffs = [Fraction(lead)]
    for r in roots:
        r = Fraction(r)
        out = [Fraction(0)] * (len(coeffs) + 1)
        for k, c in enumerate(coeffs):
            out[k + 1] += c
            out[k] -= r * c
        coeffs = out
    return coeffs

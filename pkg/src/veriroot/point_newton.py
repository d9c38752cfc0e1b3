"""Floating-point (or exact rational) Newton iteration with a curvature fix.

Plain Newton from a point where f is negative and concave lands short of
the root, on the same side as where it started. Adding ``-h*s**2/d`` to the
step, with ``h`` an estimate of f'', pushes the iterate across the root so
successive residuals alternate in sign and the bracket shrinks from both
ends. The iteration below keeps a bracket ``[lo, hi]`` with ``f(lo) <= 0 <=
f(hi)`` and falls back to bisection whenever a step looks unreliable.

Everything here is generic over the number type: pass callables returning
``fractions.Fraction`` values and the arithmetic is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .interval import EMPTY, Interval, next_down, next_up

__all__ = [
    "BracketResult",
    "SecantState",
    "corrected_step",
    "exact_newton",
    "modified_step",
    "newton_bracket",
]


def _isnan(v) -> bool:
    return v != v


@dataclass
class SecantState:
    """Last derivative sample and the curvature estimate derived from it."""

    d: float = math.nan
    t_d: float = math.nan
    h: float = 0.0

    def update(self, t_k, d_k) -> None:
        if not _isnan(self.d) and not _isnan(self.t_d) and self.t_d != t_k:
            self.h = (self.d - d_k) / (self.t_d - t_k)
        self.d = d_k
        self.t_d = t_k


def modified_step(t, w, d, h):
    """Newton point from ``t`` for ``w < 0 < d``, pushed further when ``h < 0``."""
    s = -w / d
    if h < 0:
        s = s - h * s * s / d
    return t + s


def corrected_step(w, d, h):
    """Step length for any orientation of ``w`` and ``d``.

    The correction applies when the quadratic model predicts that the plain
    Newton point has the same sign of f as ``t`` does, that is ``h*w > 0``.
    """
    s = -w / d
    if h * w > 0:
        s = s - h * s * s / d
    return s


@dataclass
class BracketResult:
    lo: object
    hi: object
    w_lo: object
    w_hi: object
    iterations: int
    converged: bool
    # (kind, t, w) for every evaluation after the two initial ones
    trace: list = field(default_factory=list)

    def interval(self) -> Interval:
        lo, hi = self.lo, self.hi
        flo, fhi = float(lo), float(hi)
        if flo > lo:
            flo = next_down(flo)
        if fhi < hi:
            fhi = next_up(fhi)
        return Interval(flo, fhi)


def newton_bracket(x, f, df, tau_x, tau_w, *, max_iter: int = 10_000, lo=None, hi=None):
    """Run the bracketing iteration on ``[lo, hi]`` for an increasing ``f``.

    ``x`` may be an :class:`Interval` or skipped in favour of explicit
    ``lo``/``hi`` (useful with rational endpoints). Returns ``None`` when
    f does not change sign on the input.
    """
    if lo is None:
        lo, hi = x.lo, x.hi
    xl, xh = lo, hi
    wl, wh = f(xl), f(xh)
    if wl > 0 or wh < 0:
        return None
    dl = dh = math.nan
    sec = SecantState()
    trace = []
    it = 0

    def bisect():
        nonlocal xl, xh, wl, wh, dl, dh
        t1 = (xl + xh) / 2
        w1 = f(t1)
        trace.append(("bisect", t1, w1))
        if w1 > 0:
            xh, wh, dh = t1, w1, math.nan
        else:
            xl, wl, dl = t1, w1, math.nan

    while True:
        if xh - xl < tau_x or wh - wl < tau_w:
            return BracketResult(xl, xh, wl, wh, it, True, trace)
        it += 1
        if it > max_iter:
            return BracketResult(xl, xh, wl, wh, it - 1, False, trace)
        if -wl <= wh:
            if not _isnan(dl):
                bisect()
                continue
            t_k = xl
            d_k = df(t_k)
            sec.update(t_k, d_k)
            dl = d_k
            if not d_k > 0:
                bisect()
                continue
            s = -wl / d_k
            if sec.h < 0:
                s = s - sec.h * s * s / d_k
            if 2 * s > xh - xl:
                bisect()
                continue
            t1 = t_k + s
            w1 = f(t1)
            trace.append(("newton", t1, w1))
            if w1 >= 0:
                xh, wh, dh = t1, w1, math.nan
            else:
                xl, wl, dl = t1, w1, math.nan
                bisect()
        else:
            # mirror image: step leftwards from the upper end
            if not _isnan(dh):
                bisect()
                continue
            t_k = xh
            d_k = df(t_k)
            sec.update(t_k, d_k)
            dh = d_k
            if not d_k > 0:
                bisect()
                continue
            s = wh / d_k
            # curvature of the mirrored function is -h
            if sec.h > 0:
                s = s + sec.h * s * s / d_k
            if 2 * s > xh - xl:
                bisect()
                continue
            t1 = t_k - s
            w1 = f(t1)
            trace.append(("newton", t1, w1))
            if w1 <= 0:
                xl, wl, dl = t1, w1, math.nan
            else:
                xh, wh, dh = t1, w1, math.nan
                bisect()


def exact_newton(x: Interval, f, tau_x: float, tau_w: float, df=None, **kwargs) -> Interval:
    """Short interval around the root of an increasing f, or ``EMPTY``.

    ``f`` is an expression (its derivative is taken symbolically and both are
    evaluated in floating point) or a callable, in which case ``df`` is needed.
    """
    from .expr import Expr, derivative, eval_float

    if isinstance(f, Expr):
        g = f
        dg = derivative(g) if df is None else df
        f = lambda t: eval_float(g, t)  # noqa: E731
        df = lambda t: eval_float(dg, t)  # noqa: E731
    elif df is None:
        raise TypeError("exact_newton needs df when f is a plain callable")
    res = newton_bracket(x, f, df, tau_x, tau_w, **kwargs)
    if res is None:
        return EMPTY
    return res.interval()

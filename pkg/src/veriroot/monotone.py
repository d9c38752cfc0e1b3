"""Verified Newton iteration for functions with a certified monotone sign.

Once ``f' >= kappa > 0`` is known on a box, f has at most one root there
and the sign of f at single points says which side of it they lie on. The
iteration below therefore only ever evaluates f at degenerate intervals
``[t, t]`` and f' in plain floating point, never on boxes. Decreasing
functions are handled by running on ``-f``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import interval as ia
from .candidate import RootCandidate, Status
from .evaluator import Evaluator
from .expr import Expr, parse
from .interval import EMPTY, Interval, Sign

__all__ = [
    "MonotoneConfig",
    "MonotoneExpansion",
    "expand_zero_monotone",
    "solve_increasing",
    "solve_monotone",
]


@dataclass(frozen=True)
class MonotoneConfig:
    kappa: float
    tau_x: float = 1e-6
    tau_w: float = 1e-6
    max_iterations: int = 5000

    def __post_init__(self):
        if not self.kappa > 0:
            raise ValueError("kappa must be positive")
        if not (self.tau_x > 0 and self.tau_w > 0):
            raise ValueError("tolerances must be positive")


@dataclass(frozen=True)
class MonotoneExpansion:
    """Result of widening an ambiguous zero: remainders and the zero region.

    Signs are those of f itself (not of the oriented function). Unpacks as
    ``left, cluster, right``.
    """

    left: Interval
    cluster: Interval
    right: Interval
    sign_lo: Sign
    sign_hi: Sign

    def __iter__(self):
        yield self.left
        yield self.cluster
        yield self.right


def _as_evaluator(f, tau_w) -> Evaluator:
    if isinstance(f, Evaluator):
        return f
    if isinstance(f, str):
        f = parse(f)
    if isinstance(f, Expr):
        return Evaluator(f, tau_w)
    raise TypeError(f"expected an expression or Evaluator, got {type(f).__name__}")


class _Oriented:
    """``orient * f`` on top of an evaluator."""

    __slots__ = ("ev", "orient")

    def __init__(self, ev: Evaluator, orient: int):
        self.ev = ev
        self.orient = orient

    def w(self, t: float) -> Interval:
        w = self.ev.point(t)
        return w if self.orient > 0 else ia.neg(w)

    def d(self, t: float) -> float:
        return self.orient * self.ev.dfloat(t)


def _expand(g: _Oriented, z: float, xl: float, xh: float, step: float):
    """Widen ``z`` inside ``[xl, xh]`` until increasing g has strict signs.

    Returns ``(c_lo, c_hi, s_lo, s_hi)`` in the oriented frame. A probe on the
    wrong side of the root (e.g. ``g > 0`` left of ``z``) shrinks the other
    end instead, which is safe because g is increasing.
    """
    c_lo = c_hi = z
    s_lo = s_hi = Sign.UNKNOWN
    far_lo, far_hi = xl, xh  # the root is known to lie in [far_lo, far_hi]

    h = step
    p = z
    while p < far_hi:
        p = min(p + h, far_hi)
        w = g.w(p)
        if w.lo > 0.0:
            c_hi, s_hi = p, Sign.POS
            break
        if w.hi < 0.0:
            # root lies further right
            c_lo, s_lo = p, Sign.NEG
        c_hi = p
        h *= 2.0
    h = step
    p = z
    limit = max(far_lo, c_lo) if s_lo is Sign.NEG else far_lo
    if s_lo is not Sign.NEG:
        while p > limit:
            p = max(p - h, limit)
            w = g.w(p)
            if w.hi < 0.0:
                c_lo, s_lo = p, Sign.NEG
                break
            if w.lo > 0.0:
                c_hi, s_hi = p, Sign.POS
            c_lo = p
            h *= 2.0
    if c_lo > c_hi:
        c_lo, c_hi = c_hi, c_lo
    return c_lo, c_hi, s_lo, s_hi


def expand_zero_monotone(
    z: float,
    x: Interval,
    f,
    cfg: MonotoneConfig,
    *,
    step: float | None = None,
    orient: int = 1,
) -> MonotoneExpansion:
    """Grow a region around ``z`` until f has a strict sign at both ends.

    Probes start ``step`` away (default ``tau_x/4``) and the gap doubles on
    each unsuccessful probe, stopping at the boundary of ``x``.
    """
    if not x.contains(z):
        raise ia.ContractError("z must lie in x")
    ev = _as_evaluator(f, cfg.tau_w)
    g = _Oriented(ev, orient)
    step = cfg.tau_x / 4 if step is None else step
    c_lo, c_hi, s_lo, s_hi = _expand(g, z, x.lo, x.hi, step)
    if orient < 0:
        s_lo, s_hi = Sign(-s_lo), Sign(-s_hi)
    left = Interval(x.lo, c_lo) if c_lo > x.lo else EMPTY
    right = Interval(c_hi, x.hi) if c_hi < x.hi else EMPTY
    return MonotoneExpansion(left, Interval(c_lo, c_hi), right, s_lo, s_hi)


def _candidate(lo, hi, s_lo, s_hi, orient, fallback=Status.POSSIBLE):
    if orient < 0:
        s_lo, s_hi = Sign(-s_lo), Sign(-s_hi)
    return RootCandidate.make(Interval(lo, hi), s_lo, s_hi, fallback)


def solve_monotone(
    x: Interval,
    ev: Evaluator,
    kappa: float,
    tau_x: float,
    orient: int = 1,
    *,
    max_iterations: int = 5000,
):
    """Core iteration on ``orient * f``; see :func:`solve_increasing`."""
    ev.monotone_depth += 1
    try:
        return _solve(x, _Oriented(ev, orient), kappa, tau_x, orient, max_iterations)
    finally:
        ev.monotone_depth -= 1


def _solve(x, g, kappa, tau_x, orient, max_iterations):
    ev = g.ev
    xl, xh = x.lo, x.hi
    wm, wp = g.w(xl), g.w(xh)
    if wm.lo > 0.0 or wp.hi < 0.0:
        return None
    step = tau_x / 4

    def expand(z):
        c_lo, c_hi, s_lo, s_hi = _expand(g, z, xl, xh, step)
        # the bracket ends keep their signs when the expansion reached them
        if c_lo == xl and wm.hi < 0.0:
            s_lo = Sign.NEG
        if c_hi == xh and wp.lo > 0.0:
            s_hi = Sign.POS
        return _candidate(c_lo, c_hi, s_lo, s_hi, orient, Status.CLUSTER)

    if wm.hi >= 0.0:
        return expand(xl)
    if wp.lo <= 0.0:
        return expand(xh)

    dl = dh = math.nan
    d_prev = t_prev = math.nan
    h = 0.0
    it = 0
    while True:
        # regular case
        if xh - xl < tau_x or wp.hi - wm.lo < ev.tau_w or it >= max_iterations:
            return _candidate(xl, xh, Sign.NEG, Sign.POS, orient)
        it += 1
        bisect = False
        if -wm.lo <= wp.hi:
            if not math.isnan(dl):
                bisect = True
            else:
                t_k = xl
                d_k = g.d(t_k)
                d_k = kappa if not d_k > kappa else d_k
                if not math.isnan(d_prev) and t_prev != t_k:
                    h = (d_prev - d_k) / (t_prev - t_k)
                dl = d_prev = d_k
                t_prev = t_k
                s = -wm.lo / d_k
                if h < 0.0:
                    s = s - h * s * s / d_k
                t1 = t_k + s
                if not (2.0 * s <= xh - xl and xl < t1 < xh):
                    bisect = True
                else:
                    w1 = g.w(t1)
                    if w1.lo > 0.0:
                        wp, xh, dh = w1, t1, math.nan
                        continue
                    if w1.hi < 0.0:
                        wm, xl, dl = w1, t1, math.nan
                        bisect = True
                    else:
                        return expand(t1)
        else:
            if not math.isnan(dh):
                bisect = True
            else:
                t_k = xh
                d_k = g.d(t_k)
                d_k = kappa if not d_k > kappa else d_k
                if not math.isnan(d_prev) and t_prev != t_k:
                    h = (d_prev - d_k) / (t_prev - t_k)
                dh = d_prev = d_k
                t_prev = t_k
                s = wp.hi / d_k
                if h > 0.0:
                    s = s + h * s * s / d_k
                t1 = t_k - s
                if not (2.0 * s <= xh - xl and xl < t1 < xh):
                    bisect = True
                else:
                    w1 = g.w(t1)
                    if w1.hi < 0.0:
                        wm, xl, dl = w1, t1, math.nan
                        continue
                    if w1.lo > 0.0:
                        wp, xh, dh = w1, t1, math.nan
                        bisect = True
                    else:
                        return expand(t1)
        if bisect:
            t1 = ia.midpoint(Interval(xl, xh))
            if not xl < t1 < xh:
                return _candidate(xl, xh, Sign.NEG, Sign.POS, orient)
            w1 = g.w(t1)
            if w1.lo > 0.0:
                wp, xh, dh = w1, t1, math.nan
            elif w1.hi < 0.0:
                wm, xl, dl = w1, t1, math.nan
            else:
                return expand(t1)


def solve_increasing(x: Interval, f, cfg: MonotoneConfig):
    """Enclose the root of an increasing f on ``x``, or return ``None``.

    The caller vouches that f' >= ``cfg.kappa`` on ``x``. ``f`` is an
    expression, expression text, or an :class:`Evaluator` (whose counters and
    ``tau_w`` are then shared).
    """
    ev = _as_evaluator(f, cfg.tau_w)
    return solve_monotone(
        x, ev, cfg.kappa, cfg.tau_x, 1, max_iterations=cfg.max_iterations
    )

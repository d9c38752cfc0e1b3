"""Counting front end to the expression evaluators.

The solvers never call :mod:`veriroot.expr` directly. They go through an
:class:`Evaluator`, which keeps the evaluation counters used in reports and
owns the running value of the function tolerance ``tau_w``. Every point
enclosure it hands out raises ``tau_w`` to sixteen times that enclosure's
width when that is larger, so a tolerance chosen too small for the rounding
noise of f corrects itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import expr as ex
from .expr import Expr
from .interval import Interval, width

__all__ = ["EvalCounts", "Evaluator"]


@dataclass
class EvalCounts:
    box: int = 0  # natural extension on a non-degenerate interval
    point: int = 0  # extension at a degenerate interval [t, t]
    slope: int = 0  # slope passes (also yield the natural extension)
    deriv_box: int = 0
    deriv_float: int = 0
    box_after_handoff: int = 0  # any box-type evaluation while a monotone run is active

    @property
    def total(self) -> int:
        return self.box + self.point + self.slope + self.deriv_box + self.deriv_float


class Evaluator:
    """Evaluation services for one function ``f`` during one solve."""

    def __init__(self, f: Expr, tau_w: float, df: Expr | None = None):
        self.f = f
        self.df = ex.derivative(f) if df is None else df
        self.tau_w = float(tau_w)
        self.counts = EvalCounts()
        self.monotone_depth = 0
        k = f.kernels()
        dk = self.df.kernels()
        self._box = k.box
        self._num = k.num
        self._slope = k.slope
        self._dbox = dk.box
        self._dnum = dk.num

    # -- tolerance --------------------------------------------------------
    def inflate(self, w: Interval) -> None:
        wid = width(w)
        if wid == math.inf:
            return
        t = 16.0 * wid
        if t > self.tau_w:
            self.tau_w = t

    def negligible(self, w: Interval) -> bool:
        """Whether ``w`` meets ``[-tau_w, tau_w]``."""
        return w.lo <= self.tau_w and w.hi >= -self.tau_w

    # -- evaluations ------------------------------------------------------
    def point(self, t: float) -> Interval:
        self.counts.point += 1
        w = self._box(Interval(t))
        self.inflate(w)
        return w

    def box(self, x: Interval) -> Interval:
        self.counts.box += 1
        if self.monotone_depth:
            self.counts.box_after_handoff += 1
        return self._box(x)

    def slope(self, x: Interval, c: float):
        """``(f(x), f(c), slope)``; ``f(c)`` counts as a point evaluation."""
        self.counts.slope += 1
        if self.monotone_depth:
            self.counts.box_after_handoff += 1
        fx, fc, s = self._slope(x, Interval(c))
        self.inflate(fc)
        return fx, fc, s

    def dbox(self, x: Interval) -> Interval:
        self.counts.deriv_box += 1
        if self.monotone_depth:
            self.counts.box_after_handoff += 1
        return self._dbox(x)

    def dfloat(self, t: float) -> float:
        self.counts.deriv_float += 1
        try:
            return self._dnum(t)
        except (OverflowError, ZeroDivisionError):
            return math.nan

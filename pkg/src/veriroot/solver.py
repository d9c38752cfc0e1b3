"""Branch-and-bound driver for verified root enclosure.

Work items live on a LIFO stack. Each carries its box, the certified signs
of f at both ends, the sign of f' when known, the point ``t`` where it will
be split, a nearby point ``t_tilde`` with the float derivative ``d_tilde``
there, and the sign ``sigma_t`` we expect f to have at ``t``. One pass over
an item:

1. a box narrower than ``tau_x`` becomes a candidate;
2. a box on which the enclosure of f (natural extension intersected with
   the centered form) excludes zero is dropped;
3. if the slope enclosure excludes zero and so does the derivative
   enclosure, the box goes to the monotone solver;
4. if ``f(t)`` is zero or negligible, the zero at ``t`` is isolated or
   expanded into a cluster;
5. otherwise an interval Newton contraction about ``t`` leaves 0, 1 or 2
   pieces, which get new split points and go back on the stack. Two pieces
   from a box narrower than ``tau_c`` are reported as one cluster instead.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from enum import Enum

from . import interval as ia
from .candidate import RootCandidate, Status
from .evaluator import Evaluator
from .expr import Expr, centered_from, parse
from .interval import EMPTY, Interval, Sign, sign_of
from .monotone import solve_monotone
from .newton import contract
from .point_newton import corrected_step

__all__ = [
    "Expansion",
    "InvalidDomain",
    "IterationBudgetExceeded",
    "SolveReport",
    "SolveResult",
    "SolverConfig",
    "SplitPolicy",
    "WorkItem",
    "choose_point",
    "expand_zero",
    "solve",
]

_NAN = math.nan
CLUSTER_SCALE = 1.0


class InvalidDomain(ValueError):
    """The search interval is empty, unbounded or not an interval."""


class IterationBudgetExceeded(RuntimeError):
    """Raised by :func:`solve` with ``raise_on_budget`` set; carries the partial result."""

    def __init__(self, result):
        super().__init__(
            f"iteration budget exhausted after {result.report.iterations} iterations"
        )
        self.result = result


class SplitPolicy(str, Enum):
    NEWTON = "newton"  # corrected Newton point when it is usable
    MIDPOINT = "midpoint"


@dataclass(frozen=True)
class SolverConfig:
    tau_x: float = 1e-6
    tau_w: float = 1e-6
    tau_c: float | None = None  # defaults to sqrt(tau_x)
    max_iterations: int = 200_000
    split_policy: SplitPolicy = SplitPolicy.NEWTON
    raise_on_budget: bool = False

    def __post_init__(self):
        if self.tau_c is None:
            object.__setattr__(self, "tau_c", math.sqrt(self.tau_x))
        object.__setattr__(self, "split_policy", SplitPolicy(self.split_policy))
        for name in ("tau_x", "tau_w", "tau_c"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and 0 < v < math.inf):
                raise ValueError(f"{name} must be positive and finite, got {v!r}")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")


@dataclass
class WorkItem:
    x: Interval
    sigma_i: Sign
    sigma_s: Sign
    sigma_d: Sign
    t: float
    t_tilde: float = _NAN
    d_tilde: float = _NAN
    sigma_t: Sign = Sign.UNKNOWN


@dataclass
class SolveReport:
    iterations: int = 0
    contractions: int = 0
    bisections: int = 0
    handoffs: int = 0
    expansions: int = 0
    pruned: int = 0
    evaluations: int = 0
    box_evals_after_handoff: int = 0
    tau_w_final: float = 0.0
    elapsed_ms: float = 0.0
    complete: bool = True
    counts: dict = field(default_factory=dict)


@dataclass
class SolveResult:
    candidates: list
    report: SolveReport

    @property
    def complete(self) -> bool:
        return self.report.complete

    def __iter__(self):
        return iter(self.candidates)

    def __len__(self):
        return len(self.candidates)


@dataclass(frozen=True)
class Expansion:
    """Outcome of :func:`expand_zero`. Unpacks as ``left, cluster, right``.

    ``sign_lo``/``sign_hi`` are the signs of f at the cluster's ends.
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


def _certified(w: Interval, tau_w: float) -> Sign:
    if w.lo >= tau_w and w.lo > 0.0:
        return Sign.POS
    if w.hi <= -tau_w and w.hi < 0.0:
        return Sign.NEG
    return Sign.UNKNOWN


def expand_zero(
    z: float,
    x: Interval,
    f,
    cfg: SolverConfig,
    *,
    step: float | None = None,
    evaluator: Evaluator | None = None,
    sign_lo: Sign = Sign.UNKNOWN,
    sign_hi: Sign = Sign.UNKNOWN,
) -> Expansion:
    """March out from ``z`` in steps of ``tau_c`` until ``|f| >= tau_w`` is certain.

    Differences from the textbook loop: the last probe on each side is
    clamped to the boundary of ``x`` instead of being skipped, and the
    cluster reaches out to the probe that certified the sign, so the
    remainders start at points of known sign. ``sign_lo``/``sign_hi`` are the
    caller's signs at ``x.lo``/``x.hi``, used when a march hits the boundary.
    """
    if not x.contains(z):
        raise ia.ContractError("z must lie in x")
    ev = evaluator or Evaluator(f if isinstance(f, Expr) else parse(f), cfg.tau_w)
    step = cfg.tau_c if step is None else step
    xl, xh = x.lo, x.hi

    c_hi, s_hi = z, Sign.UNKNOWN
    k = 0
    while c_hi < xh:
        k += 1
        p = min(z + k * step, xh)
        if p <= c_hi:
            p = ia.next_up(c_hi)
        w = ev.point(p)
        c_hi = p
        s = _certified(w, ev.tau_w)
        if s:
            s_hi = s
            break
    if c_hi == xh and not s_hi:
        s_hi = sign_hi

    c_lo, s_lo = z, Sign.UNKNOWN
    k = 0
    while c_lo > xl:
        k += 1
        p = max(z - k * step, xl)
        if p >= c_lo:
            p = ia.next_down(c_lo)
        w = ev.point(p)
        c_lo = p
        s = _certified(w, ev.tau_w)
        if s:
            s_lo = s
            break
    if c_lo == xl and not s_lo:
        s_lo = sign_lo
    if z == xl and not s_lo:
        s_lo = sign_lo
    if z == xh and not s_hi:
        s_hi = sign_hi

    left = Interval(xl, c_lo) if c_lo > xl else EMPTY
    right = Interval(c_hi, xh) if c_hi < xh else EMPTY
    return Expansion(left, Interval(c_lo, c_hi), right, s_lo, s_hi)


def choose_point(part: Interval, parent: WorkItem, policy, w: Interval, d: float, h: float):
    """Split point for a piece produced by contracting ``parent`` about its ``t``.

    Returns ``(t, sigma_t, t_tilde, d_tilde)``. The corrected Newton point
    from ``parent.t`` is used when it is finite and strictly inside ``part``;
    the expected sign of f there is then the opposite of the sign at
    ``parent.t``. Otherwise the midpoint, with no expectation.
    """
    mid = ia.midpoint(part)
    if policy is SplitPolicy.MIDPOINT or math.isnan(d) or d == 0.0 or math.isinf(d):
        return mid, Sign.UNKNOWN, parent.t, d
    wm = 0.5 * w.lo + 0.5 * w.hi
    try:
        t1 = parent.t + corrected_step(wm, d, h)
    except (OverflowError, ZeroDivisionError):
        return mid, Sign.UNKNOWN, parent.t, d
    if math.isfinite(t1) and part.lo < t1 < part.hi:
        return t1, Sign(-sign_of(w)), parent.t, d
    return mid, Sign.UNKNOWN, parent.t, d


def _as_expr(f) -> Expr:
    if isinstance(f, Expr):
        return f
    if isinstance(f, str):
        return parse(f)
    raise TypeError(f"expected an expression, got {type(f).__name__}")


def _check_domain(x0) -> Interval:
    if isinstance(x0, tuple) and len(x0) == 2:
        try:
            x0 = Interval(*x0)
        except ValueError as exc:
            raise InvalidDomain(str(exc)) from None
    if not isinstance(x0, Interval):
        raise InvalidDomain(f"expected an Interval, got {type(x0).__name__}")
    if x0.is_empty:
        raise InvalidDomain("search interval is empty")
    if not x0.is_bounded:
        raise InvalidDomain("search interval must be bounded")
    return x0


class _Run:
    def __init__(self, f: Expr, x0: Interval, cfg: SolverConfig):
        self.cfg = cfg
        self.ev = Evaluator(f, cfg.tau_w)
        self.x0 = x0
        self.out: list = []
        self.stack: list = []
        self.rep = SolveReport()

    def emit(self, x, s_lo, s_hi, kind=Status.POSSIBLE):
        self.out.append(RootCandidate.make(x, s_lo, s_hi, kind))

    def push(self, x, s_lo, s_hi, t=None, t_tilde=_NAN, d_tilde=_NAN, sigma_t=Sign.UNKNOWN):
        if t is None:
            t = ia.midpoint(x)
        self.stack.append(WorkItem(x, s_lo, s_hi, Sign.UNKNOWN, t, t_tilde, d_tilde, sigma_t))

    def point_sign(self, t, boundary, known):
        if t == boundary:
            return known
        return sign_of(self.ev.point(t))

    def run(self):
        cfg, ev, rep = self.cfg, self.ev, self.rep
        x0 = self.x0
        s_lo = sign_of(ev.point(x0.lo))
        s_hi = s_lo if x0.is_point else sign_of(ev.point(x0.hi))
        self.push(x0, s_lo, s_hi)
        while self.stack:
            if rep.iterations >= cfg.max_iterations:
                rep.complete = False
                for item in reversed(self.stack):
                    self.emit(item.x, item.sigma_i, item.sigma_s)
                self.stack.clear()
                break
            rep.iterations += 1
            self.step(self.stack.pop())

    def step(self, it: WorkItem):
        cfg, ev, rep = self.cfg, self.ev, self.rep
        x = it.x
        if ia.width(x) < cfg.tau_x:
            if it.sigma_i * it.sigma_s != -1 and x.lo < x.hi:
                # one last look: a tiny box is often root-free by the centered form
                c = ia.midpoint(x)
                fx, w, s = ev.slope(x, c)
                if not centered_from(fx, w, s, c, x).contains_zero():
                    rep.pruned += 1
                    return
            self.emit(x, it.sigma_i, it.sigma_s)
            return
        t = it.t
        if not x.lo < t < x.hi:
            t = ia.midpoint(x)

        fx, w, s = ev.slope(x, t)
        enc = centered_from(fx, w, s, t, x)
        if not enc.contains_zero():
            rep.pruned += 1
            return

        if not s.contains_zero():
            dx = ev.dbox(x)
            if not dx.contains_zero():
                self.handoff(it, dx)
                return
            s = ia.intersect(s, dx)
            if s.is_empty:
                # both enclose the true slopes, so this cannot happen
                raise ia.ContractError("slope and derivative enclosures are disjoint")

        if w.contains_zero() or ev.negligible(w):
            self.zero_at(it, x, t)
            return

        rep.contractions += 1
        out = contract(x, t, w, s, it.sigma_i, it.sigma_s)
        parts = out.parts
        if not parts:
            rep.pruned += 1
            return
        if len(parts) == 1 and parts[0].interval == x:
            # no progress: split at t, whose sign w certifies
            rep.bisections += 1
            st = sign_of(w)
            parts = (
                _P(Interval(x.lo, t), it.sigma_i, st),
                _P(Interval(t, x.hi), st, it.sigma_s),
            )
        if len(parts) == 2 and ia.width(x) < cfg.tau_c and self.unresolved(enc):
            self.emit(x, it.sigma_i, it.sigma_s, Status.CLUSTER)
            return

        mismatch = len(parts) == 1 and it.sigma_t and it.sigma_t != sign_of(w)
        if mismatch or cfg.split_policy is SplitPolicy.MIDPOINT:
            d, h = _NAN, 0.0
        else:
            d = ev.dfloat(t)
            h = 0.0
            if math.isfinite(it.t_tilde) and it.t_tilde != t and math.isfinite(it.d_tilde):
                h = (it.d_tilde - d) / (it.t_tilde - t)
                if not math.isfinite(h):
                    h = 0.0
        children = []
        for p in parts:
            tp, st, tt, dt = choose_point(p.interval, it, cfg.split_policy, w, d, h)
            if tp == ia.midpoint(p.interval) and st is Sign.UNKNOWN:
                rep.bisections += 1
            dist = 0.0 if p.interval.contains(t) else min(abs(p.interval.lo - t), abs(p.interval.hi - t))
            children.append((dist, WorkItem(p.interval, p.sign_lo, p.sign_hi, Sign.UNKNOWN, tp, tt, dt, st)))
        # farther piece first, so the nearer one is popped next
        children.sort(key=lambda c: -c[0])
        self.stack.extend(item for _, item in children)

    def unresolved(self, enc: Interval) -> bool:
        # f over the box is at the scale of the function tolerance, so
        # splitting further cannot separate it from zero
        return max(-enc.lo, enc.hi) <= CLUSTER_SCALE * self.ev.tau_w

    def handoff(self, it: WorkItem, dx: Interval):
        rep, ev, cfg = self.rep, self.ev, self.cfg
        rep.handoffs += 1
        if dx.lo > 0.0:
            orient, kappa = 1, dx.lo
        else:
            orient, kappa = -1, -dx.hi
        it.sigma_d = Sign(orient)
        before = ev.counts.box_after_handoff
        cand = solve_monotone(it.x, ev, kappa, cfg.tau_x, orient)
        rep.box_evals_after_handoff += ev.counts.box_after_handoff - before
        if cand is not None:
            self.out.append(cand)

    def zero_at(self, it: WorkItem, x: Interval, t: float):
        cfg, ev, rep = self.cfg, self.ev, self.rep
        # a simple root right at t: try a window of width tau_x/2 first
        a = max(x.lo, t - cfg.tau_x / 4)
        b = min(x.hi, t + cfg.tau_x / 4)
        sa = self.point_sign(a, x.lo, it.sigma_i)
        sb = self.point_sign(b, x.hi, it.sigma_s)
        if sa * sb == -1:
            self.emit(Interval(a, b), sa, sb)
            if a > x.lo:
                self.push(Interval(x.lo, a), it.sigma_i, sa)
            if b < x.hi:
                self.push(Interval(b, x.hi), sb, it.sigma_s)
            return
        rep.expansions += 1
        e = expand_zero(t, x, None, cfg, evaluator=ev, sign_lo=it.sigma_i, sign_hi=it.sigma_s)
        self.emit(e.cluster, e.sign_lo, e.sign_hi, Status.CLUSTER)
        if not e.right.is_empty:
            self.push(e.right, e.sign_hi, it.sigma_s)
        if not e.left.is_empty:
            self.push(e.left, it.sigma_i, e.sign_lo)


@dataclass(frozen=True)
class _P:
    interval: Interval
    sign_lo: Sign
    sign_hi: Sign


def _merge(cands: list) -> list:
    """Sort and fuse touching candidates unless both are certified."""
    cands = sorted(cands, key=lambda c: (c.lo, c.hi))
    merged = []
    for c in cands:
        if merged:
            prev = merged[-1]
            touching = c.lo <= prev.hi
            if touching and not (
                prev.status is Status.CERTIFIED and c.status is Status.CERTIFIED
            ):
                lo_sign = prev.sign_lo
                if c.hi > prev.hi:
                    hi, hi_sign = c.hi, c.sign_hi
                else:
                    hi, hi_sign = prev.hi, prev.sign_hi
                kind = (
                    Status.CLUSTER
                    if Status.CLUSTER in (prev.status, c.status)
                    else Status.POSSIBLE
                )
                merged[-1] = RootCandidate.make(Interval(prev.lo, hi), lo_sign, hi_sign, kind)
                continue
        merged.append(c)
    return merged


def solve(f, x0, cfg: SolverConfig | None = None) -> SolveResult:
    """Enclose every root of ``f`` in ``x0``.

    ``f`` is an :class:`~veriroot.expr.Expr` or expression text. The union of
    the returned candidates contains every root; regions left out were
    certified root-free. Raises :class:`InvalidDomain` for an empty or
    unbounded ``x0``.
    """
    cfg = cfg or SolverConfig()
    f = _as_expr(f)
    x0 = _check_domain(x0)
    started = time.perf_counter()
    run = _Run(f, x0, cfg)
    run.run()
    rep = run.rep
    c = run.ev.counts
    rep.evaluations = c.total
    rep.counts = {
        "box": c.box,
        "point": c.point,
        "slope": c.slope,
        "deriv_box": c.deriv_box,
        "deriv_float": c.deriv_float,
    }
    rep.tau_w_final = run.ev.tau_w
    rep.elapsed_ms = (time.perf_counter() - started) * 1e3
    result = SolveResult(_merge(run.out), rep)
    if not rep.complete and cfg.raise_on_budget:
        raise IterationBudgetExceeded(result)
    return result

"""One interval Newton contraction with certified signs at the new endpoints.

Given a box ``x``, a point ``t`` in it, an enclosure ``w`` of ``f(t)`` that
excludes zero, and an enclosure ``d`` of the slopes (or derivatives) of f
over ``x`` relative to ``t``, every root ``y`` of f in ``x`` satisfies
``0 in w + d*(y - t)``. That set is cut out of ``x`` here.

After flipping f if needed so that ``w < 0``:

* if ``0 in d`` the roots lie in ``[x.lo, r1]`` and ``[r2, x.hi]`` with
  ``r1 = t + w.hi/(-d.lo)`` and ``r2 = t - w.hi/d.hi``;
* if ``d > 0`` they lie in the single piece ``[t - w.hi/d.hi, t - w.lo/d.lo]``;
* if ``d < 0`` the mirror image ``t -> -t`` of the previous case applies.

Each new bound is rounded outward with the directed backend, in a fixed
order of operations. When the backend reports that both the quotient and
the sum were exact, the bound could itself be a root, so it moves one ulp
outward. Either way f has a strictly known sign at every new endpoint, and
no function evaluation is needed to know it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import interval as ia
from .interval import ContractError, Interval, Sign

__all__ = ["ContractOutcome", "Part", "contract", "normalize_sign"]

_INF = math.inf


@dataclass(frozen=True)
class Part:
    interval: Interval
    sign_lo: Sign
    sign_hi: Sign


@dataclass(frozen=True)
class ContractOutcome:
    """Pieces of ``x`` that may still hold roots, left to right.

    ``new_endpoints`` lists ``(point, sign)`` for every endpoint created by
    the contraction; old endpoints keep the signs passed in by the caller.
    Two parts may share one endpoint only when that point is ``t`` itself,
    whose sign is certified by ``w``.
    """

    parts: tuple
    new_endpoints: tuple
    gap_certified: bool

    def __len__(self):
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)


def normalize_sign(w: Interval):
    """Return ``(flip, w')`` with ``w'.hi < 0``; ``flip`` means f was negated."""
    if w.is_empty or w.contains_zero():
        raise ContractError(f"normalize_sign needs 0 outside w, got {w!r}")
    if w.hi < 0.0:
        return False, w
    return True, ia.neg(w)


def _left_bound(t: float, wh: float, dl: float) -> float:
    """Upper end of the left piece, ``t + wh/(-dl)``, for ``wh < 0 and dl < 0``."""
    if dl == -_INF:
        return t
    q = ia.div_up(wh, -dl)
    r = ia.add_up(t, q)
    if r != t and q == ia.div_down(wh, -dl) and r == ia.add_down(t, q):
        r = ia.next_up(r)
    return r


def _right_bound(t: float, wh: float, dh: float) -> float:
    """Lower end of the right piece, ``t - wh/dh``, for ``wh < 0 and dh > 0``.

    Evaluated as ``-( wh/dh - t )`` so that upward rounding throughout gives a
    lower bound.
    """
    if dh == _INF:
        return t
    q = ia.div_up(wh, dh)
    u = ia.add_up(q, -t)
    r = -u
    if r != t and q == ia.div_down(wh, dh) and u == ia.add_down(q, -t):
        r = ia.next_down(r)
    return r


def _increasing(xl, xh, t, wl, wh, dl, dh, s_lo, s_hi):
    """Piece for ``d.lo > 0`` and ``w.hi < 0``; returns (part or None, new endpoints)."""
    lo = _right_bound(t, wh, dh)
    # upper end t - wl/dl, rounded up
    q = ia.div_up(-wl, dl)
    hi = ia.add_up(t, q)
    if hi != t and q == ia.div_down(-wl, dl) and hi == ia.add_down(t, q):
        hi = ia.next_up(hi)
    if lo >= xh or hi <= xl:
        return None, ()
    new = []
    if lo > xl:
        s_lo = Sign.NEG
        new.append((lo, Sign.NEG))
    else:
        lo = xl
    if hi < xh:
        s_hi = Sign.POS
        new.append((hi, Sign.POS))
    else:
        hi = xh
    return Part(Interval(lo, hi), s_lo, s_hi), tuple(new)


def _flip_part(p: Part) -> Part:
    return Part(p.interval, Sign(-p.sign_lo), Sign(-p.sign_hi))


def contract(
    x: Interval,
    t: float,
    w: Interval,
    d: Interval,
    sign_lo: Sign = Sign.UNKNOWN,
    sign_hi: Sign = Sign.UNKNOWN,
) -> ContractOutcome:
    """Interval Newton step on ``x`` about ``t``.

    ``sign_lo`` and ``sign_hi`` are the caller's signs of f at ``x.lo`` and
    ``x.hi``; they are copied to parts that keep those endpoints.
    """
    if x.is_empty or not x.contains(t):
        raise ContractError(f"t={t!r} is not in {x!r}")
    if d.is_empty:
        raise ContractError("empty slope enclosure")
    flip, w = normalize_sign(w)
    if flip:
        d = ia.neg(d)
        sign_lo, sign_hi = Sign(-sign_lo), Sign(-sign_hi)
    xl, xh = x.lo, x.hi
    wl, wh = w.lo, w.hi
    dl, dh = d.lo, d.hi

    if dl == 0.0 and dh == 0.0:
        parts = (Part(x, sign_lo, sign_hi),)
        new = ()
        gap = False
    elif dl > 0.0:
        part, new = _increasing(xl, xh, t, wl, wh, dl, dh, sign_lo, sign_hi)
        parts = (part,) if part else ()
        gap = True
    elif dh < 0.0:
        # mirror t -> -t, which turns d into -d > 0
        part, new = _increasing(-xh, -xl, -t, wl, wh, -dh, -dl, sign_hi, sign_lo)
        if part:
            iv = part.interval
            parts = (Part(Interval(-iv.hi, -iv.lo), part.sign_hi, part.sign_lo),)
        else:
            parts = ()
        new = tuple((-p, s) for p, s in new)
        gap = True
    else:
        parts, new = _straddle(xl, xh, t, wh, dl, dh, sign_lo, sign_hi)
        gap = True
        r1 = _left_bound(t, wh, dl) if dl < 0.0 else -_INF
        r2 = _right_bound(t, wh, dh) if dh > 0.0 else _INF
        if not (r1 <= t <= r2):
            raise ContractError(f"bounds crossed: {r1!r} <= {t!r} <= {r2!r} fails")

    if flip:
        parts = tuple(_flip_part(p) for p in parts)
        new = tuple((p, Sign(-s)) for p, s in new)
    if len(parts) == 1 and parts[0].interval == x:
        gap = False
    return ContractOutcome(parts, new, gap)


def _straddle(xl, xh, t, wh, dl, dh, s_lo, s_hi):
    parts = []
    new = []
    if dl < 0.0:
        r1 = _left_bound(t, wh, dl)
        if r1 > xl:
            if r1 < xh:
                parts.append(Part(Interval(xl, r1), s_lo, Sign.NEG))
                new.append((r1, Sign.NEG))
            else:
                parts.append(Part(Interval(xl, xh), s_lo, s_hi))
    if dh > 0.0:
        r2 = _right_bound(t, wh, dh)
        if r2 < xh:
            if r2 > xl:
                parts.append(Part(Interval(r2, xh), Sign.NEG, s_hi))
                new.append((r2, Sign.NEG))
            else:
                parts.append(Part(Interval(xl, xh), s_lo, s_hi))
    if len(parts) == 2 and parts[0].interval.hi > parts[1].interval.lo:
        # only possible when a bound fell outside x; the whole box survives
        return (Part(Interval(xl, xh), s_lo, s_hi),), ()
    return tuple(parts), tuple(new)

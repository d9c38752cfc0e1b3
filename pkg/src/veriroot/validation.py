"""Argument checks shared by the public entry points."""

from __future__ import annotations

import math
import numbers

from .expr import Expr, parse
from .interval import Interval
from .solver import InvalidDomain

__all__ = ["check_domain", "check_expression", "check_tolerance"]


def check_expression(f) -> Expr:
    if isinstance(f, Expr):
        return f
    if isinstance(f, str):
        return parse(f)
    raise TypeError(f"expected expression text or an Expr, got {type(f).__name__}")


def check_domain(domain) -> Interval:
    """Bounded, non-empty interval from an Interval or a ``(lo, hi)`` pair."""
    if isinstance(domain, Interval):
        x = domain
    else:
        try:
            lo, hi = domain
            x = Interval(float(lo), float(hi))
        except (TypeError, ValueError) as exc:
            raise InvalidDomain(f"bad domain {domain!r}: {exc}") from None
    if x.is_empty or not x.is_bounded:
        raise InvalidDomain(f"domain must be bounded and non-empty, got {x!r}")
    return x


def check_tolerance(value, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise TypeError(f"{name} must be a real number")
    v = float(value)
    if not (v > 0 and math.isfinite(v)):
        raise ValueError(f"{name} must be positive and finite, got {value!r}")
    return v

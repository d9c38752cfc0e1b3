"""Root enclosures as reported by the solvers."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .interval import Interval, Sign

__all__ = ["RootCandidate", "Status"]


class Status(str, Enum):
    CERTIFIED = "certified"
    POSSIBLE = "possible"
    CLUSTER = "cluster"


@dataclass(frozen=True)
class RootCandidate:
    """An interval that may hold roots, with the certified sign of f at each end.

    ``certified`` means f has strictly opposite signs at the two ends, so a
    root exists inside. Anything else is ``possible`` (too narrow to decide)
    or ``cluster`` (a region where f is indistinguishable from zero).
    """

    interval: Interval
    sign_lo: Sign
    sign_hi: Sign
    status: Status

    def __post_init__(self):
        opposite = self.sign_lo * self.sign_hi == -1
        if opposite != (self.status is Status.CERTIFIED):
            raise ValueError(
                f"status {self.status.value} disagrees with end signs "
                f"{int(self.sign_lo)}, {int(self.sign_hi)}"
            )

    @classmethod
    def make(cls, interval, sign_lo, sign_hi, fallback=Status.POSSIBLE):
        """Build with the status implied by the signs, else ``fallback``."""
        sign_lo, sign_hi = Sign(sign_lo), Sign(sign_hi)
        status = Status.CERTIFIED if sign_lo * sign_hi == -1 else Status(fallback)
        return cls(interval, sign_lo, sign_hi, status)

    @property
    def lo(self) -> float:
        return self.interval.lo

    @property
    def hi(self) -> float:
        return self.interval.hi

    def contains(self, t) -> bool:
        return self.interval.lo <= t <= self.interval.hi

    def width(self) -> float:
        return self.interval.width()

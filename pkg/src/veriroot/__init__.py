"""Verified enclosure of all real roots of a univariate function on an interval."""

from .candidate import RootCandidate, Status
from .expr import Expr, ExprSyntaxError, derivative, parse
from .interval import EMPTY, WHOLE, ContractError, Interval, Sign
from .solver import (
    InvalidDomain,
    IterationBudgetExceeded,
    SolveResult,
    SolverConfig,
    solve,
)

__version__ = "0.1.0"

__all__ = [
    "EMPTY",
    "WHOLE",
    "ContractError",
    "Expr",
    "ExprSyntaxError",
    "Interval",
    "InvalidDomain",
    "IterationBudgetExceeded",
    "RootCandidate",
    "Sign",
    "SolveResult",
    "SolverConfig",
    "Status",
    "derivative",
    "parse",
    "solve",
]

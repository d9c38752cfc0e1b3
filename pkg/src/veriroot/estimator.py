"""scikit-learn style wrapper around :func:`veriroot.solver.solve`.

``RootFinder(domain=(lo, hi)).fit("x^2 - 2")`` stores the candidates in
``roots_``. Only the parameter plumbing of :class:`sklearn.base.BaseEstimator`
is used (``get_params``/``set_params``/``clone``); there is no training data.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .solver import SolverConfig, solve
from .validation import check_domain, check_expression, check_tolerance

__all__ = ["RootFinder"]


class RootFinder(BaseEstimator):
    """Find certified enclosures of every root of f on ``domain``.

    Parameters
    ----------
    domain : (float, float)
        Bounded search interval.
    tau_x, tau_w : float
        Absolute width and function-value tolerances.
    tau_c : float or None
        Cluster step; ``None`` means ``sqrt(tau_x)``.
    max_iter : int
        Iteration budget of the branch-and-bound loop.
    """

    def __init__(self, domain=(-1.0, 1.0), tau_x=1e-6, tau_w=1e-6, tau_c=None, max_iter=200_000):
        self.domain = domain
        self.tau_x = tau_x
        self.tau_w = tau_w
        self.tau_c = tau_c
        self.max_iter = max_iter

    def fit(self, f, y=None):
        expr = check_expression(f)
        x0 = check_domain(self.domain)
        cfg = SolverConfig(
            tau_x=check_tolerance(self.tau_x, "tau_x"),
            tau_w=check_tolerance(self.tau_w, "tau_w"),
            tau_c=None if self.tau_c is None else check_tolerance(self.tau_c, "tau_c"),
            max_iterations=int(self.max_iter),
        )
        result = solve(expr, x0, cfg)
        self.expr_ = expr
        self.roots_ = list(result.candidates)
        self.report_ = result.report
        self.tau_w_ = result.report.tau_w_final
        self.n_roots_ = len(self.roots_)
        self.complete_ = result.complete
        return self

    def predict(self, points):
        """Index of the candidate containing each point, ``-1`` if none."""
        check_is_fitted(self, "roots_")
        pts = np.asarray(points, dtype=float).ravel()
        out = np.full(pts.shape, -1, dtype=int)
        for k, c in enumerate(self.roots_):
            out[(pts >= c.lo) & (pts <= c.hi) & (out < 0)] = k
        return out

    def transform(self, f=None):
        """Candidates as an ``(n, 2)`` array of bounds."""
        check_is_fitted(self, "roots_")
        if not self.roots_:
            return np.empty((0, 2))
        return np.array([[c.lo, c.hi] for c in self.roots_])

    def fit_transform(self, f, y=None):
        return self.fit(f).transform()

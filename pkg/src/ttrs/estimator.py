"""scikit-learn style wrapper around :func:`ttrs.hybrid.solve`."""

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .hybrid import HybridConfig, solve
from .problem import TtrsProblem


class HybridTTRS(BaseEstimator):
    """Hybrid solver with estimator-style parameters.

    ``fit`` takes a :class:`TtrsProblem` (or a ``(A, a, B, c, delta1, delta2)``
    tuple) in place of training data. After fitting, ``x_``, ``objective_``,
    ``status_``, ``kkt_`` and ``report_`` hold the result.
    """

    def __init__(self, tol=1e-7, maxiter=1000, preset="class2", rho=None, tau=None, lam_scale=None,
                 beta1=1.0, beta2=1.0, polish=True, restarts=True, x0=None):
        self.tol = tol
        self.maxiter = maxiter
        self.preset = preset
        self.rho = rho
        self.tau = tau
        self.lam_scale = lam_scale
        self.beta1 = beta1
        self.beta2 = beta2
        self.polish = polish
        self.restarts = restarts
        self.x0 = x0

    def _config(self):
        return HybridConfig(
            tol=self.tol,
            maxiter=self.maxiter,
            preset=self.preset,
            rho=self.rho,
            tau=self.tau,
            lam_scale=self.lam_scale,
            beta1=self.beta1,
            beta2=self.beta2,
            polish=self.polish,
            restarts=self.restarts,
            x0=None if self.x0 is None else np.asarray(self.x0, dtype=np.float64),
        )

    def fit(self, problem, y=None):
        if not isinstance(problem, TtrsProblem):
            problem = TtrsProblem(*problem)
        if self.tol <= 0 or self.maxiter <= 0:
            raise ValueError("tol and maxiter must be positive")
        rep = solve(problem, self._config())
        self.report_ = rep
        self.status_ = rep.status
        self.x_ = rep.x
        self.objective_ = rep.objective
        self.kkt_ = rep.kkt
        self.n_features_in_ = problem.n
        return self

    def score(self, problem=None, y=None):
        """Negated objective, so that larger is better."""
        check_is_fitted(self, "report_")
        return -np.inf if self.objective_ is None else -self.objective_

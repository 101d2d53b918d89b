"""Global solver for the single-ellipsoid trust-region subproblem.

Solves::

    min  1/2 x^T A x + a^T x   s.t.  (x - c)^T B (x - c) <= delta^2

by reducing the pencil ``(A, B)`` to diagonal form and locating the
multiplier with a safeguarded Newton iteration on the secular equation.
The hard case (linear term orthogonal to the critical eigenspace) is
resolved with a minimum B-norm particular solution plus a nullspace step.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._validation import check_radius, check_spd, check_sym_matrix, check_vector
from .exceptions import InfeasibleReduction, NotPositiveDefinite, SolverError
from .linalg import b_orthonormalize, gen_eig, nullspace_basis, solve_spd, spectral

__all__ = [
    "SolverConfig",
    "TrsProblem",
    "TrsSolution",
    "TrsSolver",
    "solve_trs",
    "detect_hard_case",
    "hard_case_solution",
    "alternate_in_ball",
    "alternate_in_ellipsoid",
]


@dataclass(frozen=True)
class SolverConfig:
    kkt_tol: float = 1e-7
    hard_tol: float = 1e-8  # projection threshold on the critical eigenspace, relative to 1+|a|
    rank_tol: float = 1e-8  # eigenvalue clustering threshold, relative to 1+max|w|
    root_tol: float = 1e-10  # |‖y‖^2 - delta^2| <= root_tol * delta^2
    maxiter: int = 200


DEFAULT_CONFIG = SolverConfig()


@dataclass
class TrsProblem:
    """``min 1/2 x'Ax + a'x  s.t. (x-c)'B(x-c) <= delta^2``.

    ``B`` and ``c`` default to the identity and the origin (the unit-ball form).
    """

    A: np.ndarray
    a: np.ndarray
    B: Optional[np.ndarray] = None
    c: Optional[np.ndarray] = None
    delta: float = 1.0

    def __post_init__(self):
        self.A = check_sym_matrix(self.A, "A")
        n = self.A.shape[0]
        self.a = check_vector(self.a, "a", n)
        self.B = np.eye(n) if self.B is None else check_spd(check_sym_matrix(self.B, "B", n), "B")
        self.c = np.zeros(n) if self.c is None else check_vector(self.c, "c", n)
        self.delta = check_radius(self.delta, "delta")

    @property
    def n(self):
        return self.A.shape[0]

    def objective(self, x):
        return 0.5 * x @ self.A @ x + self.a @ x

    def constraint(self, x):
        """``(x-c)'B(x-c) - delta^2``; non-positive when ``x`` is feasible."""
        d = x - self.c
        return d @ self.B @ d - self.delta**2


@dataclass
class TrsSolution:
    x: np.ndarray
    mu: float
    hard_case: bool
    objective: float
    q: Optional[np.ndarray] = None
    V: Optional[np.ndarray] = None
    residuals: dict = field(default_factory=dict)


def _ball_secular(lam, g, delta, equality=False, gnorm_ref=None, cfg=DEFAULT_CONFIG):
    """Minimize ``1/2 y'diag(lam)y + g'y`` over ``‖y‖ <= delta`` (or ``= delta``).

    ``lam`` must be ascending. Returns ``(y, mu, hard, crit)`` where ``crit``
    masks the eigenvalues tied with ``lam[0]``.
    """
    lam = np.asarray(lam, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    delta2 = delta * delta
    scale = 1.0 + np.max(np.abs(lam))
    crit = lam - lam[0] <= cfg.rank_tol * scale
    gnorm = np.linalg.norm(g)
    ref = gnorm if gnorm_ref is None else max(gnorm, gnorm_ref)

    if not equality and lam[0] > 0.0:
        y0 = -g / lam
        if y0 @ y0 <= delta2:
            return y0, 0.0, False, crit

    mubar = -lam[0] if equality else max(0.0, -lam[0])
    if np.linalg.norm(g[crit]) <= cfg.hard_tol * (1.0 + ref):
        y = np.zeros_like(g)
        rest = ~crit
        y[rest] = -g[rest] / (lam[rest] + mubar)
        ny2 = y @ y
        if ny2 <= delta2 * (1.0 + 1e-12):
            boundary = equality or mubar > 0.0
            if boundary:
                # any unit vector in the critical eigenspace completes the step
                y[np.flatnonzero(crit)[0]] = np.sqrt(max(delta2 - ny2, 0.0))
            return y, mubar, True, crit

    mu = _secular_root(lam, g, delta, mubar, gnorm, cfg)
    y = -g / (lam + mu)
    return y, mu, False, crit


def _secular_root(lam, g, delta, mubar, gnorm, cfg):
    """Root of ``‖(diag(lam)+mu)^{-1} g‖ = delta`` on ``(mubar, inf)``.

    Newton on ``1/‖y(mu)‖ - 1/delta`` with a bisection safeguard.
    """
    delta2 = delta * delta
    lo = mubar
    hi = mubar + gnorm / delta
    if hi <= lo:
        hi = lo + max(1e-300, abs(lo) * 1e-15)
    mu = hi
    for _ in range(cfg.maxiter):
        s = lam + mu
        if np.any(s <= 0.0):
            mu = 0.5 * (lo + hi)
            continue
        y = g / s
        ny2 = y @ y
        if abs(ny2 - delta2) <= cfg.root_tol * delta2:
            return mu
        if ny2 > delta2:
            lo = mu
        else:
            hi = mu
        if hi - lo <= 4 * np.finfo(float).eps * max(1.0, abs(mu)):
            return hi
        ny = np.sqrt(ny2)
        dh = np.sum(g * g / s**3) / ny**3
        step = (1.0 / ny - 1.0 / delta) / dh if dh > 0 else np.inf
        mu_new = mu - step
        if not (lo < mu_new < hi):
            mu_new = 0.5 * (lo + hi)
        mu = mu_new
    s = lam + hi
    if np.all(s > 0):
        return hi
    raise SolverError("secular iteration did not converge")


class TrsSolver:
    """Reusable TRS solver for a fixed pencil ``(A, B)``, center and radius.

    The generalized eigendecomposition is computed once; each call to
    :meth:`solve` costs ``O(n^2)`` for a new linear term.
    """

    def __init__(self, A, B, c, delta, cfg=DEFAULT_CONFIG, chol=None):
        self.A = A
        self.B = B
        self.c = c
        self.delta = delta
        self.cfg = cfg
        self.w, self.X = gen_eig(A, B, chol=chol)
        self.Ac = A @ c

    @classmethod
    def from_problem(cls, p, cfg=DEFAULT_CONFIG):
        return cls(p.A, p.B, p.c, p.delta, cfg)

    def solve(self, a, equality=False, with_basis=True):
        g = self.X.T @ (self.Ac + a)
        y, mu, hard, crit = _ball_secular(
            self.w, g, self.delta, equality=equality, gnorm_ref=np.linalg.norm(a), cfg=self.cfg
        )
        x = self.c + self.X @ y
        obj = 0.5 * x @ self.A @ x + a @ x
        sol = TrsSolution(x=x, mu=float(mu), hard_case=bool(hard), objective=float(obj))
        if hard and with_basis:
            yq = y.copy()
            yq[crit] = 0.0
            sol.q = self.c + self.X @ yq
            sol.V = self.X[:, crit].copy()
        return sol

    def residuals(self, sol, a):
        A, B, c = self.A, self.B, self.c
        mu, x = sol.mu, sol.x
        stat = np.linalg.norm((A + mu * B) @ x - (mu * (B @ c) - a))
        d = x - c
        comp = abs(mu * (d @ B @ d - self.delta**2))
        curv = float(self.w[0] + mu)  # smallest generalized eigenvalue of the shifted pencil
        return {"stationarity": float(stat), "complementarity": float(comp), "curvature": curv}


def solve_trs(p, cfg=DEFAULT_CONFIG):
    """Global minimizer of a :class:`TrsProblem` with its multiplier and KKT residuals."""
    solver = TrsSolver.from_problem(p, cfg)
    sol = solver.solve(p.a)
    sol.residuals = solver.residuals(sol, p.a)
    return sol


def detect_hard_case(p, solver=None, cfg=DEFAULT_CONFIG):
    """True when the optimal multiplier sits at the pencil threshold with a nullspace step."""
    solver = solver or TrsSolver.from_problem(p, cfg)
    return solver.solve(p.a, with_basis=False).hard_case


def hard_case_solution(p, mu_star, sigma=None, cfg=DEFAULT_CONFIG):
    """Minimum B-norm solution ``q`` and B-orthonormal nullspace basis ``V``.

    ``q = c - H^{-1}(Ac + a)`` with ``H = A + mu*B + sigma * (BV)(BV)^T``,
    which is positive definite for any ``sigma > 0`` in the hard case.
    """
    M = p.A + mu_star * p.B
    M = 0.5 * (M + M.T)
    N = nullspace_basis(M, cfg.rank_tol)
    V = b_orthonormalize(N, p.B) if N.shape[1] else N
    if sigma is None:
        sigma = 1.0 + np.linalg.norm(M, "fro")
    BV = p.B @ V
    rhs = p.A @ p.c + p.a
    for attempt in range(2):
        H = M + sigma * (BV @ BV.T)
        try:
            q = p.c - solve_spd(0.5 * (H + H.T), rhs)
            return q, V
        except NotPositiveDefinite:
            sigma *= 10.0
    raise SolverError("hard-case matrix H is numerically indefinite")


def alternate_in_ellipsoid(q, V, p, M, center, radius, mu_star=None, cfg=DEFAULT_CONFIG):
    """Search the hard-case optimal set of ``p`` for a point inside another ellipsoid.

    Minimizes ``(x-center)'M(x-center)`` over ``x = q + V alpha`` with
    ``alpha'alpha = delta^2 - (q-c)'B(q-c)`` (``<=`` when ``mu_star == 0``).
    Returns the minimizer if it lies in ``{(x-center)'M(x-center) <= radius^2}``
    up to a relative ``1e-8``, else ``None``.
    """
    if V is None or V.shape[1] == 0:
        return None
    d = q - p.c
    rho2 = p.delta**2 - d @ p.B @ d
    if rho2 < 0:
        if rho2 < -1e-12 * max(1.0, p.delta**2):
            raise InfeasibleReduction(f"reduced squared radius is negative ({rho2:.3e})")
        rho2 = 0.0
    e = q - center
    MV = M @ V
    G = V.T @ MV
    h = MV.T @ e
    equality = mu_star is None or mu_star > 0
    if rho2 == 0.0:
        alpha = np.zeros(V.shape[1])
    else:
        dec = spectral(0.5 * (G + G.T))
        gt = dec.eigenvectors.T @ (2.0 * h)
        z, _, _, _ = _ball_secular(2.0 * dec.eigenvalues, gt, np.sqrt(rho2), equality=equality, cfg=cfg)
        alpha = dec.eigenvectors @ z
    x = q + V @ alpha
    r = x - center
    if r @ M @ r <= radius**2 * (1.0 + 1e-8):
        return x
    return None


def alternate_in_ball(q, V, p, ball_radius, mu_star=None, cfg=DEFAULT_CONFIG):
    """Minimum-norm point of the hard-case optimal set, returned if ``‖x‖ <= ball_radius``."""
    n = q.shape[0]
    return alternate_in_ellipsoid(q, V, p, np.eye(n), np.zeros(n), ball_radius, mu_star, cfg)

"""Hybrid TRS/LNGM/ADMM solver for the two-ellipsoid problem.

The driver runs, in order: a feasibility gate, the two single-constraint
trust-region subproblems (exit early when either global solution, or a
hard-case alternate, is feasible), the local non-global minimizers of both
subproblems, and finally an ADMM loop on the splitting ``x = z`` with the
ball constraint on ``z`` and the ellipsoid constraint on ``x``. The best
feasible candidate is certified against the Lagrangian-Hessian conditions.
"""

import enum
import logging
import time
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from scipy.optimize import minimize_scalar, nnls

from .exceptions import SolverError
from .lngm import lngm, lngm_ellipsoid
from .problem import FEAS_RTOL, TtrsProblem
from .trs import (
    DEFAULT_CONFIG,
    SolverConfig,
    TrsProblem,
    TrsSolver,
    alternate_in_ball,
    alternate_in_ellipsoid,
    solve_trs,
)

__all__ = [
    "Source",
    "Status",
    "CurvatureClass",
    "Candidate",
    "CandidatePool",
    "KktPoint",
    "AdmmState",
    "HybridConfig",
    "SolveReport",
    "PRESETS",
    "check_feasibility",
    "screen_global_candidates",
    "collect_lngm_candidates",
    "admm_init",
    "admm_step",
    "augmented_lagrangian",
    "starting_point",
    "homogeneous_dual_start",
    "certify",
    "recover_multipliers",
    "polish_kkt",
    "solve",
]

log = logging.getLogger(__name__)


class Source(str, enum.Enum):
    GLOBAL_TRS1 = "GlobalTrs1"
    GLOBAL_TRS4 = "GlobalTrs4"
    HARD_ALT1 = "HardAlt1"
    HARD_ALT4 = "HardAlt4"
    LNGM1 = "Lngm1"
    LNGM4 = "Lngm4"
    ADMM = "Admm"


_PRIORITY = {
    Source.GLOBAL_TRS1: 0,
    Source.GLOBAL_TRS4: 0,
    Source.HARD_ALT1: 1,
    Source.HARD_ALT4: 1,
    Source.LNGM1: 2,
    Source.LNGM4: 2,
    Source.ADMM: 3,
}


class Status(str, enum.Enum):
    INFEASIBLE = "Infeasible"
    GLOBAL_CERTIFIED = "GlobalCertified"
    STATIONARY_POINT = "StationaryPoint"
    MAX_ITER = "MaxIter"


class CurvatureClass(str, enum.Enum):
    PSD = "PSD"
    ONE_NEGATIVE = "OneNegative"
    MANY_NEGATIVE = "ManyNegative"
    UNKNOWN = "Unknown"


# (tau, rho multiple of |lambda_min(A)|, initial multiplier as a multiple of x0)
PRESETS = {
    "class2": (0.9, 4.0, 2.0),
    "class3": (0.9, 2.0, 4.0),
    "class4": (0.9, 4.0, 4.0),
}


@dataclass
class KktPoint:
    x: np.ndarray
    gamma: float
    mu: float
    stationarity_residual: float
    comp_residuals: tuple
    curvature_class: CurvatureClass
    n_negative: int
    min_eigenvalue: float

    def to_dict(self):
        return {
            "x": self.x.tolist(),
            "gamma": self.gamma,
            "mu": self.mu,
            "stationarity_residual": self.stationarity_residual,
            "comp_residuals": list(self.comp_residuals),
            "curvature_class": self.curvature_class.value,
            "n_negative": self.n_negative,
            "min_eigenvalue": self.min_eigenvalue,
        }


@dataclass
class Candidate:
    x: np.ndarray
    source: Source
    feasible: bool
    objective: float
    certified: bool = False

    def to_dict(self):
        return {
            "x": self.x.tolist(),
            "source": self.source.value,
            "feasible": self.feasible,
            "objective": self.objective,
            "certified": self.certified,
        }


@dataclass
class CandidatePool:
    entries: list = field(default_factory=list)

    def add(self, p, x, source, certified=False):
        x = np.asarray(x, dtype=np.float64)
        feas = p.is_feasible(x, FEAS_RTOL)
        cand = Candidate(x, Source(source), feas, p.objective(x), certified and feas)
        self.entries.append(cand)
        return cand

    def feasible(self):
        return [e for e in self.entries if e.feasible]

    def certified(self):
        return [e for e in self.entries if e.certified]

    def has(self, source):
        return any(e.source is source for e in self.entries)

    def best(self, tie_tol=1e-12):
        """Feasible entry with the smallest objective; near-ties go to the more certified source."""
        feas = self.feasible()
        if not feas:
            return None
        fmin = min(e.objective for e in feas)
        tied = [e for e in feas if e.objective <= fmin + tie_tol * max(1.0, abs(fmin))]
        return min(tied, key=lambda e: (_PRIORITY[e.source], e.objective))

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


@dataclass
class AdmmState:
    x: np.ndarray
    z: np.ndarray
    lam: np.ndarray
    rho: float
    tau: float
    k: int = 0
    primal_residual: float = np.inf
    gamma: float = 0.0  # multiplier of the ball step
    mu: float = 0.0  # multiplier of the ellipsoid step


@dataclass
class HybridConfig:
    """Parameters of :func:`solve`.

    ``rho``, ``tau`` and ``lam_scale`` override the preset when given; ``rho``
    must exceed ``-lambda_min(A)`` so the x-step stays convex. With
    ``restarts`` the ADMM loop is rerun whenever the best point found is not
    certified global: from the default starting point (if ``x0`` was given),
    from the two subproblem minimizers pulled back toward the feasibility
    witness, and from the witness itself.
    """

    tol: float = 1e-7
    maxiter: int = 1000
    preset: str = "class2"
    rho: Optional[float] = None
    tau: Optional[float] = None
    lam_scale: Optional[float] = None
    beta1: float = 1.0
    beta2: float = 1.0
    x0: Optional[np.ndarray] = None
    polish: bool = True
    restarts: bool = True
    monitor: bool = False
    stagnation_window: int = 100
    stagnation_rtol: float = 1e-3
    eig_tol: float = 1e-8
    trs: SolverConfig = DEFAULT_CONFIG

    def admm_parameters(self, lam_min):
        if self.preset not in PRESETS:
            raise ValueError(f"unknown preset {self.preset!r}; choose from {sorted(PRESETS)}")
        tau, rho_mult, lam_scale = PRESETS[self.preset]
        tau = self.tau if self.tau is not None else tau
        rho = self.rho if self.rho is not None else rho_mult * abs(lam_min) + 1.0
        lam_scale = self.lam_scale if self.lam_scale is not None else lam_scale
        if not 0.0 < tau < 1.0:
            raise ValueError(f"tau must lie in (0, 1), got {tau}")
        if rho <= max(0.0, -lam_min):
            raise ValueError(f"rho={rho} must exceed max(0, -lambda_min(A))={max(0.0, -lam_min)}")
        return rho, tau, lam_scale


@dataclass
class SolveReport:
    status: Status
    best: Optional[Candidate] = None
    kkt: Optional[KktPoint] = None
    pool: CandidatePool = field(default_factory=CandidatePool)
    trace: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)
    v_ch: Optional[float] = None
    witness: Optional[np.ndarray] = None
    lngm_reasons: dict = field(default_factory=dict)
    admm: dict = field(default_factory=dict)

    @property
    def x(self):
        return None if self.best is None else self.best.x

    @property
    def objective(self):
        return None if self.best is None else self.best.objective

    def to_dict(self, include_trace=True):
        out = {
            "status": self.status.value,
            "objective": self.objective,
            "x": None if self.best is None else self.best.x.tolist(),
            "source": None if self.best is None else self.best.source.value,
            "kkt": None if self.kkt is None else self.kkt.to_dict(),
            "v_ch": self.v_ch,
            "pool": [e.to_dict() for e in self.pool],
            "lngm": dict(self.lngm_reasons),
            "admm": dict(self.admm),
            "timings": dict(self.timings),
        }
        if include_trace:
            out["trace"] = list(self.trace)
        return out


def check_feasibility(p, cfg=DEFAULT_CONFIG):
    """Minimize ``(x-c)'B(x-c) - delta2^2`` over the ball; feasible iff the value is <= 1e-10."""
    sub = TrsProblem(2.0 * p.B, -2.0 * (p.B @ p.c), None, None, p.delta1)
    sol = solve_trs(sub, cfg)
    x = sol.x
    # clip round-off so the witness lies in the ball exactly
    nx = np.linalg.norm(x)
    if nx > p.delta1:
        x = x * (p.delta1 / nx)
    v_ch = p.g2(x)
    feasible = v_ch <= 1e-10
    return feasible, (x if feasible else None), float(v_ch)


def screen_global_candidates(p, pool=None, cfg=DEFAULT_CONFIG):
    """Global solutions of both subproblems, plus hard-case alternates, tagged in a pool.

    A candidate is certified (global for the two-ellipsoid problem) when it is
    feasible, since it minimizes a relaxation.
    """
    pool = CandidatePool() if pool is None else pool
    p1, p4 = p.trs1(), p.trs2()
    s1 = TrsSolver.from_problem(p1, cfg).solve(p1.a)
    s4 = TrsSolver.from_problem(p4, cfg).solve(p4.a)
    pool.add(p, s1.x, Source.GLOBAL_TRS1, certified=True)
    pool.add(p, s4.x, Source.GLOBAL_TRS4, certified=True)
    if s4.hard_case and not pool.entries[-1].feasible:
        alt = alternate_in_ball(s4.q, s4.V, p4, p.delta1, mu_star=s4.mu, cfg=cfg)
        if alt is not None:
            pool.add(p, alt, Source.HARD_ALT4, certified=True)
    if s1.hard_case and not pool.entries[0].feasible:
        alt = alternate_in_ellipsoid(s1.q, s1.V, p1, p.B, p.c, p.delta2, mu_star=s1.mu, cfg=cfg)
        if alt is not None:
            pool.add(p, alt, Source.HARD_ALT1, certified=True)
    return pool


def collect_lngm_candidates(p, pool=None):
    """Add TTRS-feasible local non-global minimizers of both subproblems to the pool.

    Returns ``(pool, reasons)`` where ``reasons`` maps ``"1a"``/``"4"`` to the
    screening outcome.
    """
    pool = CandidatePool() if pool is None else pool
    r1 = lngm(p.A, p.a, p.delta1)
    r4 = lngm_ellipsoid(p.A, p.a, p.B, p.c, p.delta2)
    reasons = {"1a": r1.reason.value, "4": r4.reason.value}
    for res, src in ((r1, Source.LNGM1), (r4, Source.LNGM4)):
        if res.found and p.is_feasible(res.x):
            pool.add(p, res.x, src)
    return pool, reasons


def augmented_lagrangian(p, x, z, lam, rho):
    d = x - z
    return float(0.5 * x @ p.A @ x + p.a @ x + lam @ d + 0.5 * rho * (d @ d))


class _XStep:
    """Cached solver for the ellipsoid step ``min L(x, z, lam)`` over ``E2``."""

    def __init__(self, p, rho, cfg=DEFAULT_CONFIG):
        n = p.n
        self.p = p
        self.rho = rho
        self.solver = TrsSolver(p.A + rho * np.eye(n), p.B, p.c, p.delta2, cfg)

    def __call__(self, z, lam):
        return self.solver.solve(self.p.a + lam - self.rho * z, with_basis=False)


def admm_init(p, x0, rho, tau, lam_scale):
    x0 = np.asarray(x0, dtype=np.float64)
    return AdmmState(x=x0.copy(), z=x0.copy(), lam=lam_scale * x0, rho=float(rho), tau=float(tau))


def admm_step(state, p, x_step=None):
    """One ADMM sweep: ball step on ``z``, ellipsoid step on ``x``, dual update."""
    rho, tau = state.rho, state.tau
    w = state.x + state.lam / rho
    nw = np.linalg.norm(w)
    if nw <= p.delta1:
        z, gamma = w, 0.0
    else:
        z, gamma = w * (p.delta1 / nw), rho * (nw / p.delta1 - 1.0)
    x_step = x_step or _XStep(p, rho)
    try:
        sol = x_step(z, state.lam)
    except SolverError as exc:
        raise SolverError(f"ellipsoid step failed at iteration {state.k}: {exc}") from exc
    x = sol.x
    lam = state.lam + tau * rho * (x - z)
    return AdmmState(
        x=x,
        z=z,
        lam=lam,
        rho=rho,
        tau=tau,
        k=state.k + 1,
        primal_residual=float(np.linalg.norm(x - z)),
        gamma=float(gamma),
        mu=float(sol.mu),
    )


def starting_point(p, beta1=1.0, beta2=1.0, witness=None, cfg=DEFAULT_CONFIG, max_doublings=20):
    """Feasible starting point from the two penalized subproblems.

    Each penalty weight is tried at zero, then doubled from its initial value
    until the penalized solution is feasible; the feasible solution with the
    lower objective is returned. When neither becomes feasible within
    ``2**max_doublings`` times the initial weight the feasibility witness is
    used instead.
    """
    n = p.n
    Bc = p.B @ p.c

    def pen1(beta):
        sub = TrsProblem(p.A + 2.0 * beta * p.B, p.a - 2.0 * beta * Bc, None, None, p.delta1)
        return solve_trs(sub, cfg).x

    def pen2(beta):
        sub = TrsProblem(p.A + 2.0 * beta * np.eye(n), p.a, p.B, p.c, p.delta2)
        return solve_trs(sub, cfg).x

    found = []
    for pen, beta0 in ((pen1, beta1), (pen2, beta2)):
        betas = [0.0] + [beta0 * 2.0**k for k in range(max_doublings + 1)]
        for beta in betas:
            x = pen(beta)
            if p.is_feasible(x):
                found.append(x)
                break
    if not found:
        if witness is None:
            _, witness, _ = check_feasibility(p, cfg)
        if witness is None:
            raise SolverError("problem is infeasible; no starting point exists")
        return witness
    return min(found, key=p.objective)


def _active_set(p, x, rtol):
    d = x - p.c
    return bool(x @ x >= p.delta1**2 * (1.0 - rtol)), bool(d @ p.B @ d >= p.delta2**2 * (1.0 - rtol))


def recover_multipliers(p, x, active_rtol=1e-8, active=None):
    """Nonnegative least-squares multipliers for the stationarity equation at ``x``.

    A multiplier is fixed at zero when its constraint is inactive (relative
    slack above ``active_rtol``) or excluded by an explicit ``active`` pair.
    """
    act1, act2 = _active_set(p, x, active_rtol) if active is None else active
    Bd = p.B @ (x - p.c)
    r = -(p.A @ x + p.a)
    cols, which = [], []
    if act1:
        cols.append(x)
        which.append(0)
    if act2:
        cols.append(Bd)
        which.append(1)
    mult = [0.0, 0.0]
    if cols:
        M = np.column_stack(cols)
        sol, _ = nnls(M, r)
        for i, v in zip(which, sol):
            mult[i] = float(v)
    return mult[0], mult[1]


def certify(p, x, gamma, mu, eig_tol=1e-8):
    """KKT residuals and the inertia of the Lagrangian Hessian at ``(x, gamma, mu)``."""
    x = np.asarray(x, dtype=np.float64)
    H = p.A + gamma * np.eye(p.n) + mu * p.B
    stat = float(np.linalg.norm(H @ x + p.a - mu * (p.B @ p.c)))
    comp = (abs(gamma * p.g1(x)), abs(mu * p.g2(x)))
    w = np.linalg.eigvalsh(0.5 * (H + H.T))
    n_neg = int(np.sum(w < -eig_tol))
    if n_neg == 0:
        cls = CurvatureClass.PSD
    elif n_neg == 1:
        cls = CurvatureClass.ONE_NEGATIVE
    else:
        cls = CurvatureClass.MANY_NEGATIVE
    if n_neg > 0 and _licq_fails(p, x):
        cls = CurvatureClass.UNKNOWN
    return KktPoint(x, float(gamma), float(mu), stat, comp, cls, n_neg, float(w[0]))


def _licq_fails(p, x, active_rtol=1e-8):
    """Both constraints active with (nearly) parallel gradients."""
    if x @ x < p.delta1**2 * (1.0 - active_rtol):
        return False
    d = x - p.c
    Bd = p.B @ d
    if d @ Bd < p.delta2**2 * (1.0 - active_rtol):
        return False
    s = np.linalg.svd(np.column_stack([x, Bd]), compute_uv=False)
    return s[-1] <= 1e-10 * s[0]


def polish_kkt(p, x, gamma, mu, active=None, maxiter=20, active_rtol=1e-6):
    """Newton refinement of the KKT system with the given constraints held active.

    ``active`` defaults to the constraints whose relative slack at ``x`` is at
    most ``active_rtol``. Returns ``(x, gamma, mu)`` or ``None`` when the
    refinement does not converge, leaves the neighbourhood, violates the
    other constraint, or yields a negative multiplier.
    """
    n = p.n
    act1, act2 = _active_set(p, x, active_rtol) if active is None else active
    if not (act1 or act2):
        return None
    g = gamma if act1 else 0.0
    m = mu if act2 else 0.0
    xk = x.copy()
    Bc = p.B @ p.c
    scale = 1.0 + np.linalg.norm(p.a) + np.linalg.norm(p.A, 1) * np.linalg.norm(x)
    for _ in range(maxiter):
        H = p.A + g * np.eye(n) + m * p.B
        dk = xk - p.c
        Bd = p.B @ dk
        F = [H @ xk + p.a - m * Bc]
        J_top = [H]
        rows = []
        if act1:
            J_top.append(xk[:, None])
            rows.append((xk, 0.5 * (xk @ xk - p.delta1**2)))
        if act2:
            J_top.append(Bd[:, None])
            rows.append((Bd, 0.5 * (dk @ Bd - p.delta2**2)))
        k = len(rows)
        J = np.zeros((n + k, n + k))
        J[:n, :] = np.hstack(J_top)
        for i, (grad, val) in enumerate(rows):
            J[n + i, :n] = grad
            F.append(np.array([val]))
        Fv = np.concatenate(F)
        if np.linalg.norm(Fv[:n]) <= 1e-14 * scale and np.all(np.abs(Fv[n:]) <= 1e-15 * max(1.0, p.delta1**2, p.delta2**2)):
            break
        try:
            step = np.linalg.solve(J, -Fv)
        except np.linalg.LinAlgError:
            return None
        xk = xk + step[:n]
        i = n
        if act1:
            g += step[i]
            i += 1
        if act2:
            m += step[i]
    else:
        pass
    if not np.all(np.isfinite(xk)):
        return None
    if g < -1e-10 * (1.0 + abs(g)) or m < -1e-10 * (1.0 + abs(m)):
        return None
    if np.linalg.norm(xk - x) > 1e-2 * (1.0 + np.linalg.norm(x)):
        return None
    if not p.is_feasible(xk, 1e-10):
        return None
    return xk, max(g, 0.0), max(m, 0.0)


def _restore_feasibility(p, x, witness):
    """Largest step from the witness toward ``x`` that stays inside both ellipsoids."""
    if p.is_feasible(x, 0.0):
        return x
    d = x - witness
    t = 1.0
    for M, center, r in ((np.eye(p.n), np.zeros(p.n), p.delta1), (p.B, p.c, p.delta2)):
        e = witness - center
        qa = d @ M @ d
        qb = 2.0 * (e @ M @ d)
        qc = e @ M @ e - r * r
        if qa <= 0:
            continue
        disc = max(qb * qb - 4 * qa * qc, 0.0)
        t = min(t, (-qb + np.sqrt(disc)) / (2 * qa))
    t = max(0.0, min(1.0, t)) * (1.0 - 1e-14)
    return witness + t * d


def _run_admm(p, x0, cfg, rho, tau, lam_scale, lam_min):
    state = admm_init(p, x0, rho, tau, lam_scale)
    x_step = _XStep(p, rho, cfg.trs)
    trace = []
    hist = []
    converged = False
    stagnated = False
    L_prev = augmented_lagrangian(p, state.x, state.z, state.lam, rho)
    for it in range(cfg.maxiter):
        new = admm_step(state, p, x_step)
        rec = {"k": new.k, "primal_residual": new.primal_residual, "objective": p.objective(new.x)}
        if cfg.monitor:
            L_new = augmented_lagrangian(p, new.x, new.z, new.lam, rho)
            dx = new.x - state.x
            dl = new.lam - state.lam
            rec["lagrangian"] = L_new
            rec["descent"] = L_prev - L_new
            rec["descent_bound"] = 0.5 * (lam_min + rho) * (dx @ dx) - (dl @ dl) / (tau * rho)
            L_prev = L_new
        trace.append(rec)
        state = new
        hist.append(new.primal_residual)
        if new.primal_residual <= cfg.tol:
            converged = True
            break
        w = cfg.stagnation_window
        if len(hist) > w and hist[-1] > (1.0 - cfg.stagnation_rtol) * hist[-1 - w]:
            stagnated = True
            break
    return state, trace, converged, stagnated


def homogeneous_dual_start(p, null_rtol=1e-6):
    """Primal point recovered from the Lagrangian dual when ``a = 0`` and ``c = 0``.

    The dual ``max -gamma(mu) delta1^2 - mu delta2^2`` with
    ``gamma(mu) = max(0, -lambda_min(A + mu B))`` is a concave problem in ``mu``
    alone. A maximizer's Hessian ``A + gamma I + mu B`` is singular and its
    nullspace holds a point meeting the active constraints; the point returned
    is only as accurate as the computed ``mu`` and is meant as a start.
    """
    d1, d2 = p.delta1**2, p.delta2**2

    def gam(mu):
        return max(0.0, -np.linalg.eigvalsh(p.A + mu * p.B)[0])

    def negdual(mu):
        return gam(mu) * d1 + mu * d2

    mu_hi = gam(0.0) * d1 / d2
    if mu_hi <= 0.0:
        return np.zeros(p.n)
    res = minimize_scalar(negdual, bounds=(0.0, mu_hi), method="bounded", options={"xatol": 1e-12 * (1.0 + mu_hi)})
    mu = float(res.x)
    g = gam(mu)
    w, Q = np.linalg.eigh(p.A + g * np.eye(p.n) + mu * p.B)
    V = Q[:, w <= w[0] + null_rtol * (1.0 + np.abs(w).max())]
    # ratio of the two constraint norms across the nullspace
    G = V.T @ p.B @ V
    r, E = np.linalg.eigh(0.5 * (G + G.T))
    target = d2 / d1
    if g > 0.0 and mu > 0.0:
        # mu is only approximate, so the target ratio may sit just outside [r0, r_end]
        s = np.clip((target - r[0]) / (r[-1] - r[0]), 0.0, 1.0) if r[-1] > r[0] else 0.0
        alpha = np.sqrt(1.0 - s) * E[:, 0] + np.sqrt(s) * E[:, -1]
        x = V @ alpha * p.delta1
    elif g > 0.0:
        x = V @ E[:, 0] * p.delta1
    else:
        x = V @ E[:, -1] * (p.delta2 / np.sqrt(r[-1]))
    return x


def _admm_candidate(p, x0, cfg, params, witness):
    """One ADMM run followed by the active-set polish and a feasibility safeguard."""
    rho, tau, lam_scale, lam_min = params
    state, trace, converged, stagnated = _run_admm(p, x0, cfg, rho, tau, lam_scale, lam_min)
    x = _restore_feasibility(p, state.x, witness)
    if cfg.polish:
        # an unconverged iterate may sit near a vertex; try each plausible active set
        near1, near2 = _active_set(p, x, 1e-2)
        sets = [s for s in ((True, True), (True, False), (False, True)) if (near1 or not s[0]) and (near2 or not s[1])]
        polished = []
        for act in sets:
            g0, m0 = recover_multipliers(p, x, active=act)
            pol = polish_kkt(p, x, g0, m0, active=act)
            if pol is not None:
                polished.append(pol[0])
        fx = p.objective(x)
        best = min(polished, key=p.objective, default=x)
        # keep the KKT point unless the raw iterate is clearly better
        if p.objective(best) > fx + 1e-6 * (1.0 + abs(fx)):
            best = x
        x = best
    return x, state, trace, converged, stagnated


def solve(p, cfg=None):
    """Run the hybrid algorithm on a :class:`TtrsProblem` and return a :class:`SolveReport`."""
    cfg = cfg or HybridConfig()
    if not isinstance(p, TtrsProblem):
        raise TypeError("solve expects a TtrsProblem")
    timings = {}
    t_start = time.perf_counter()

    t = time.perf_counter()
    feasible, witness, v_ch = check_feasibility(p, cfg.trs)
    timings["feasibility"] = time.perf_counter() - t
    if not feasible:
        timings["total"] = time.perf_counter() - t_start
        return SolveReport(Status.INFEASIBLE, v_ch=v_ch, timings=timings)

    t = time.perf_counter()
    pool = screen_global_candidates(p, cfg=cfg.trs)
    timings["screening"] = time.perf_counter() - t
    certified = pool.certified()
    if certified:
        best = min(certified, key=lambda e: (e.objective, _PRIORITY[e.source]))
        gamma, mu = recover_multipliers(p, best.x)
        kkt = certify(p, best.x, gamma, mu, cfg.eig_tol)
        timings["total"] = time.perf_counter() - t_start
        return SolveReport(Status.GLOBAL_CERTIFIED, best, kkt, pool, v_ch=v_ch, witness=witness, timings=timings)

    t = time.perf_counter()
    pool, reasons = collect_lngm_candidates(p, pool)
    timings["lngm"] = time.perf_counter() - t

    t = time.perf_counter()
    lam_min = float(np.linalg.eigvalsh(p.A)[0])
    rho, tau, lam_scale = cfg.admm_parameters(lam_min)
    x0 = cfg.x0 if cfg.x0 is not None else starting_point(p, cfg.beta1, cfg.beta2, witness, cfg.trs)
    x0 = np.asarray(x0, dtype=np.float64)
    timings["starting_point"] = time.perf_counter() - t

    t = time.perf_counter()
    params = (rho, tau, lam_scale, lam_min)
    starts = [x0]
    if cfg.restarts:
        if cfg.x0 is not None:
            starts.append(starting_point(p, cfg.beta1, cfg.beta2, witness, cfg.trs))
        # relaxation minimizers pulled back into the feasible set
        for e in pool:
            if e.source in (Source.GLOBAL_TRS1, Source.GLOBAL_TRS4):
                starts.append(_restore_feasibility(p, e.x, witness))
        starts.append(witness)
        if not np.any(p.a) and not np.any(p.c):
            starts.append(_restore_feasibility(p, homogeneous_dual_start(p), witness))
    runs = []
    trace = []
    for i, xs in enumerate(starts):
        if any(np.allclose(xs, r["x0"], rtol=0.0, atol=1e-12) for r in runs):
            continue
        x_admm, state, tr, conv, stag = _admm_candidate(p, xs, cfg, params, witness)
        cand = pool.add(p, x_admm, Source.ADMM)
        runs.append({"x0": xs, "candidate": cand, "iterations": state.k, "converged": conv,
                     "stagnated": stag, "primal_residual": state.primal_residual})
        if i == 0:
            trace = tr
        best = pool.best()
        g, m = recover_multipliers(p, best.x)
        if _globally_certified(p, certify(p, best.x, g, m, cfg.eig_tol), cfg.tol):
            break
    timings["admm"] = time.perf_counter() - t

    best = pool.best()
    gamma, mu = recover_multipliers(p, best.x)
    kkt = certify(p, best.x, gamma, mu, cfg.eig_tol)
    if _globally_certified(p, kkt, cfg.tol):
        status = Status.GLOBAL_CERTIFIED
    elif best.source is not Source.ADMM or any(r["converged"] for r in runs if r["candidate"] is best):
        status = Status.STATIONARY_POINT
    else:
        status = Status.MAX_ITER
    timings["total"] = time.perf_counter() - t_start
    first = runs[0]
    admm_info = {
        "iterations": first["iterations"],
        "converged": first["converged"],
        "stagnated": first["stagnated"],
        "primal_residual": first["primal_residual"],
        "restarts": len(runs) - 1,
        "rho": rho,
        "tau": tau,
        "lam_scale": lam_scale,
        "x0": x0.tolist(),
    }
    return SolveReport(status, best, kkt, pool, trace, timings, v_ch, witness, reasons, admm_info)


def _globally_certified(p, kkt, tol):
    if kkt.min_eigenvalue < -tol:
        return False
    scale = 1.0 + np.linalg.norm(p.a) + kkt.mu * np.linalg.norm(p.B @ p.c)
    if kkt.stationarity_residual > tol * scale:
        return False
    comp_scale = max(1.0, p.delta1**2, p.delta2**2)
    return all(r <= tol * comp_scale * (1.0 + kkt.gamma + kkt.mu) for r in kkt.comp_residuals)

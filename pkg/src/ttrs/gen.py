"""Random instance generators and a brute-force oracle for ``n = 2``.

Every generator is a deterministic function of its :class:`GenSpec`; the
returned :class:`Instance` carries the problem plus whatever ground truth the
construction guarantees (engineered local minimizers, known optima).
"""

import enum
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize
from scipy.stats import ortho_group

from .exceptions import EmptyFeasibleSample, GenError, SolverError
from .hybrid import screen_global_candidates
from .linalg import spectral, sym_sqrt
from .lngm import lngm, lngm_ellipsoid
from .problem import TtrsProblem
from .trs import TrsProblem, solve_trs

__all__ = [
    "ProblemClass",
    "GenSpec",
    "Instance",
    "DENSITIES",
    "generate",
    "gen_class2",
    "gen_class2_ellipsoid",
    "gen_class3",
    "gen_class4",
    "reference_examples",
    "oracle_2d",
]

DENSITIES = (1.0, 0.1, 0.01, 0.001)
MAX_DRAWS = 100


class ProblemClass(str, enum.Enum):
    LNGM_ENGINEERED = "LngmEngineered"
    LNGM_ENGINEERED_ELLIPSOID = "LngmEngineeredEllipsoid"
    NO_LNGM_MULTIPLICITY = "NoLngmMultiplicity"
    NO_LNGM_ORTHOGONAL = "NoLngmOrthogonal"
    HOMOGENEOUS = "Homogeneous"
    EXAMPLE1 = "Example1"
    EXAMPLE2 = "Example2"


# short names used on the command line and in file names
ALIASES = {
    "class2": ProblemClass.LNGM_ENGINEERED,
    "class2e": ProblemClass.LNGM_ENGINEERED_ELLIPSOID,
    "class3a": ProblemClass.NO_LNGM_MULTIPLICITY,
    "class3b": ProblemClass.NO_LNGM_ORTHOGONAL,
    "class4": ProblemClass.HOMOGENEOUS,
    "example1": ProblemClass.EXAMPLE1,
    "example2": ProblemClass.EXAMPLE2,
}


def parse_class(name):
    if isinstance(name, ProblemClass):
        return name
    key = str(name)
    if key.lower() in ALIASES:
        return ALIASES[key.lower()]
    try:
        return ProblemClass(key)
    except ValueError:
        choices = sorted(ALIASES) + [c.value for c in ProblemClass]
        raise ValueError(f"unknown problem class {name!r}; choose from {choices}") from None


@dataclass(frozen=True)
class GenSpec:
    n: int
    density: float = 1.0
    klass: ProblemClass = ProblemClass.LNGM_ENGINEERED
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "klass", parse_class(self.klass))
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"n must be an integer >= 2, got {self.n}")
        if not any(np.isclose(self.density, d, rtol=0, atol=1e-15) for d in DENSITIES):
            raise ValueError(f"density must be one of {DENSITIES}, got {self.density}")
        if self.klass is ProblemClass.NO_LNGM_MULTIPLICITY and self.n < 3:
            raise ValueError("the multiplicity construction needs n >= 3")


@dataclass
class Instance:
    problem: TtrsProblem
    spec: GenSpec
    info: dict = field(default_factory=dict)


def _mask(rng, n, density):
    """Symmetric Erdos-Renyi mask; each entry on or above the diagonal is kept with probability ``density``."""
    if density >= 1.0:
        return np.ones((n, n), dtype=bool)
    upper = np.triu(rng.random((n, n)) < density)
    return upper | upper.T


def _spectrum(rng, n, multiplicity=1):
    lam1 = rng.uniform(-10.0, -5.0)
    rest = rng.uniform(lam1 + 1.0, 10.0, size=n - multiplicity)
    # uniform draws never hit the open endpoint in practice; nudge just in case
    rest = np.maximum(rest, np.nextafter(lam1 + 1.0, np.inf))
    return np.concatenate([np.full(multiplicity, lam1), np.sort(rest)])


def _indefinite_matrix(rng, n, density, multiplicity=1):
    """Symmetric matrix with ``lambda_1`` in ``[-10, -5]`` of the given multiplicity.

    Dense draws fix the spectrum and rotate it by a Haar orthogonal matrix.
    Sparse draws mask a Gaussian matrix and rescale it; the multiplicity
    option requires a dense draw.
    """
    if density >= 1.0 or multiplicity > 1:
        lam = _spectrum(rng, n, multiplicity)
        Q = ortho_group.rvs(n, random_state=rng) if n > 1 else np.ones((1, 1))
        A = (Q * lam) @ Q.T
        return 0.5 * (A + A.T)
    for _ in range(MAX_DRAWS):
        M = rng.standard_normal((n, n)) * _mask(rng, n, density)
        A = np.triu(M) + np.triu(M, 1).T
        w = np.linalg.eigvalsh(A)
        if w[0] < -1e-8 * (1.0 + abs(w[-1])):
            return A * (rng.uniform(5.0, 10.0) / abs(w[0]))
    raise GenError("could not draw a sparse matrix with a negative eigenvalue")


def _spd_matrix(rng, n, density):
    """``M M' / s + 0.1 I`` with a masked Gaussian ``M``."""
    M = rng.standard_normal((n, n)) * _mask(rng, n, density)
    B = M @ M.T / max(1.0, density * n) + 0.1 * np.eye(n)
    return 0.5 * (B + B.T)


def gen_class2(spec):
    """Instance whose ball subproblem has a feasible local non-global minimizer ``v1``.

    ``v1`` is the unit eigenvector of ``lambda_1(A)`` and ``a = -(A + mu0 I) v1``
    with ``mu0`` drawn from ``(max(0, -lambda_2), -lambda_1)``; then ``v1`` is the
    local non-global minimizer of the ball subproblem and ``-v1`` its global
    minimizer. The ellipsoid is centred at ``t v1`` and sized to contain ``v1``
    but not ``-v1``.
    """
    rng = np.random.default_rng(spec.seed)
    n = spec.n
    delta1 = 1.0
    for _ in range(MAX_DRAWS):
        A = _indefinite_matrix(rng, n, spec.density)
        dec = spectral(A)
        lam = dec.eigenvalues
        if lam[1] - lam[0] <= 1e-6 * (1.0 + abs(lam[0])):
            continue
        v1 = dec.eigenvectors[:, 0] * delta1
        lo, hi = max(0.0, -lam[1]), -lam[0]
        mu0 = rng.uniform(lo + 0.05 * (hi - lo), hi - 0.05 * (hi - lo))
        a = -(A @ v1 + mu0 * v1)
        B = _spd_matrix(rng, n, spec.density)
        t = rng.uniform(0.1, 0.9)
        c = t * v1
        qv = (v1 - c) @ B @ (v1 - c)
        qm = (v1 + c) @ B @ (v1 + c)
        if not qm > qv * (1.0 + 1e-6):
            continue
        s = rng.uniform(0.05, 0.95)
        delta2 = float(np.sqrt(qv + s * (qm - qv)))
        p = TtrsProblem(A, a, B, c, delta1, delta2)
        return Instance(p, spec, {"lngm1": v1, "trs1_global": -v1, "mu0": float(mu0)})
    raise GenError(f"class-2 construction failed after {MAX_DRAWS} draws")


def gen_class2_ellipsoid(spec):
    """Mirror of :func:`gen_class2` on the ellipsoid subproblem.

    In ``y = B^{1/2}(x - c)`` the ellipsoid becomes a ball and the same
    eigenvector construction applies; the ball is then centred so that it
    contains the engineered local minimizer but not the subproblem's global
    minimizer.
    """
    rng = np.random.default_rng(spec.seed)
    n = spec.n
    delta1 = 1.0
    for _ in range(MAX_DRAWS):
        A = _indefinite_matrix(rng, n, spec.density)
        B = _spd_matrix(rng, n, spec.density)
        Bh = sym_sqrt(B)
        Bhi = sym_sqrt(B, inverse=True)
        At = Bhi @ A @ Bhi
        dec = spectral(0.5 * (At + At.T))
        lam = dec.eigenvalues
        if lam[0] >= 0.0 or lam[1] - lam[0] <= 1e-6 * (1.0 + abs(lam[0])):
            continue
        u = dec.eigenvectors[:, 0]
        w = Bhi @ u  # x-space direction of the engineered minimizer, per unit delta2
        # ‖c + w r‖ = (1-t) r ‖w‖ <= delta1 < (1+t) r ‖w‖ with c = -t r w; a deep
        # cut (large t, r away from its lower limit) keeps the low region of the
        # ellipsoid outside the ball
        t = rng.uniform(0.5, 0.9)
        lo_r, hi_r = delta1 / ((1.0 + t) * np.linalg.norm(w)), delta1 / ((1.0 - t) * np.linalg.norm(w))
        delta2 = float(lo_r + rng.uniform(0.35, 0.95) * (hi_r - lo_r))
        c = -t * delta2 * w
        lo, hi = max(0.0, -lam[1]), -lam[0]
        mu0 = rng.uniform(lo + 0.05 * (hi - lo), hi - 0.05 * (hi - lo))
        ut = delta2 * u
        at = -(At @ ut + mu0 * ut)
        a = Bh @ at - A @ c
        p = TtrsProblem(A, a, B, c, delta1, delta2)
        x_loc = c + Bhi @ ut
        x_glob = c - Bhi @ ut
        if not (p.is_feasible(x_loc) and not p.in_e1(x_glob, 1e-6)):
            continue
        return Instance(p, spec, {"lngm4": x_loc, "trs4_global": x_glob, "mu0": float(mu0)})
    raise GenError(f"ellipsoid class-2 construction failed after {MAX_DRAWS} draws")


def _no_feasible_shortcut(p):
    """True when neither subproblem has a feasible global or local non-global minimizer."""
    try:
        pool = screen_global_candidates(p)
    except SolverError:
        return False
    if pool.certified():
        return False
    for res in (lngm(p.A, p.a, p.delta1), lngm_ellipsoid(p.A, p.a, p.B, p.c, p.delta2)):
        if res.found and p.is_feasible(res.x):
            return False
    return True


def gen_class3(spec):
    """Instance where every subproblem global and local non-global minimizer is infeasible.

    ``NoLngmMultiplicity`` repeats ``lambda_1``; ``NoLngmOrthogonal`` removes the
    component of ``a`` along the ``lambda_1`` eigenvector. Ellipsoids are drawn
    by rejection until the shortcuts all fail.
    """
    rng = np.random.default_rng(spec.seed)
    n = spec.n
    delta1 = 1.0
    mult = spec.klass is ProblemClass.NO_LNGM_MULTIPLICITY
    for _ in range(MAX_DRAWS):
        A = _indefinite_matrix(rng, n, spec.density, multiplicity=2 if mult else 1)
        a = rng.standard_normal(n) * rng.uniform(1.0, 5.0)
        if not mult:
            dec = spectral(A)
            if dec.eigenvalues[1] - dec.eigenvalues[0] <= 1e-6 * (1.0 + abs(dec.eigenvalues[0])):
                continue
            v = dec.eigenvectors[:, 0]
            a = a - (v @ a) * v
        B = _spd_matrix(rng, n, spec.density)
        d = rng.standard_normal(n)
        c = d / np.linalg.norm(d) * rng.uniform(0.0, 0.9) * delta1
        # size the ellipsoid to cut off the ball subproblem's minimizer
        x1 = solve_trs(TrsProblem(A, a, None, None, delta1)).x
        q1 = (x1 - c) @ B @ (x1 - c)
        delta2 = float(np.sqrt(q1 * rng.uniform(0.2, 0.9)))
        p = TtrsProblem(A, a, B, c, delta1, delta2)
        if _no_feasible_shortcut(p):
            return Instance(p, spec, {"method": "multiplicity" if mult else "orthogonal"})
    raise GenError(f"class-3 construction failed after {MAX_DRAWS} draws")


def gen_class4(spec):
    """Homogeneous instance: ``a = 0`` and ``c = 0``."""
    rng = np.random.default_rng(spec.seed)
    n = spec.n
    A = _indefinite_matrix(rng, n, spec.density)
    B = _spd_matrix(rng, n, spec.density)
    delta1 = 1.0
    delta2 = float(rng.uniform(0.5, 1.5))
    p = TtrsProblem(A, np.zeros(n), B, np.zeros(n), delta1, delta2)
    return Instance(p, spec, {})


def reference_examples():
    """The two 2-D examples with their known solutions.

    The objective ``x'A0 x + a'x`` is encoded with ``A = 2 A0``.
    """
    A = 2.0 * np.array([[-4.0, 1.0], [1.0, -2.0]])
    a = np.array([1.0, 1.0])
    s = 1.0 / np.sqrt(2.0)
    ex1 = TtrsProblem(A, a, np.diag([3.0, 1.0]), np.zeros(2), 1.0, np.sqrt(2.0))
    r3, r5 = np.sqrt(3.0 / 8.0), np.sqrt(5.0 / 8.0)
    ex2 = TtrsProblem(A, a, np.diag([9.0 / 4.0, 1.0 / 4.0]), np.zeros(2), 1.0, 1.0)
    return [
        (ex1, {"optimum": -4.0, "solutions": [np.array([s, -s]), np.array([-s, s])]}),
        (
            ex2,
            {
                "optimum": ex2.objective(np.array([r3, -r5])),
                "solutions": [np.array([r3, -r5])],
                "stationary": {
                    "one_negative": [np.array([-r3, r5]), np.array([-r3, -r5])],
                    "two_negative": [np.array([r3, r5])],
                },
            },
        ),
    ]


_GENERATORS = {
    ProblemClass.LNGM_ENGINEERED: gen_class2,
    ProblemClass.LNGM_ENGINEERED_ELLIPSOID: gen_class2_ellipsoid,
    ProblemClass.NO_LNGM_MULTIPLICITY: gen_class3,
    ProblemClass.NO_LNGM_ORTHOGONAL: gen_class3,
    ProblemClass.HOMOGENEOUS: gen_class4,
}


def generate(spec):
    """Dispatch on ``spec.klass``; the example classes ignore ``n``, density and seed."""
    if spec.klass is ProblemClass.EXAMPLE1:
        p, info = reference_examples()[0]
        return Instance(p, spec, info)
    if spec.klass is ProblemClass.EXAMPLE2:
        p, info = reference_examples()[1]
        return Instance(p, spec, info)
    return _GENERATORS[spec.klass](spec)


def oracle_2d(p, grid=2000, n_polish=10, chunk=250):
    """Brute-force minimum of a 2-D instance.

    Samples ``grid**2`` points on the bounding box of the ball, keeps the
    feasible ones, and polishes the best ``n_polish`` with SLSQP. Returns
    ``(x, objective)``.
    """
    if p.n != 2:
        raise ValueError(f"oracle_2d needs n = 2, got n = {p.n}")
    r = p.delta1
    ticks = np.linspace(-r, r, grid)
    (a11, a12), (_, a22) = p.A
    (b11, b12), (_, b22) = p.B
    best_x, best_f = [], []
    for i in range(0, grid, chunk):
        X, Y = np.meshgrid(ticks[i : i + chunk], ticks, indexing="ij")
        U, W = X - p.c[0], Y - p.c[1]
        ok = (X * X + Y * Y <= r * r) & (b11 * U * U + 2.0 * b12 * U * W + b22 * W * W <= p.delta2**2)
        X, Y = X[ok], Y[ok]
        if X.shape[0] == 0:
            continue
        f = 0.5 * (a11 * X * X + 2.0 * a12 * X * Y + a22 * Y * Y) + p.a[0] * X + p.a[1] * Y
        k = min(n_polish, f.shape[0])
        idx = np.argpartition(f, k - 1)[:k]
        best_x.append(np.column_stack([X[idx], Y[idx]]))
        best_f.append(f[idx])
    if not best_x:
        raise EmptyFeasibleSample("no grid sample lies in the feasible region")
    X0 = np.vstack(best_x)
    F0 = np.concatenate(best_f)
    order = np.argsort(F0)[:n_polish]

    cons = [
        {"type": "ineq", "fun": lambda x: r * r - x @ x, "jac": lambda x: -2.0 * x},
        {
            "type": "ineq",
            "fun": lambda x: p.delta2**2 - (x - p.c) @ p.B @ (x - p.c),
            "jac": lambda x: -2.0 * (p.B @ (x - p.c)),
        },
    ]
    xb, fb = X0[order[0]], F0[order[0]]
    for j in order:
        res = minimize(
            p.objective,
            X0[j],
            jac=lambda x: p.A @ x + p.a,
            constraints=cons,
            method="SLSQP",
            options={"ftol": 1e-14, "maxiter": 200},
        )
        x = res.x
        if p.is_feasible(x, 1e-10) and p.objective(x) < fb:
            xb, fb = x, p.objective(x)
    return np.asarray(xb, dtype=np.float64), float(fb)

"""Local non-global minimizer of a trust-region subproblem.

For ``min 1/2 x'Ax + a'x  s.t. ‖x‖ <= delta`` the local non-global minimizer,
when it exists, sits on the sphere with multiplier ``lam`` in
``(max(0, -lam_2), -lam_1)`` where ``phi(lam) = ‖(A + lam I)^{-1} a‖^2`` equals
``delta^2`` and ``phi'(lam) >= 0``. ``phi`` is strictly convex there, so it has
at most two roots and the right one is the candidate.
"""

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .linalg import spectral, sym_sqrt

__all__ = [
    "LngmReason",
    "LngmResult",
    "SecularFunction",
    "phi_roots",
    "lngm",
    "lngm_ellipsoid",
]

MULTIPLICITY_TOL = 1e-8
ORTHOGONALITY_TOL = 1e-10
ROOT_TOL = 1e-12
MAXITER = 100


class LngmReason(str, enum.Enum):
    NO_INTERVAL = "NoInterval"
    ORTHOGONAL = "OrthogonalToCriticalEigenvector"
    NO_ROOT = "NoRoot"
    SLOPE_TEST = "RootFailsSlopeTest"
    FOUND = "Found"


@dataclass
class LngmResult:
    exists: bool
    reason: LngmReason
    x: Optional[np.ndarray] = None
    lambda_star: Optional[float] = None
    roots: tuple = ()

    @property
    def found(self):
        return self.reason is LngmReason.FOUND


@dataclass(frozen=True)
class SecularFunction:
    """``phi(lam) = sum_i w_i / (lam_i + lam)^2`` on an open interval."""

    eigenvalues: np.ndarray
    weights: np.ndarray
    interval: tuple

    @classmethod
    def from_spectrum(cls, eigenvalues, eigenvectors, a):
        lam = np.asarray(eigenvalues, dtype=np.float64)
        w = (eigenvectors.T @ a) ** 2
        lam2 = lam[1] if lam.shape[0] > 1 else np.inf
        return cls(lam, w, (max(0.0, -lam2), -lam[0]))

    def phi(self, t):
        return float(np.sum(self.weights / (self.eigenvalues + t) ** 2))

    def dphi(self, t):
        return float(-2.0 * np.sum(self.weights / (self.eigenvalues + t) ** 3))

    def d2phi(self, t):
        return float(6.0 * np.sum(self.weights / (self.eigenvalues + t) ** 4))

    def _lower_limit(self):
        """``phi`` at the left endpoint, infinite when a pole with weight sits there."""
        lo = self.interval[0]
        s = self.eigenvalues + lo
        pole = s <= 0.0
        if np.any(self.weights[pole] > 0.0):
            return np.inf
        return float(np.sum(self.weights[~pole] / s[~pole] ** 2))


def _bracketed_newton(f, df, lo, hi, x0, tol, increasing, maxiter=MAXITER):
    """Root of a monotone ``f`` on ``(lo, hi)``: Newton steps, bisection when they leave the bracket."""
    x = x0 if lo < x0 < hi else 0.5 * (lo + hi)
    for _ in range(maxiter):
        fx = f(x)
        if abs(fx) <= tol:
            return x
        if (fx < 0) == increasing:
            lo = x
        else:
            hi = x
        if hi - lo <= 4 * np.finfo(float).eps * max(1.0, abs(x)):
            return x
        d = df(x)
        xn = x - fx / d if d != 0 and np.isfinite(d) else np.nan
        if not (lo < xn < hi):
            xn = 0.5 * (lo + hi)
        x = xn
    return x


def _argmin_phi(f):
    """Minimizer of the strictly convex ``phi`` over its interval (``phi' = 0``)."""
    lo, hi = f.interval
    if np.isfinite(f._lower_limit()) and f.dphi(lo) >= 0.0:
        return lo
    # phi' increases from -inf (or a negative value) to +inf
    a, b = lo, hi
    x = 0.5 * (a + b)
    for _ in range(4 * MAXITER):
        d1 = f.dphi(x)
        if d1 > 0:
            b = x
        else:
            a = x
        if b - a <= 4 * np.finfo(float).eps * max(1.0, abs(x)):
            break
        d2 = f.d2phi(x)
        xn = x - d1 / d2 if d2 > 0 else np.nan
        if not (a < xn < b):
            xn = 0.5 * (a + b)
        if abs(xn - x) <= 1e-15 * max(1.0, abs(x)):
            x = xn
            break
        x = xn
    return x


def phi_roots(f, delta1_sq):
    """All roots of ``phi(lam) = delta1_sq`` inside the open interval, ascending."""
    lo, hi = f.interval
    if not lo < hi or f.weights[0] <= 0.0:
        return []
    t = float(delta1_sq)
    tol = ROOT_TOL * t
    m = _argmin_phi(f)
    phim = f.phi(m) if m > lo else f._lower_limit()
    if phim > t:
        return []

    def g(x):
        return f.phi(x) - t

    roots = []
    phi_lo = f._lower_limit()
    if phi_lo > t and m > lo:
        # left branch: phi decreasing; start from a point known to lie left of the root
        lam2 = f.eigenvalues[1] if f.eigenvalues.shape[0] > 1 else np.inf
        w2 = np.sum(f.weights[f.eigenvalues == lam2]) if np.isfinite(lam2) else 0.0
        x0 = -lam2 + np.sqrt(w2 / t) if w2 > 0 else lo
        roots.append(_bracketed_newton(g, f.dphi, lo, m, min(x0, m), tol, increasing=False))
    x0 = -f.eigenvalues[0] - np.sqrt(f.weights[0] / t)
    if phim == t:
        roots.append(m)
    else:
        roots.append(_bracketed_newton(g, f.dphi, m, hi, max(x0, m), tol, increasing=True))
    return sorted(roots)


def lngm(A, a, delta1, decomp=None, check_second_order=False):
    """Local non-global minimizer of ``min 1/2 x'Ax + a'x  s.t. ‖x‖ <= delta1``."""
    A = np.asarray(A, dtype=np.float64)
    a = np.asarray(a, dtype=np.float64)
    dec = decomp if decomp is not None else spectral(A)
    lam = dec.eigenvalues
    Q = dec.eigenvectors
    n = lam.shape[0]
    lam1 = lam[0]
    lam2 = lam[1] if n > 1 else np.inf
    if lam1 >= 0.0 or lam2 - lam1 <= MULTIPLICITY_TOL * (1.0 + abs(lam1)):
        return LngmResult(False, LngmReason.NO_INTERVAL)
    anorm = np.linalg.norm(a)
    if anorm == 0.0 or abs(Q[:, 0] @ a) <= ORTHOGONALITY_TOL * anorm:
        return LngmResult(False, LngmReason.ORTHOGONAL)

    f = SecularFunction.from_spectrum(lam, Q, a)
    if not f.interval[0] < f.interval[1]:
        return LngmResult(False, LngmReason.NO_INTERVAL)
    t = float(delta1) ** 2
    roots = phi_roots(f, t)
    if not roots:
        return LngmResult(False, LngmReason.NO_ROOT)
    lam_star = roots[-1]
    scale = max(1.0, t) / max(1.0, abs(lam1))
    if f.dphi(lam_star) < -1e-10 * scale:
        return LngmResult(False, LngmReason.SLOPE_TEST, roots=tuple(roots))
    coef = -(Q.T @ a) / (lam + lam_star)
    x = Q @ coef
    if check_second_order:
        _assert_second_order(A, x, lam_star)
    return LngmResult(True, LngmReason.FOUND, x=x, lambda_star=float(lam_star), roots=tuple(roots))


def _assert_second_order(A, x, lam_star, tol=1e-8):
    n = x.shape[0]
    u = x / np.linalg.norm(x)
    # first QR column is ±u, the rest span its orthogonal complement
    Qf, _ = np.linalg.qr(np.column_stack([u, np.eye(n)]))
    V = Qf[:, 1:n]
    H = V.T @ (A + lam_star * np.eye(n)) @ V
    wmin = np.linalg.eigvalsh(0.5 * (H + H.T))[0] if n > 1 else 0.0
    assert wmin >= -tol * (1.0 + np.linalg.norm(A, 2)), f"projected Hessian not PSD ({wmin:.3e})"


def lngm_ellipsoid(A, a, B, c, delta):
    """Local non-global minimizer over ``(x-c)'B(x-c) <= delta^2``.

    Uses ``y = B^{1/2}(x - c)``, which maps the ellipsoid onto a ball of radius
    ``delta``; the multiplier is unchanged by the substitution.
    """
    Bhi = sym_sqrt(B, inverse=True)
    At = Bhi @ A @ Bhi
    At = 0.5 * (At + At.T)
    at = Bhi @ (A @ c + a)
    res = lngm(At, at, delta)
    if res.found:
        res.x = c + Bhi @ res.x
    return res

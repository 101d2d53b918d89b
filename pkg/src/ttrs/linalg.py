"""Dense symmetric linear algebra used by every solver in the package.

All routines are pure functions on numpy arrays. Generalized eigenproblems
``P v = lam Q v`` are reduced to standard form through the Cholesky factor of
``Q``; the returned generalized eigenvectors are ``Q``-orthonormal.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .exceptions import EigenError, NotPositiveDefinite, PencilError, RankError

__all__ = [
    "SpectralDecomp",
    "spectral",
    "gen_eig",
    "gen_eig_max",
    "solve_spd",
    "nullspace_basis",
    "b_orthonormalize",
    "sym_sqrt",
]

RANK_TOL = 1e-8


@dataclass(frozen=True)
class SpectralDecomp:
    """Eigenvalues in ascending order with matching orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def n(self):
        return self.eigenvalues.shape[0]

    def reconstruct(self):
        Q = self.eigenvectors
        return (Q * self.eigenvalues) @ Q.T


def spectral(M):
    """Spectral decomposition ``M = Q diag(w) Q^T`` with ``w`` ascending."""
    M = np.asarray(M, dtype=np.float64)
    try:
        w, Q = sla.eigh(M, check_finite=True)
    except sla.LinAlgError as exc:
        # LAPACK reports the number of off-diagonal elements that failed to converge
        raise EigenError(f"symmetric eigensolver did not converge: {exc}", iterations=None) from exc
    except ValueError as exc:
        raise EigenError(f"symmetric eigensolver rejected input: {exc}") from exc
    return SpectralDecomp(w, Q)


def _cholesky(Q, exc_type=NotPositiveDefinite, name="matrix"):
    try:
        return sla.cholesky(Q, lower=True, check_finite=True)
    except sla.LinAlgError as exc:
        raise exc_type(f"{name} is not positive definite") from exc


def gen_eig(P, Q, chol=None):
    """All generalized eigenpairs of the pencil ``(P, Q)`` with ``Q`` positive definite.

    Returns ``(w, X)`` with ``w`` ascending, ``P X = Q X diag(w)`` and
    ``X^T Q X = I``.
    """
    L = _cholesky(Q, PencilError, "pencil right-hand matrix") if chol is None else chol
    C = sla.solve_triangular(L, P, lower=True)
    C = sla.solve_triangular(L, C.T, lower=True)
    C = 0.5 * (C + C.T)
    dec = spectral(C)
    X = sla.solve_triangular(L.T, dec.eigenvectors, lower=False)
    return dec.eigenvalues, X


def gen_eig_max(P, Q):
    """Largest generalized eigenvalue of ``(P, Q)`` and a unit-norm eigenvector."""
    w, X = gen_eig(P, Q)
    v = X[:, -1]
    v = v / np.linalg.norm(v)
    return float(w[-1]), v


def solve_spd(M, b):
    """Solve ``M x = b`` for symmetric positive definite ``M`` by Cholesky."""
    try:
        cf = sla.cho_factor(M, lower=True, check_finite=True)
    except sla.LinAlgError as exc:
        raise NotPositiveDefinite("matrix is not positive definite") from exc
    return sla.cho_solve(cf, b)


def nullspace_basis(M, tol=RANK_TOL):
    """Orthonormal basis (n x r) of the numerical nullspace of a PSD matrix.

    Eigenvectors whose eigenvalue magnitude is at most ``tol * (1 + max|w|)``
    span the nullspace; ``r`` may be zero.
    """
    dec = spectral(M)
    w = dec.eigenvalues
    thresh = tol * (1.0 + np.max(np.abs(w)))
    keep = np.abs(w) <= thresh
    return dec.eigenvectors[:, keep]


def b_orthonormalize(V, B):
    """Return ``W`` with ``span(W) = span(V)`` and ``W^T B W = I``."""
    V = np.atleast_2d(np.asarray(V, dtype=np.float64))
    if V.shape[0] != B.shape[0]:
        V = V.T
    r = V.shape[1]
    if r == 0:
        return V.copy()
    G = V.T @ B @ V
    G = 0.5 * (G + G.T)
    w, U = sla.eigh(G)
    if w[0] <= 1e-12 * max(w[-1], 1e-300):
        raise RankError("basis is rank deficient in the B-inner product")
    W = V @ (U / np.sqrt(w)) @ U.T
    # one refinement sweep pulls W^T B W to identity at machine precision
    G2 = W.T @ B @ W
    w2, U2 = sla.eigh(0.5 * (G2 + G2.T))
    return W @ (U2 / np.sqrt(w2)) @ U2.T


def sym_sqrt(M, inverse=False):
    """Symmetric square root (or inverse square root) of an SPD matrix."""
    dec = spectral(M)
    w = dec.eigenvalues
    if w[0] <= 0:
        raise NotPositiveDefinite("matrix is not positive definite")
    Q = dec.eigenvectors
    s = 1.0 / np.sqrt(w) if inverse else np.sqrt(w)
    R = (Q * s) @ Q.T
    return 0.5 * (R + R.T)

"""Input validation helpers shared by problem types and estimators."""

import numbers

import numpy as np
from sklearn.utils import check_array

from .exceptions import NotPositiveDefinite


def check_sym_matrix(M, name="matrix", n=None):
    """Validate a dense real square matrix and return its symmetrized float copy.

    Raises ``ValueError`` when ``M`` is not square, has the wrong order, or
    its asymmetry exceeds ``1e-12 * (1 + max|M|)``.
    """
    M = check_array(M, dtype=np.float64, ensure_2d=True, copy=True, input_name=name)
    if M.shape[0] != M.shape[1]:
        raise ValueError(f"{name} must be square, got shape {M.shape}")
    if n is not None and M.shape[0] != n:
        raise ValueError(f"{name} must have order {n}, got {M.shape[0]}")
    scale = 1.0 + np.max(np.abs(M))
    asym = np.max(np.abs(M - M.T))
    if asym > 1e-12 * scale:
        raise ValueError(f"{name} is not symmetric (max asymmetry {asym:.3e})")
    return 0.5 * (M + M.T)


def check_vector(v, name="vector", n=None):
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1:
        v = v.reshape(-1)
    if n is not None and v.shape[0] != n:
        raise ValueError(f"{name} must have length {n}, got {v.shape[0]}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} contains non-finite entries")
    return v.copy()


def check_radius(r, name="radius"):
    if not isinstance(r, numbers.Real) or not np.isfinite(r) or r <= 0:
        raise ValueError(f"{name} must be a positive finite real, got {r!r}")
    return float(r)


def check_spd(M, name="matrix"):
    """Raise :class:`NotPositiveDefinite` unless a Cholesky factorization of ``M`` succeeds."""
    try:
        np.linalg.cholesky(M)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(f"{name} is not positive definite") from exc
    return M

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ttrs.exceptions import NotPositiveDefinite, PencilError, RankError
from ttrs.linalg import b_orthonormalize, gen_eig, gen_eig_max, nullspace_basis, solve_spd, spectral, sym_sqrt


def _sym(rng, n):
    M = rng.standard_normal((n, n))
    return M + M.T


def _spd(rng, n):
    M = rng.standard_normal((n, n))
    return M @ M.T + n * np.eye(n)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 12), st.integers(0, 2**31 - 1))
def test_spectral_reconstructs(n, seed):
    rng = np.random.default_rng(seed)
    M = _sym(rng, n)
    dec = spectral(M)
    assert np.all(np.diff(dec.eigenvalues) >= 0)
    np.testing.assert_allclose(dec.reconstruct(), M, atol=1e-10 * (1 + np.abs(M).max()))
    np.testing.assert_allclose(dec.eigenvectors.T @ dec.eigenvectors, np.eye(n), atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 10), st.integers(0, 2**31 - 1))
def test_gen_eig_pencil(n, seed):
    rng = np.random.default_rng(seed)
    P, Q = _sym(rng, n), _spd(rng, n)
    w, X = gen_eig(P, Q)
    np.testing.assert_allclose(P @ X, Q @ X * w, atol=1e-9)
    np.testing.assert_allclose(X.T @ Q @ X, np.eye(n), atol=1e-10)
    np.testing.assert_allclose(w, np.sort(np.real(np.linalg.eigvals(np.linalg.solve(Q, P)))), atol=1e-8)


def test_gen_eig_max_is_largest():
    rng = np.random.default_rng(3)
    P, Q = _sym(rng, 6), _spd(rng, 6)
    wmax, v = gen_eig_max(P, Q)
    assert wmax == pytest.approx(gen_eig(P, Q)[0][-1])
    assert np.linalg.norm(v) == pytest.approx(1.0)
    np.testing.assert_allclose(P @ v, wmax * Q @ v, atol=1e-9)


def test_pencil_needs_pd_rhs():
    with pytest.raises(PencilError):
        gen_eig(np.eye(2), np.diag([1.0, -1.0]))


def test_solve_spd_and_failure():
    rng = np.random.default_rng(0)
    M = _spd(rng, 5)
    b = rng.standard_normal(5)
    np.testing.assert_allclose(M @ solve_spd(M, b), b, atol=1e-10)
    with pytest.raises(NotPositiveDefinite):
        solve_spd(-M, b)


def test_nullspace_of_rank_deficient():
    u = np.array([1.0, 2.0, 2.0]) / 3.0
    M = np.eye(3) - np.outer(u, u)
    N = nullspace_basis(M)
    assert N.shape == (3, 1)
    assert abs(abs(N[:, 0] @ u) - 1.0) < 1e-12
    assert nullspace_basis(np.eye(3)).shape == (3, 0)


def test_b_orthonormalize():
    rng = np.random.default_rng(1)
    B = _spd(rng, 6)
    V = rng.standard_normal((6, 3))
    W = b_orthonormalize(V, B)
    np.testing.assert_allclose(W.T @ B @ W, np.eye(3), atol=1e-13)
    # same span
    coef, *_ = np.linalg.lstsq(V, W, rcond=None)
    np.testing.assert_allclose(V @ coef, W, atol=1e-10)
    with pytest.raises(RankError):
        b_orthonormalize(np.column_stack([V[:, 0], V[:, 0]]), B)


def test_sym_sqrt():
    rng = np.random.default_rng(2)
    B = _spd(rng, 4)
    R = sym_sqrt(B)
    np.testing.assert_allclose(R @ R, B, atol=1e-10)
    np.testing.assert_allclose(sym_sqrt(B, inverse=True) @ R, np.eye(4), atol=1e-12)
    with pytest.raises(NotPositiveDefinite):
        sym_sqrt(-B)

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from ttrs import HybridTTRS, Status
from ttrs.gen import reference_examples


def test_fit_problem_and_tuple():
    p, _ = reference_examples()[0]
    est = HybridTTRS().fit(p)
    assert est.objective_ == pytest.approx(-4.0)
    assert est.score() == pytest.approx(4.0)
    assert est.n_features_in_ == 2
    est2 = HybridTTRS().fit((p.A, p.a, p.B, p.c, p.delta1, p.delta2))
    np.testing.assert_allclose(est2.x_, est.x_)


def test_params_and_clone():
    est = HybridTTRS(preset="class3", tau=0.5)
    params = est.get_params()
    assert params["preset"] == "class3" and params["tau"] == 0.5
    c = clone(est).set_params(maxiter=50)
    assert c.maxiter == 50 and est.maxiter == 1000


def test_not_fitted_and_bad_params():
    with pytest.raises(NotFittedError):
        HybridTTRS().score()
    p, _ = reference_examples()[0]
    with pytest.raises(ValueError):
        HybridTTRS(tol=0).fit(p)


def test_status_exposed():
    p, _ = reference_examples()[1]
    est = HybridTTRS().fit(p)
    assert est.status_ in (Status.GLOBAL_CERTIFIED, Status.STATIONARY_POINT)
    assert est.kkt_.stationarity_residual < 1e-8

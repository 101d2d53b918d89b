import numpy as np
import pytest

from ttrs import HybridConfig, Source, Status, TtrsProblem, certify, check_feasibility, solve, starting_point
from ttrs.gen import GenSpec, generate, reference_examples
from ttrs.hybrid import (
    PRESETS,
    AdmmState,
    CandidatePool,
    CurvatureClass,
    admm_init,
    admm_step,
    augmented_lagrangian,
    collect_lngm_candidates,
    homogeneous_dual_start,
    polish_kkt,
    recover_multipliers,
    screen_global_candidates,
)
from ttrs.exceptions import SolverError

R3, R5 = np.sqrt(3.0 / 8.0), np.sqrt(5.0 / 8.0)


def _disjoint():
    return TtrsProblem(-np.eye(2), np.zeros(2), np.eye(2), np.array([3.0, 0.0]), 1.0, 1.0)


def test_infeasible_instance():
    p = _disjoint()
    feasible, witness, v_ch = check_feasibility(p)
    assert not feasible and witness is None
    # nearest ball point is (1, 0), at squared distance 4 from c
    assert v_ch == pytest.approx(3.0)
    rep = solve(p)
    assert rep.status is Status.INFEASIBLE and rep.best is None and rep.v_ch > 0
    with pytest.raises(SolverError):
        starting_point(p)


def test_touching_instance_is_feasible():
    p = TtrsProblem(-np.eye(2), np.zeros(2), np.eye(2), np.array([2.0, 0.0]), 1.0, 1.0)
    feasible, w, v = check_feasibility(p)
    assert feasible
    np.testing.assert_allclose(w, [1.0, 0.0], atol=1e-8)


def test_screening_certifies_feasible_relaxation():
    # ellipsoid contains the ball: the ball problem's minimizer is global
    A = np.diag([-2.0, 1.0])
    p = TtrsProblem(A, np.array([0.3, 0.1]), np.eye(2), np.zeros(2), 1.0, 5.0)
    pool = screen_global_candidates(p)
    assert pool.certified()
    rep = solve(p)
    assert rep.status is Status.GLOBAL_CERTIFIED
    assert rep.best.source is Source.GLOBAL_TRS1
    assert rep.trace == []


def test_pool_best_prefers_priority_on_ties():
    p, _ = reference_examples()[0]
    pool = CandidatePool()
    x = np.array([0.5, -0.5])
    pool.add(p, x, Source.ADMM)
    pool.add(p, x.copy(), Source.LNGM1)
    assert pool.best().source is Source.LNGM1
    pool.add(p, np.array([5.0, 5.0]), Source.GLOBAL_TRS1, certified=True)
    assert len(pool.feasible()) == 2 and not pool.certified()


def test_example2_lngm_collection():
    p, _ = reference_examples()[1]
    _, reasons = collect_lngm_candidates(p)
    assert set(reasons) == {"1a", "4"}


def test_example2_solution():
    p, info = reference_examples()[1]
    rep = solve(p)
    np.testing.assert_allclose(rep.x, [R3, -R5], atol=1e-8)
    assert rep.objective == pytest.approx(info["optimum"], abs=1e-10)
    assert rep.kkt.curvature_class in (CurvatureClass.PSD, CurvatureClass.ONE_NEGATIVE)


def test_example2_starting_point_is_feasible():
    p, _ = reference_examples()[1]
    x0 = starting_point(p)
    assert p.is_feasible(x0)


def test_certify_taxonomy_example2():
    p, info = reference_examples()[1]
    for x in info["stationary"]["one_negative"]:
        g, m = recover_multipliers(p, x)
        k = certify(p, x, g, m)
        assert k.n_negative == 1 and k.stationarity_residual < 1e-12
    for x in info["stationary"]["two_negative"]:
        g, m = recover_multipliers(p, x)
        assert certify(p, x, g, m).curvature_class is CurvatureClass.MANY_NEGATIVE


def test_certify_psd_at_unconstrained_min():
    A = np.diag([1.0, 2.0])
    a = np.array([-0.1, -0.1])
    p = TtrsProblem(A, a, np.eye(2), np.zeros(2), 1.0, 1.0)
    x = -np.linalg.solve(A, a)
    g, m = recover_multipliers(p, x)
    assert (g, m) == (0.0, 0.0)
    assert certify(p, x, g, m).curvature_class is CurvatureClass.PSD


def test_recover_multipliers_exact():
    p, _ = reference_examples()[1]
    x = np.array([R3, -R5])
    g, m = recover_multipliers(p, x)
    k = certify(p, x, g, m)
    assert g >= 0 and m >= 0 and k.stationarity_residual < 1e-12


def test_polish_recovers_kkt_point():
    p, _ = reference_examples()[1]
    x = np.array([R3, -R5])
    g, m = recover_multipliers(p, x)
    res = polish_kkt(p, x + 1e-4, g, m, active=(True, True))
    assert res is not None
    np.testing.assert_allclose(res[0], x, atol=1e-10)


def test_admm_step_keeps_z_in_ball_and_descends():
    inst = generate(GenSpec(6, 1.0, "class2", 5))
    p = inst.problem
    lam_min = np.linalg.eigvalsh(p.A)[0]
    rho, tau, scale = HybridConfig().admm_parameters(lam_min)
    st = admm_init(p, starting_point(p), rho, tau, scale)
    assert isinstance(st, AdmmState)
    L_prev = augmented_lagrangian(p, st.x, st.z, st.lam, rho)
    for _ in range(30):
        st = admm_step(st, p)
        assert st.z @ st.z <= p.delta1**2 * (1 + 1e-12)
        d = st.x - p.c
        assert d @ p.B @ d <= p.delta2**2 * (1 + 1e-8)
    assert augmented_lagrangian(p, st.x, st.z, st.lam, rho) <= L_prev + 1e-9


def test_descent_monitor_records_inequality():
    p = generate(GenSpec(8, 1.0, "class3b", 3)).problem
    rep = solve(p, HybridConfig(preset="class3", monitor=True, restarts=False))
    assert rep.trace
    for rec in rep.trace:
        assert rec["descent"] - rec["descent_bound"] >= -1e-8


def test_config_validation():
    with pytest.raises(ValueError):
        HybridConfig(tau=1.5).admm_parameters(-1.0)
    with pytest.raises(ValueError):
        HybridConfig(rho=0.5).admm_parameters(-1.0)
    with pytest.raises(ValueError):
        HybridConfig(preset="nope").admm_parameters(-1.0)
    rho, tau, scale = HybridConfig(preset="class3").admm_parameters(-3.0)
    assert (tau, rho, scale) == (PRESETS["class3"][0], 7.0, PRESETS["class3"][2])


def test_solve_rejects_other_types():
    with pytest.raises(TypeError):
        solve((np.eye(2),))


def test_homogeneous_dual_start_feasible_direction():
    p = generate(GenSpec(10, 1.0, "class4", 7)).problem
    x = homogeneous_dual_start(p)
    assert x is not None and x.shape == (10,)


@pytest.mark.parametrize("klass,preset", [("class2", "class2"), ("class3a", "class3"), ("class3b", "class3"), ("class4", "class4")])
def test_solve_reports_feasible_kkt_point(klass, preset):
    for seed in range(5):
        p = generate(GenSpec(12, 1.0, klass, seed)).problem
        rep = solve(p, HybridConfig(preset=preset))
        assert rep.status in (Status.GLOBAL_CERTIFIED, Status.STATIONARY_POINT)
        assert p.is_feasible(rep.x)
        assert rep.kkt.stationarity_residual <= 1e-6
        d = rep.to_dict(include_trace=False)
        assert d["status"] == rep.status.value and "trace" not in d


def test_user_start_point_is_used():
    p, _ = reference_examples()[0]
    x0 = np.array([0.1, 0.2])
    rep = solve(p, HybridConfig(x0=x0))
    assert rep.admm["x0"] == x0.tolist()
    assert rep.objective == pytest.approx(-4.0, abs=1e-9)

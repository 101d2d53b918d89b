"""Acceptance criteria for the hybrid solver.

Each test prints a single PASS/FAIL line (collected again in the terminal
summary) and then asserts the same condition. Run on its own with::

    pytest tests/test_acceptance.py -v -s
"""

import time

import numpy as np
import pytest

from ttrs import HybridConfig, Source, Status, TtrsProblem, certify, check_feasibility, solve, starting_point
from ttrs.cli import record_from_report
from ttrs.gen import GenSpec, generate, oracle_2d, reference_examples
from ttrs.hybrid import recover_multipliers
from ttrs.io import ProblemFile

pytestmark = pytest.mark.acceptance

R3, R5 = np.sqrt(3.0 / 8.0), np.sqrt(5.0 / 8.0)


def _feasible_starts(p, k, rng):
    out = []
    while len(out) < k:
        x = rng.uniform(-p.delta1, p.delta1, p.n)
        if p.is_feasible(x, 0.0):
            out.append(x)
    return out


def test_example1_any_start(verdict):
    p, info = reference_examples()[0]
    rng = np.random.default_rng(2024)
    worst_obj, worst_x, worst_t = 0.0, 0.0, 0.0
    for x0 in _feasible_starts(p, 10, rng):
        t = time.perf_counter()
        rep = solve(p, HybridConfig(x0=x0))
        worst_t = max(worst_t, time.perf_counter() - t)
        worst_obj = max(worst_obj, abs(rep.objective - (-4.0)))
        worst_x = max(worst_x, min(np.max(np.abs(rep.x - s)) for s in info["solutions"]))
    ok = worst_obj <= 1e-6 and worst_x <= 1e-5 and worst_t < 1.0
    verdict("example1 regression", ok, f"|f+4|={worst_obj:.1e} dx={worst_x:.1e} t={worst_t:.3f}s")
    assert ok


def test_example2_regression(verdict):
    p, info = reference_examples()[1]
    t = time.perf_counter()
    x0 = starting_point(p)
    rep = solve(p)
    elapsed = time.perf_counter() - t
    x_star = np.array([R3, -R5])
    d0 = float(np.max(np.abs(x0 - np.array([0.4054, -0.9141]))))
    dobj = abs(rep.objective - (-3.8964))
    dx = float(np.max(np.abs(rep.x - x_star)))
    ok = d0 <= 1e-3 and dobj <= 1e-4 and dx <= 1e-4 and elapsed < 1.0
    verdict(
        "example2 regression",
        ok,
        f"x0={np.round(x0, 5).tolist()} dx0={d0:.1e} f={rep.objective:.7f} dx={dx:.1e} t={elapsed:.3f}s",
    )
    assert ok


def test_example2_taxonomy(verdict):
    p, _ = reference_examples()[1]
    counts = []
    for x in (np.array([-R3, R5]), np.array([R3, R5])):
        g, m = recover_multipliers(p, x)
        counts.append(certify(p, x, g, m, eig_tol=1e-8).n_negative)
    ok = counts == [1, 2]
    verdict("example2 stationary-point taxonomy", ok, f"negative eigenvalues {counts}")
    assert ok


def test_kkt_accuracy_class2(verdict):
    lines, ok = [], True
    for n in (5, 10, 15, 20, 25, 30):
        t = time.perf_counter()
        res = [
            solve(generate(GenSpec(n, 1.0, "class2", s)).problem, HybridConfig(preset="class2")).kkt.stationarity_residual
            for s in range(100)
        ]
        elapsed = time.perf_counter() - t
        med = float(np.median(res))
        ok &= med <= 1e-6 and elapsed < 60.0
        lines.append(f"n={n}:{med:.1e}/{elapsed:.1f}s")
    verdict("KKT accuracy (class 2)", ok, " ".join(lines))
    assert ok


def _oracle_instances():
    insts = [reference_examples()[0][0], reference_examples()[1][0]]
    for klass, count in (("class2", 49), ("class2e", 49), ("class3b", 50), ("class4", 50)):
        insts += [generate(GenSpec(2, 1.0, klass, s)).problem for s in range(count)]
    return insts


def test_oracle_equivalence(verdict):
    insts = _oracle_instances()
    t = time.perf_counter()
    worst_abs, worst_over = 0.0, -np.inf
    for p in insts:
        f = solve(p).objective
        _, fo = oracle_2d(p, grid=2000)
        worst_abs = max(worst_abs, abs(f - fo))
        worst_over = max(worst_over, f - fo)
    elapsed = time.perf_counter() - t
    ok = len(insts) == 200 and worst_abs <= 1e-3 and worst_over <= 1e-3 and elapsed < 120.0
    verdict("oracle equivalence (n=2)", ok, f"max|diff|={worst_abs:.1e} max(f-oracle)={worst_over:.1e} t={elapsed:.1f}s")
    assert ok


def test_class2_structure_n100(verdict):
    l4 = opt_lngm = 0
    for s in range(100):
        inst = generate(GenSpec(100, 1.0, "class2e", s))
        rep = solve(inst.problem, HybridConfig(preset="class2"))
        row = record_from_report(f"s{s}", ProblemFile(inst.problem), rep, 0.0)
        l4 += row["l4"]
        opt_lngm += int(row["opt_l1a"] or row["opt_l4"])
    ok = l4 == 100 and opt_lngm >= 90
    verdict("class-2 structure at n=100", ok, f"L4 feasible {l4}/100, optimum at an LNGM {opt_lngm}/100")
    assert ok


def test_homogeneous_certified(verdict):
    counts = {}
    for n in (50, 100):
        counts[n] = sum(
            solve(generate(GenSpec(n, 1.0, "class4", s)).problem, HybridConfig(preset="class4")).status
            is Status.GLOBAL_CERTIFIED
            for s in range(100)
        )
    ok = all(v == 100 for v in counts.values())
    verdict("homogeneous global certification", ok, " ".join(f"n={n}:{v}/100" for n, v in counts.items()))
    assert ok


def test_admm_descent(verdict):
    classes = ("class2", "class2e", "class3a", "class3b", "class4")
    presets = {"class2": "class2", "class2e": "class2", "class3a": "class3", "class3b": "class3", "class4": "class4"}
    worst, logged = np.inf, 0
    for s in range(50):
        k = classes[s % 5]
        rep = solve(generate(GenSpec(10, 1.0, k, 100 + s)).problem, HybridConfig(preset=presets[k], monitor=True))
        for rec in rep.trace:
            logged += 1
            worst = min(worst, rec["descent"] - rec["descent_bound"])
    ok = logged > 0 and worst >= -1e-8
    verdict("ADMM descent inequality", ok, f"{logged} iterations, worst slack {worst:.1e}")
    assert ok


def _spd(rng, n):
    M = rng.standard_normal((n, n))
    return M @ M.T / n + 0.2 * np.eye(n)


def _disjoint(rng, n):
    # the ellipsoid fits in a ball of radius ext around c, placed beyond the unit ball's reach
    A = rng.standard_normal((n, n))
    B = _spd(rng, n)
    d1, d2 = rng.uniform(0.5, 2.0, 2)
    u = rng.standard_normal(n)
    u /= np.linalg.norm(u)
    ext = d2 / np.sqrt(np.linalg.eigvalsh(B)[0])
    c = (d1 + ext * rng.uniform(1.05, 2.0)) * u
    return TtrsProblem(A + A.T, rng.standard_normal(n), B, c, d1, d2)


def _overlapping(rng, n):
    # a point y inside the ball is made to lie inside the ellipsoid too
    A = rng.standard_normal((n, n))
    B = _spd(rng, n)
    d1 = rng.uniform(0.5, 2.0)
    y = rng.standard_normal(n)
    y *= d1 * rng.uniform(0.5, 1.0) / np.linalg.norm(y)
    c = y + rng.standard_normal(n) * rng.uniform(0.5, 3.0)
    d = y - c
    d2 = np.sqrt(d @ B @ d * rng.uniform(1.0001, 1.5))
    return TtrsProblem(A + A.T, rng.standard_normal(n), B, c, d1, d2)


def test_feasibility_gate(verdict):
    rng = np.random.default_rng(99)
    infeasible = 0
    for _ in range(100):
        rep = solve(_disjoint(rng, int(rng.integers(2, 30))))
        infeasible += rep.status is Status.INFEASIBLE and rep.v_ch > 0
    feasible, worst = 0, 0.0
    for _ in range(100):
        p = _overlapping(rng, int(rng.integers(2, 30)))
        ok_, w, _ = check_feasibility(p)
        if ok_:
            viol = max(p.g1(w), p.g2(w))
            worst = max(worst, viol)
            feasible += viol <= 1e-10
    ok = infeasible == 100 and feasible == 100
    verdict("feasibility gate", ok, f"disjoint->Infeasible {infeasible}/100, overlapping witness {feasible}/100 (worst {worst:.1e})")
    assert ok

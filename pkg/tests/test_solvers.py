import numpy as np
import pytest

from lpbundle.errors import BacktrackExhausted, BudgetExceeded, DivisionGuard
from lpbundle.lpbc import Delta0, TrustRegionParams, initial_radius, rho, run_lpbc, stopping_test, update_trust_region
from lpbundle.lpbnc import LpbncParams, backtrack, run_lpbnc, update_a, update_f_u
from lpbundle.problems import Problem, lookup
from lpbundle.report import BUDGET, CONVERGED, UNBOUNDED, Budget

P = TrustRegionParams()


def toy(name, dim, x0, oracle, convex=True, f_opt=0.0):
    return Problem(name, dim, np.asarray(x0, dtype=float), f_opt, convex, 0, oracle)


def inf_norm(x):
    j = int(np.argmax(np.abs(x)))
    g = np.zeros_like(x)
    g[j] = np.sign(x[j])
    return float(abs(x[j])), g


def neg_square(x):
    return -float(x[0] ** 2), np.array([-2.0 * x[0]])


def test_rho_examples():
    assert rho(1, 0.5, 0) == 0.5
    assert rho(1, 0, 0) == 1.0
    assert rho(1, 2, 0) == -1.0
    with pytest.raises(DivisionGuard):
        rho(1, 0, 1)


def test_stopping_test_examples():
    assert stopping_test(10, 10 - 1e-8, 1e-6)
    assert not stopping_test(0, -1, 1e-6)
    assert stopping_test(-5, -5, 0.0)


def test_trust_region_examples():
    assert update_trust_region(1.0, 0.5, 0.95, P) == 2.0
    assert update_trust_region(1.0, -3.0, 0.5, P) == 0.25
    assert update_trust_region(1.0, 0.2, 0.5, P) == 1.0
    assert update_trust_region(800.0, 0.5, 790.0, P) == 1000.0
    # below unit radius the shrink threshold is -1/delta
    assert update_trust_region(0.5, -1.5, 0.1, P) == 0.5
    assert update_trust_region(0.5, -2.5, 0.1, P) == 0.125


def test_trust_region_params_validation():
    with pytest.raises(ValueError):
        TrustRegionParams(eta1=0.5, eta3=0.4)
    with pytest.raises(ValueError):
        TrustRegionParams(alpha2=0.9)
    with pytest.raises(ValueError):
        TrustRegionParams(delta0=2000.0)
    assert TrustRegionParams(eta2=0.3).eta2 == 0.3


def test_initial_radius():
    assert initial_radius(Delta0.ONE, np.array([30.0, 40.0])) == 1.0
    assert initial_radius("scaled", np.array([30.0, 40.0])) == 5.0
    assert initial_radius("scaled", np.array([3e5, 4e5])) == 1000.0
    assert initial_radius("scaled", np.zeros(2)) == 1.0


def test_lpbc_maxl():
    r = run_lpbc(lookup("Maxl"), eps_tol=1e-6, delta0="one")
    assert r.stop_reason == CONVERGED
    assert abs(r.f_val) <= 1e-6
    assert r.diagnostics.clean


def test_lpbc_cb3():
    r = run_lpbc(lookup("CB3"), eps_tol=1e-6, delta0="one")
    assert abs(r.f_val - 2.0) <= 1e-6
    assert r.diagnostics.clean


def test_lpbc_inf_norm():
    r = run_lpbc(toy("inf-norm", 6, np.ones(6), inf_norm), eps_tol=1e-6)
    assert r.stop_reason == CONVERGED and r.f_val <= 1e-6
    assert r.nf >= r.se and r.k >= 1


def test_lpbc_budget():
    prob = lookup("Maxq")
    r = run_lpbc(prob, budget=Budget(5, 10))
    assert r.stop_reason == BUDGET and r.L == 5
    with pytest.raises(BudgetExceeded) as info:
        run_lpbc(prob, budget=Budget(5, 10), raise_on_budget=True)
    assert info.value.report.stop_reason == BUDGET


def test_lpbc_is_deterministic():
    a = run_lpbc(lookup("CB2"))
    b = run_lpbc(lookup("CB2"))
    assert (a.f_val, a.nf, a.k, a.L) == (b.f_val, b.nf, b.k, b.L)


def test_backtrack_examples():
    y, fy, j = backtrack(np.zeros(1), 0.5, np.ones(1), 0.5, lambda v: float(v[0]))
    assert (j, y[0], fy) == (1, 0.5, 0.5)
    y, fy, j = backtrack(np.zeros(1), 0.1, np.ones(1), 0.7, lambda v: float(v[0] ** 2))
    assert j == 4 and y[0] == pytest.approx(0.2401)
    with pytest.raises(BacktrackExhausted):
        backtrack(np.zeros(1), -1.0, np.ones(1), 0.5, lambda v: 0.0, max_steps=10)


def test_update_a_examples():
    assert update_a(0.0, 2.0, 2.0, 2.0) == (2.0, True)
    assert update_a(8.0, 2.0, 2.0, 2.0) == (5.0, True)
    assert update_a(2.0, 2.0, 2.0, 2.0) == (2.0, False)
    assert update_a(1.0, 3.0, 2.0, 2.0) == (3.0, True)
    assert update_a(1.0, 1.5, 2.0, 2.0) == (2.0, True)
    assert update_a(3.0, 0.0, 2.0, 2.0) == (3.0, False)


def test_update_f_u_examples():
    assert update_f_u(2.0, 1.0, 0.5) == 1.5
    assert update_f_u(2.0, 1.0, 0.9) < update_f_u(2.0, 1.0, 0.1)
    assert update_f_u(2.0, 2.0, 0.5) == 2.0


def test_lpbnc_params_validation():
    with pytest.raises(ValueError):
        LpbncParams(beta=1.0)
    with pytest.raises(ValueError):
        LpbncParams(gamma=1.5)
    with pytest.raises(ValueError):
        LpbncParams(sigma=0.5)
    with pytest.raises(ValueError):
        LpbncParams(alpha3=0.0)


def test_lpbnc_crescent():
    r = run_lpbnc(lookup("Crescent"), LpbncParams(beta=0.7), delta0="one")
    assert r.stop_reason == CONVERGED
    assert abs(r.error) <= 1e-3
    assert 0 <= r.pb <= 100 and r.nf >= r.se
    assert r.diagnostics.clean


def test_lpbnc_mifflin2():
    r = run_lpbnc(lookup("Mifflin2"), LpbncParams(beta=0.7), delta0="one")
    assert abs(r.error) <= 1e-4
    assert r.diagnostics.clean


def test_lpbnc_convexification_engages():
    r = run_lpbnc(toy("neg-square", 1, [0.5], neg_square, convex=False), budget=Budget(3, 100))
    assert r.a_min_final == pytest.approx(2.0)
    assert r.a_final >= 2.0
    assert r.au >= 1
    assert r.diagnostics.clean


def test_lpbnc_unbounded_floor():
    prob = toy("neg-square", 1, [0.5], neg_square, convex=False)
    r = run_lpbnc(prob, LpbncParams(unbounded_floor=-1e6))
    assert r.stop_reason == UNBOUNDED and r.f_val < -1e6

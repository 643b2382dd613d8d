import numpy as np
import pytest
from corpus_checks import FD_TOL, INEQ_TOL, fd_suite, subgradient_inequality_suite

from lpbundle.errors import DimensionMismatch, NotSmoothHere, ProblemUnavailable, SizeExceeded
from lpbundle.problems import brute_force_prox, evaluate, fd_subgrad_check, lookup, registry, select

AVAILABLE = [p for p in registry() if p.available]


def test_registry_shape():
    probs = registry()
    assert len(probs) == 32
    assert sum(p.convex for p in probs) == 20
    for p in probs:
        assert p.x0.shape == (p.dim,)
        if p.available:
            assert np.isfinite(evaluate(p, p.x0).value)


@pytest.mark.parametrize(
    "name, value",
    [
        ("CB2", 1.9522245),
        ("Shor", 22.600162),
        ("Maxquad", -0.8414083),
        ("Colville 1", -32.348679),
        ("El-Attar", 0.5598131),
        ("Gill", 9.7857721),
        ("Steiner 2", 16.703838),
        ("Chained Mifflin2", -34.795),
        ("Brown 2", 0.0),
        ("QL", 7.2),
    ],
)
def test_reference_optima(name, value):
    assert lookup(name).f_opt_ref == value


def test_lookup_by_key_and_name():
    assert lookup("Maxq").dim == 20
    assert lookup("c11") is lookup("maxq")
    assert lookup("n1").name == "Crescent"
    with pytest.raises(KeyError):
        lookup("nope")


def test_select():
    assert [p.key for p in select("c1-3")] == ["c1", "c2", "c3"]
    assert len(select("convex")) == 20 and len(select("nonconvex")) == 12
    assert len(select("all")) == 32
    assert [p.name for p in select("Crescent, c12")] == ["Crescent", "Maxl"]
    assert select("") == []


def test_maxq_first_max_tie_break():
    r = evaluate(lookup("Maxq"), np.ones(20))
    assert r.value == 1.0
    expected = np.zeros(20)
    expected[0] = 2.0
    np.testing.assert_array_equal(r.subgrad, expected)


def test_goffin_at_origin():
    assert evaluate(lookup("Goffin"), np.zeros(50)).value == 0.0


def test_chained_lq_at_minimizer():
    r = evaluate(lookup("Chained LQ"), np.full(100, 1 / np.sqrt(2)))
    assert r.value == pytest.approx(-99 * np.sqrt(2), abs=1e-10)


@pytest.mark.parametrize("problem", [p for p in AVAILABLE if p.minimizer is not None], ids=lambda p: p.key)
def test_known_minimizers(problem):
    assert evaluate(problem, problem.minimizer).value == pytest.approx(problem.f_opt_ref, abs=1e-6)


def test_evaluate_errors():
    with pytest.raises(DimensionMismatch):
        evaluate(lookup("CB2"), np.zeros(3))
    steiner = lookup("Steiner 2")
    assert not steiner.available
    with pytest.raises(ProblemUnavailable):
        evaluate(steiner, steiner.x0)


def test_fd_examples():
    x = np.ones(20)
    x[1:] = 0.5
    assert fd_subgrad_check(lookup("Maxq"), x) <= 1e-6
    assert fd_subgrad_check(lookup("CB2"), lookup("CB2").x0) <= 1e-6
    with pytest.raises(NotSmoothHere):
        fd_subgrad_check(lookup("Maxq"), np.ones(20))


@pytest.mark.parametrize("problem", AVAILABLE, ids=lambda p: p.key)
def test_finite_differences(problem):
    assert fd_suite(problem) <= FD_TOL


@pytest.mark.parametrize("problem", [p for p in AVAILABLE if p.convex], ids=lambda p: p.key)
def test_subgradient_inequality(problem):
    assert subgradient_inequality_suite(problem) <= INEQ_TOL


def test_brute_force_prox_examples():
    p, e = brute_force_prox(lambda w: float(w[0] ** 2), np.zeros(1), 1.0, 1.0, 1e-3)
    assert p[0] == pytest.approx(0.0, abs=1e-12) and e == pytest.approx(0.0, abs=1e-12)
    p, _ = brute_force_prox(lambda w: -float(w[0] ** 2), np.zeros(1), 4.0, 1.0, 1e-3)
    assert p[0] == pytest.approx(0.0, abs=1e-12)
    p, e = brute_force_prox(lambda w: abs(float(w[0])), np.array([3.0]), 1.0, 2.0, 1e-3)
    assert p[0] == pytest.approx(2.0, abs=1e-9) and e == pytest.approx(2.5, abs=1e-9)
    with pytest.raises(SizeExceeded):
        brute_force_prox(lookup("Maxq"), np.zeros(20), 1.0, 1.0, 0.1)


def test_brute_force_prox_on_problem():
    cres = lookup("Crescent")
    p, e = brute_force_prox(cres, np.zeros(2), 1.0, 0.05, 1e-3)
    np.testing.assert_allclose(p, 0.0, atol=1e-3)
    assert e == pytest.approx(0.0, abs=1e-9)

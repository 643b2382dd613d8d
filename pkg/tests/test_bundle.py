import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lpbundle.bundle import (
    Bundle,
    BundleElement,
    build_rows,
    compute_a_min,
    dump_bundle,
    linearization_error_convex,
    linearization_error_E,
    load_bundle,
    model_reduction_identity,
    prune_lpbc,
    prune_lpbnc_serious,
    row_arrays,
)
from lpbundle.errors import DimensionMismatch, NumericalFailure
from lpbundle.lp import BoxRegion, solve_subproblem
from lpbundle.problems import evaluate, registry


def el(y, f, s, **kw):
    return BundleElement(np.atleast_1d(np.asarray(y, dtype=float)), f, np.atleast_1d(np.asarray(s, dtype=float)), **kw)


ORIGIN = (np.zeros(1), 0.0)


def test_linearization_error_convex_examples():
    assert linearization_error_convex(ORIGIN, el(1, 1, 2)) == pytest.approx(1.0)
    assert linearization_error_convex(ORIGIN, el(0, 0, 5)) == 0.0
    assert linearization_error_convex(ORIGIN, el(1, -1, -2)) == pytest.approx(-1.0)


def test_linearization_error_E_examples():
    e = el(1, -1, -2)
    assert linearization_error_E(ORIGIN, e, 0.0) == linearization_error_convex(ORIGIN, e)
    assert linearization_error_E(ORIGIN, e, 2.0) == pytest.approx(0.0)
    assert linearization_error_E(ORIGIN, e, 4.0) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        linearization_error_E(ORIGIN, e, -1.0)


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        linearization_error_convex((np.zeros(2), 0.0), el(1, 1, 2))
    with pytest.raises(DimensionMismatch):
        BundleElement(np.zeros(2), 0.0, np.zeros(3))
    with pytest.raises(DimensionMismatch):
        build_rows([el(1, 1, 2)], np.zeros(2), 0.0)


def test_compute_a_min_examples():
    assert compute_a_min([el(0, 0, 0), el(1, -1, -2)]) == pytest.approx(2.0, abs=1e-12)
    assert compute_a_min([el(0, 0, 0), el(1, 1, 2)]) == 0.0
    assert compute_a_min([el(0, 0, 0)]) == 0.0
    # coincident points are skipped
    assert compute_a_min([el(0, 0, 0), el(0, 0, 1)]) == 0.0


def test_build_rows_examples():
    (r,) = build_rows([el(2, 4, 4)], np.zeros(1), 0.0)
    assert r.value(np.array([3.0])) == pytest.approx(4 + 4 * 1)
    (r,) = build_rows([el(1, -1, -2)], np.zeros(1), 2.0)
    assert r.gradient[0] == pytest.approx(0.0)
    assert r.offset == pytest.approx(0.0)


def random_bundle(rng, n=4, m=8):
    return [el(rng.normal(size=n), rng.normal(), rng.normal(size=n)) for _ in range(m)]


def test_rows_at_center_equal_f_minus_E():
    rng = np.random.default_rng(0)
    for _ in range(50):
        b = random_bundle(rng)
        c, fc, a = rng.normal(size=4), rng.normal(), abs(rng.normal())
        rows = build_rows(b, c, a)
        G, E, r = row_arrays(b, c, fc, a)
        for row_, e, Ei, ri in zip(rows, b, E, r):
            Eref = linearization_error_E((c, fc), e, a)
            assert row_.value(c) == pytest.approx(fc - Eref, abs=1e-10)
            assert Ei == pytest.approx(Eref, abs=1e-10)
            assert ri == pytest.approx(fc - Eref, abs=1e-10)
        np.testing.assert_allclose(G, [row_.gradient for row_ in rows])


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_E_nonnegative_once_a_reaches_a_min(seed):
    rng = np.random.default_rng(seed)
    b = random_bundle(rng, n=3, m=6)
    a = compute_a_min(b)
    for center in b:
        for e in b:
            E = linearization_error_E((center.point, center.value), e, a)
            assert E >= -1e-12 * max(1.0, abs(center.value), a)


def test_a_min_nondecreasing_under_additions():
    rng = np.random.default_rng(1)
    b = Bundle()
    prev = 0.0
    for e in random_bundle(rng, m=15):
        b.add(e)
        assert b.a_min >= prev
        assert b.a_min == pytest.approx(compute_a_min(b.elements), rel=1e-12, abs=1e-12)
        prev = b.a_min


def test_bundle_replace_recomputes_a_min():
    b = Bundle([el(0, 0, 0), el(1, -1, -2), el(3, 9, 6)])
    assert b.a_min == pytest.approx(2.0)
    assert b.replace([b[0], b[2]])
    assert b.a_min == 0.0
    assert not b.replace(list(b.elements))


def test_bundle_capacity():
    b = Bundle([el(0, 0, 0)], capacity=2)
    b.add(el(1, 1, 2))
    with pytest.raises(NumericalFailure):
        b.add(el(2, 4, 4))


def test_identity_abs_example():
    bundle = [el(0, 0, 1, is_center_plane=True), el(-1, 1, -1)]
    box = BoxRegion(np.zeros(1), 1.0)
    sol = solve_subproblem(build_rows(bundle, np.zeros(1), 0.0), box)
    mr = model_reduction_identity(sol, bundle, (np.zeros(1), 0.0), 0.0, 1.0)
    assert sol.z_star == pytest.approx(0.0, abs=1e-12)
    assert mr.lhs == pytest.approx(0.0, abs=1e-12)
    assert mr.rhs == pytest.approx(0.0, abs=1e-12)


def test_identity_on_random_bundles():
    rng = np.random.default_rng(2)
    for _ in range(300):
        n = int(rng.integers(1, 4))
        b = random_bundle(rng, n=n, m=int(rng.integers(1, 7)))
        c = rng.normal(size=n)
        a = float(abs(rng.normal())) * rng.integers(0, 2)
        # centre value at least as large as every row keeps E >= 0 as in the solvers
        fc = max(r.value(c) for r in build_rows(b, c, a)) + abs(rng.normal())
        delta = 10.0 ** rng.uniform(-2, 1)
        sol = solve_subproblem(build_rows(b, c, a), BoxRegion(c, delta))
        mr = model_reduction_identity(sol, b, (c, fc), a, delta)
        assert mr.residual <= 1e-6 * (1 + abs(mr.lhs))
        if not sol.boundary_hit:
            assert np.sum(np.abs(mr.aggregate)) <= 1e-7 * max(1.0, np.max(np.abs([e.subgrad for e in b])))


def test_identity_single_plane_on_boundary():
    e = el(0.5, 2.0, 3.0)
    c, fc, delta = np.zeros(1), 1.0, 0.4
    sol = solve_subproblem(build_rows([e], c, 0.0), BoxRegion(c, delta))
    assert sol.boundary_hit
    mr = model_reduction_identity(sol, [e], (c, fc), 0.0, delta)
    E = linearization_error_convex((c, fc), e)
    assert mr.lhs == pytest.approx(E + delta * 3.0)
    assert mr.residual <= 1e-12


def _sol_with(lam, residuals):
    class S:
        z_star = 0.0

        def multiplier_vector(self, m):
            return np.asarray(lam, dtype=float)

    s = S()
    s.residuals = np.asarray(residuals, dtype=float)
    return s


def test_prune_lpbc_counts_and_drops():
    b = [el(0, 0, 0, is_center_plane=True), el(1, 1, 1), el(2, 2, 2)]
    inactive = _sol_with([0, 0, 0], [1, 1, 1])
    for _ in range(19):
        b = prune_lpbc(b, inactive, T=20)
    assert len(b) == 3 and all(e.inactive_count == 19 for e in b)
    b = prune_lpbc(b, inactive, T=20)
    # only the centre plane survives a null step
    assert len(b) == 1 and b[0].is_center_plane
    assert prune_lpbc(b, inactive, T=20, serious=True) == []


def test_prune_lpbc_resets_active_rows():
    b = [el(0, 0, 0), el(1, 1, 1)]
    b[0].inactive_count = b[1].inactive_count = 10
    b = prune_lpbc(b, _sol_with([1.0, 0.0], [0.0, 0.0]), T=20)
    assert [e.inactive_count for e in b] == [0, 0]
    with pytest.raises(ValueError):
        prune_lpbc(b, _sol_with([1.0, 0.0], [0.0, 0.0]), T=19)


def test_prune_lpbnc_serious():
    b = [el(0, 0.0, 0), el(1, 1.0, 1), el(2, 3.0, 1)]
    assert prune_lpbnc_serious(b, 5.0) == b
    assert prune_lpbnc_serious(b, 2.0) == b[:2]


def test_dump_load_roundtrip():
    rng = np.random.default_rng(4)
    b = random_bundle(rng, n=3, m=4)
    b[1].born, b[1].inactive_count, b[1].is_center_plane = (2, 5), 7, True
    back = load_bundle(dump_bundle(b))
    for x, y in zip(b, back):
        assert np.array_equal(x.point, y.point) and np.array_equal(x.subgrad, y.subgrad)
        assert (x.value, x.born, x.inactive_count, x.is_center_plane) == (
            y.value, y.born, y.inactive_count, y.is_center_plane)


@pytest.mark.parametrize("problem", [p for p in registry() if p.convex], ids=lambda p: p.key)
def test_convex_planes_minorize(problem):
    rng = np.random.default_rng(problem.number)
    pts = problem.x0 + rng.normal(size=(5, problem.dim))
    bundle = []
    for y in pts:
        r = evaluate(problem, y)
        bundle.append(BundleElement(y, r.value, r.subgrad))
    rows = build_rows(bundle, problem.x0, 0.0)
    for x in problem.x0 + rng.uniform(-1, 1, size=(100, problem.dim)):
        fx = evaluate(problem, x).value
        assert max(r_.value(x) for r_ in rows) <= fx + 1e-9 * max(1.0, abs(fx))

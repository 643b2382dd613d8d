"""LP bundle method for prox-regular nonconvex minimization.

The model is built for the locally convexified function
``f + a/2 ||. - xbar||^2`` around the current center ``xbar``. The parameter
``a`` is kept above the bundle's convexification bound ``a_min`` so that
every plane stays below the model at the center. A level bound ``f_u`` keeps
bundle points in a sublevel set: trial points above it are pulled back
towards the center before they enter the bundle.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .bundle import Bundle, BundleElement, prune_lpbnc_serious
from .errors import BacktrackExhausted, BudgetExceeded, NumericalFailure
from .lp import ToleranceConfig
from .lpbc import (
    Delta0,
    SolverState,
    TrustRegionParams,
    finish,
    initial_radius,
    out_of_budget,
    reindex_warm_start,
    rho,
    solve_model,
    stopping_test,
    update_trust_region,
)
from .problems import Problem, evaluate
from .report import BACKTRACK_EXHAUSTED, BUDGET, CONVERGED, NUMERICAL_FAILURE, UNBOUNDED, Budget, RunReport

UNBOUNDED_FLOOR = -1e15
MAX_BACKTRACK = 200


@dataclass(frozen=True)
class LpbncParams:
    trust: TrustRegionParams = field(default_factory=TrustRegionParams)
    beta: float = 0.7
    gamma: float = 2.0
    sigma: float = 2.0
    alpha3: float = 0.5
    eps_tol: float = 1e-5
    unbounded_floor: float = UNBOUNDED_FLOOR
    max_backtrack: int = MAX_BACKTRACK

    def __post_init__(self):
        if not 0 < self.beta < 1:
            raise ValueError("beta must lie in (0, 1)")
        if not 2 <= self.gamma <= 10:
            raise ValueError("gamma must lie in [2, 10]")
        if self.sigma < 1:
            raise ValueError("sigma must be at least 1")
        if not 0 < self.alpha3 < 1:
            raise ValueError("alpha3 must lie in (0, 1)")
        if self.eps_tol < 0:
            raise ValueError("eps_tol must be nonnegative")


def backtrack(x_k, f_u: float, trial, beta: float, fun, max_steps: int = MAX_BACKTRACK):
    """Pull ``trial`` back towards ``x_k`` until its value drops to ``f_u``.

    Returns ``(y, f(y), evals)`` with ``y = x_k + beta**j (trial - x_k)`` for
    the smallest ``j >= 1`` such that ``f(y) <= f_u``. ``fun`` returns the
    function value at a point.
    """
    x_k = np.asarray(x_k, dtype=float)
    d = np.asarray(trial, dtype=float) - x_k
    step = 1.0
    for j in range(1, max_steps + 1):
        step *= beta
        y = x_k + step * d
        fy = fun(y)
        if fy <= f_u:
            return y, fy, j
    raise BacktrackExhausted(f"no point below the level bound after {max_steps} backtracking steps")


def update_a(a: float, a_min: float, gamma: float, sigma: float) -> tuple[float, bool]:
    """Raise ``a`` to at least ``a_min`` geometrically, or relax it when far above."""
    if a < 0 or a_min < 0:
        raise ValueError("a and a_min must be nonnegative")
    if a < a_min:
        new = max(a_min, gamma * a)
    elif a_min > 0 and a >= sigma * a_min:
        new = 0.5 * (a + a_min)
    else:
        new = a
    return new, new != a


def update_f_u(f_u: float, f_new_center: float, alpha3: float) -> float:
    return alpha3 * f_new_center + (1.0 - alpha3) * f_u


def run_lpbnc(
    problem: Problem,
    params: LpbncParams | None = None,
    budget: Budget | None = None,
    delta0: Delta0 | str | None = None,
    tol: ToleranceConfig | None = None,
    raise_on_budget: bool = False,
) -> RunReport:
    """Minimize ``problem`` (possibly nonconvex) from its standard start."""
    params = params or LpbncParams()
    tr = params.trust
    budget = budget or Budget()
    tol = tol or ToleranceConfig()
    t_start = time.perf_counter()

    x = problem.x0.astype(float).copy()
    resp = evaluate(problem, x)
    if resp.domain_error:
        raise ValueError(f"{problem.name}: starting point outside the domain")
    delta = tr.delta0 if delta0 is None else initial_radius(delta0, resp.subgrad, tr.delta_max)
    bundle = Bundle([BundleElement(x, resp.value, resp.subgrad, is_center_plane=True)])
    state = SolverState(x=x, f=resp.value, delta=delta, bundle=bundle, nf=1, se=1)
    diag = state.diagnostics
    a, au, nb = 0.0, 0, 0
    f_u = resp.value
    prev_z = None
    major_a_min = bundle.a_min

    def value(y):
        nonlocal nb
        state.nf += 1
        nb += 1
        return evaluate(problem, y).value

    def report():
        return finish(problem, state, t_start, nb, a, state.bundle.a_min, au)

    try:
        while True:
            if out_of_budget(state, budget):
                state.stop_reason = BUDGET
                rep = report()
                if raise_on_budget:
                    raise BudgetExceeded(f"{problem.name}: budget exhausted", rep)
                return rep

            sol, E = solve_model(state, a, tol)
            diag.record_errors(E, state.f)
            if prev_z is not None:
                diag.z_checks += 1
                if sol.z_star < prev_z - 1e-9 * (1.0 + abs(prev_z)):
                    diag.z_violations += 1
            prev_z = None
            if stopping_test(state.f, sol.z_star, params.eps_tol):
                state.stop_reason = CONVERGED
                return report()

            y = sol.x_star
            trial = evaluate(problem, y)
            state.nf += 1
            state.L += 1
            step = float(np.max(np.abs(y - state.x)))
            ratio = -math.inf if trial.domain_error else rho(state.f, trial.value, sol.z_star)
            old = state.bundle.elements
            a_before = a

            if ratio >= tr.eta1:
                state.se += 1
                state.delta = update_trust_region(state.delta, ratio, step, tr)
                kept = prune_lpbnc_serious(old, f_u)
                for e in kept:
                    e.is_center_plane = False
                if not trial.value < state.f:
                    diag.f_violations += 1
                state.x, state.f = y.copy(), trial.value
                state.k += 1
                state.l = 0
                f_u = update_f_u(f_u, trial.value, params.alpha3)
                removed = state.bundle.replace(kept)
                state.bundle.add(BundleElement(y.copy(), trial.value, trial.subgrad,
                                               born=(state.k, 0), is_center_plane=True))
                major_a_min = state.bundle.a_min
            else:
                new_delta = update_trust_region(state.delta, ratio, step, tr)
                if new_delta < state.delta:
                    state.sh += 1
                state.delta = new_delta
                state.l += 1
                removed = False
                if trial.value > f_u and state.k > 0:
                    y, _, _ = backtrack(state.x, f_u, y, params.beta, value, params.max_backtrack)
                    trial = evaluate(problem, y)
                if not trial.domain_error:
                    state.se += 1
                    state.bundle.add(BundleElement(y.copy(), trial.value, trial.subgrad,
                                                   born=(state.k, state.l)))
                if state.bundle.a_min < major_a_min:
                    diag.a_min_violations += 1
                major_a_min = state.bundle.a_min

            a, changed = update_a(a, state.bundle.a_min, params.gamma, params.sigma)
            au += changed
            if a < state.bundle.a_min:
                diag.a_below_a_min += 1
            diag.max_a_min = max(diag.max_a_min, state.bundle.a_min)
            if a > params.gamma * diag.max_a_min + 1e-12:
                diag.a_bound_violated = True
            if state.f < params.unbounded_floor:
                state.stop_reason = UNBOUNDED
                return report()
            # the model value can only be compared across a clean null step
            if ratio < tr.eta1 and not removed and a == a_before:
                prev_z = sol.z_star
            state.warm = reindex_warm_start(state.warm, old, state.bundle.elements)
    except (NumericalFailure, BacktrackExhausted) as exc:
        state.stop_reason = NUMERICAL_FAILURE if isinstance(exc, NumericalFailure) else BACKTRACK_EXHAUSTED
        exc.report = report()
        raise

"""LP bundle method for convex nonsmooth minimization.

Each minor iteration minimizes the cutting-plane model over an
infinity-norm trust region with one LP, then either accepts the trial point
(serious step) or adds its plane to the model (null step). The trust-region
radius grows after long successful steps and shrinks after trial points that
are much worse than the center.
"""

from __future__ import annotations

import enum
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .bundle import Bundle, BundleElement, prune_lpbc, row_arrays
from .errors import BacktrackExhausted, BudgetExceeded, DivisionGuard, NumericalFailure
from .lp import ToleranceConfig, solve_centered
from .problems import Problem, evaluate
from .report import BACKTRACK_EXHAUSTED, BUDGET, CONVERGED, NUMERICAL_FAILURE, Budget, RunDiagnostics, RunReport


@dataclass(frozen=True)
class TrustRegionParams:
    """Acceptance and radius-update constants.

    ``eta2`` is accepted for completeness but unused by either algorithm.
    """

    eta1: float = 1e-4
    eta3: float = 0.4
    alpha1: float = 0.25
    alpha2: float = 2.0
    delta_max: float = 1000.0
    delta0: float = 1.0
    eta2: float | None = None

    def __post_init__(self):
        if not 0 < self.eta1 < self.eta3 < 1:
            raise ValueError("need 0 < eta1 < eta3 < 1")
        if not 0 < self.alpha1 < 1 < self.alpha2:
            raise ValueError("need 0 < alpha1 < 1 < alpha2")
        if not 0 < self.delta0 <= self.delta_max:
            raise ValueError("need 0 < delta0 <= delta_max")


class Delta0(str, enum.Enum):
    ONE = "one"
    SCALED = "scaled"


def initial_radius(strategy: Delta0 | str, s0: np.ndarray, delta_max: float = 1000.0) -> float:
    """``1`` or a tenth of the starting subgradient's Euclidean norm (capped at ``delta_max``)."""
    if Delta0(strategy) is Delta0.ONE:
        return 1.0
    r = float(np.linalg.norm(s0)) / 10.0
    return min(r, delta_max) if r > 0 else 1.0


def rho(f_center: float, f_trial: float, z_star: float) -> float:
    """Ratio of actual to predicted decrease."""
    denom = f_center - z_star
    if not denom > 0:
        raise DivisionGuard(f"model reduction {denom:.3e} is not positive")
    return (f_center - f_trial) / denom


def stopping_test(f_center: float, z_star: float, eps_tol: float) -> bool:
    return f_center - z_star <= (1.0 + abs(f_center)) * eps_tol


def update_trust_region(delta: float, rho_val: float, step_inf_norm: float, params: TrustRegionParams) -> float:
    """Grow the radius after a long good step, shrink it after a bad trial point.

    Accepted steps have ``rho >= eta1`` and can never hit the shrink branch;
    rejected ones have ``rho < eta3`` and can never hit the growth branch.
    """
    if delta <= 0:
        raise ValueError("trust-region radius must be positive")
    if rho_val > params.eta3 and step_inf_norm > 0.9 * delta:
        return min(params.alpha2 * delta, params.delta_max)
    if rho_val < -1.0 / min(1.0, delta):
        return params.alpha1 * delta
    return delta


@dataclass
class SolverState:
    """Everything carried from one minor iteration to the next."""

    x: np.ndarray
    f: float
    delta: float
    bundle: Bundle
    k: int = 0
    l: int = 0
    L: int = 0
    nf: int = 0
    se: int = 0
    sh: int = 0
    lp_solves: int = 0
    lp_time: float = 0.0
    stop_reason: str = ""
    warm: tuple | None = None
    diagnostics: RunDiagnostics = field(default_factory=RunDiagnostics)


def reindex_warm_start(warm, old_elems, new_elems):
    """Map a basis onto a pruned/extended bundle; ``None`` if a basic row vanished."""
    if warm is None:
        return None
    pos = {id(e): i for i, e in enumerate(new_elems)}
    rows = []
    for i in warm[0]:
        j = pos.get(id(old_elems[i]))
        if j is None:
            return None
        rows.append(j)
    return tuple(rows), warm[1]


def solve_model(state: SolverState, a: float, tol: ToleranceConfig):
    """Build the rows for the current center and solve the LP; returns ``(sol, E)``."""
    G, E, r = row_arrays(state.bundle.elements, state.x, state.f, a)
    t0 = time.perf_counter()
    sol = solve_centered(G, r, state.x, state.delta, tol, state.warm)
    state.lp_time += time.perf_counter() - t0
    state.lp_solves += 1
    state.warm = (sol.basis_rows, sol.basis_box)
    diag = state.diagnostics
    diag.solves += 1
    lam = sol.multiplier_vector(len(E))
    rhs = float(lam @ E)
    if sol.boundary_hit:
        rhs += state.delta * float(np.sum(np.abs(sol.aggregate)))
    lhs = state.f - sol.z_star
    diag.record_identity(lhs, rhs)
    if lhs < -1e-9 * (1.0 + abs(state.f)):
        diag.negative_model_reduction += 1
    return sol, E


def finish(problem: Problem, state: SolverState, t_start: float, nb: int = 0,
           a: float = 0.0, a_min: float = 0.0, au: int = 0) -> RunReport:
    return RunReport(
        problem=problem.name,
        f_val=float(state.f),
        error=float(state.f - problem.f_opt_ref),
        nf=state.nf,
        se=state.se,
        pb=100.0 * nb / state.nf if state.nf else 0.0,
        k=state.k,
        L=state.L,
        wall_time=time.perf_counter() - t_start,
        lp_time=state.lp_time,
        delta_final=float(state.delta),
        sh=state.sh,
        a_final=float(a),
        a_min_final=float(a_min),
        au=au,
        stop_reason=state.stop_reason,
        x_final=state.x.copy(),
        diagnostics=state.diagnostics,
    )


def out_of_budget(state: SolverState, budget: Budget) -> bool:
    return state.lp_solves >= budget.max_lp_solves or state.nf >= budget.max_evals


def run_lpbc(
    problem: Problem,
    params: TrustRegionParams | None = None,
    eps_tol: float = 1e-6,
    budget: Budget | None = None,
    T: int = 30,
    delta0: Delta0 | str | None = None,
    tol: ToleranceConfig | None = None,
    raise_on_budget: bool = False,
) -> RunReport:
    """Minimize a convex ``problem`` from its standard start.

    ``delta0`` selects the initial radius strategy; when omitted
    ``params.delta0`` is used as given. On budget exhaustion the report of
    the best point reached is returned with ``stop_reason="budget"`` (or
    raised inside :class:`BudgetExceeded` when ``raise_on_budget``).
    """
    params = params or TrustRegionParams()
    budget = budget or Budget()
    tol = tol or ToleranceConfig()
    if T < 20:
        raise ValueError("inactivity threshold T must be at least 20")
    t_start = time.perf_counter()

    x = problem.x0.astype(float).copy()
    resp = evaluate(problem, x)
    if resp.domain_error:
        raise ValueError(f"{problem.name}: starting point outside the domain")
    delta = params.delta0 if delta0 is None else initial_radius(delta0, resp.subgrad, params.delta_max)
    bundle = Bundle([BundleElement(x, resp.value, resp.subgrad, is_center_plane=True)])
    state = SolverState(x=x, f=resp.value, delta=delta, bundle=bundle, nf=1, se=1)
    diag = state.diagnostics
    prev_z = None  # z of the previous solve when it was followed by a clean null step

    try:
        while True:
            if out_of_budget(state, budget):
                state.stop_reason = BUDGET
                report = finish(problem, state, t_start)
                if raise_on_budget:
                    raise BudgetExceeded(f"{problem.name}: budget exhausted", report)
                return report

            sol, E = solve_model(state, 0.0, tol)
            diag.record_errors(E, state.f)
            if prev_z is not None:
                diag.z_checks += 1
                if sol.z_star < prev_z - 1e-9 * (1.0 + abs(prev_z)):
                    diag.z_violations += 1
            prev_z = None
            if stopping_test(state.f, sol.z_star, eps_tol):
                state.stop_reason = CONVERGED
                return finish(problem, state, t_start)

            y = sol.x_star
            trial = evaluate(problem, y)
            state.nf += 1
            state.L += 1
            step = float(np.max(np.abs(y - state.x)))
            ratio = -math.inf if trial.domain_error else rho(state.f, trial.value, sol.z_star)
            old = state.bundle.elements

            if ratio >= params.eta1:
                state.se += 1
                state.delta = update_trust_region(state.delta, ratio, step, params)
                kept = prune_lpbc(old, sol, T, serious=True, feas_tol=tol.feas_tol)
                for e in kept:
                    e.is_center_plane = False
                if not trial.value < state.f:
                    diag.f_violations += 1
                state.x, state.f = y.copy(), trial.value
                state.k += 1
                state.l = 0
                elem = BundleElement(y.copy(), trial.value, trial.subgrad,
                                     born=(state.k, 0), is_center_plane=True)
            else:
                new_delta = update_trust_region(state.delta, ratio, step, params)
                if new_delta < state.delta:
                    state.sh += 1
                state.delta = new_delta
                kept = prune_lpbc(old, sol, T, serious=False, feas_tol=tol.feas_tol)
                state.l += 1
                elem = None
                if not trial.domain_error:
                    state.se += 1
                    elem = BundleElement(y.copy(), trial.value, trial.subgrad, born=(state.k, state.l))
                if len(kept) == len(old):
                    prev_z = sol.z_star
            # planes are convex minorants here, so a_min is not needed
            state.bundle.elements = kept
            if elem is not None:
                state.bundle.elements.append(elem)
            state.warm = reindex_warm_start(state.warm, old, state.bundle.elements)
    except (NumericalFailure, BacktrackExhausted) as exc:
        state.stop_reason = NUMERICAL_FAILURE if isinstance(exc, NumericalFailure) else BACKTRACK_EXHAUSTED
        exc.report = finish(problem, state, t_start)
        raise

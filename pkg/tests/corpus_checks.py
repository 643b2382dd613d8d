"""Oracle validation suites shared by the corpus tests and the acceptance run."""

import numpy as np

from lpbundle.errors import NotSmoothHere
from lpbundle.problems import Problem, evaluate, fd_subgrad_check

FD_POINTS = 50
FD_TOL = 1e-5
INEQ_PAIRS = 500
INEQ_TOL = 1e-9


def _rng(problem: Problem) -> np.random.Generator:
    return np.random.default_rng(1000 + problem.number + (0 if problem.convex else 100))


def fd_suite(problem: Problem, points: int = FD_POINTS, max_tries: int = 5000) -> float:
    """Worst finite-difference error over ``points`` smooth points near the start."""
    rng = _rng(problem)
    errs = []
    for _ in range(max_tries):
        x = problem.x0 + 0.5 * rng.normal(size=problem.dim)
        try:
            errs.append(fd_subgrad_check(problem, x))
        except NotSmoothHere:
            continue
        if len(errs) == points:
            return max(errs)
    raise AssertionError(f"{problem.name}: only {len(errs)} smooth points found")


def subgradient_inequality_suite(problem: Problem, pairs: int = INEQ_PAIRS) -> float:
    """Largest violation of ``f(y) >= f(x) + <s(x), y - x>`` over random pairs."""
    rng = _rng(problem)
    worst = 0.0
    for _ in range(pairs):
        x = problem.x0 + rng.normal(size=problem.dim)
        y = problem.x0 + rng.normal(size=problem.dim)
        rx = evaluate(problem, x)
        worst = max(worst, rx.value + rx.subgrad @ (y - x) - evaluate(problem, y).value)
    return worst

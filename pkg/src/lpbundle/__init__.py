"""LP-only bundle methods for convex and prox-regular nonconvex minimization.

``run_lpbc`` handles convex problems and ``run_lpbnc`` handles nonconvex
ones. Each subproblem is a small LP over an infinity-norm trust region,
solved by the in-package simplex in :mod:`lpbundle.lp`.
"""

from .bundle import Bundle, BundleElement, compute_a_min, linearization_error_E
from .errors import (
    BacktrackExhausted,
    BudgetExceeded,
    DimensionMismatch,
    DivisionGuard,
    LPBundleError,
    NotSmoothHere,
    NumericalFailure,
    ProblemUnavailable,
    SizeExceeded,
)
from .lp import BoxRegion, PlaneRow, SubproblemSolution, ToleranceConfig, solve_subproblem, vertex_oracle
from .lpbc import Delta0, TrustRegionParams, run_lpbc
from .lpbnc import LpbncParams, run_lpbnc
from .problems import Problem, brute_force_prox, evaluate, fd_subgrad_check, lookup, registry, select
from .report import Budget, RunReport, emit_table, read_jsonl

__all__ = [
    "BacktrackExhausted",
    "BoxRegion",
    "Budget",
    "BudgetExceeded",
    "Bundle",
    "BundleElement",
    "Delta0",
    "DimensionMismatch",
    "DivisionGuard",
    "LPBundleError",
    "LpbncParams",
    "NotSmoothHere",
    "NumericalFailure",
    "PlaneRow",
    "Problem",
    "ProblemUnavailable",
    "RunReport",
    "SizeExceeded",
    "SubproblemSolution",
    "ToleranceConfig",
    "TrustRegionParams",
    "brute_force_prox",
    "compute_a_min",
    "emit_table",
    "evaluate",
    "fd_subgrad_check",
    "linearization_error_E",
    "lookup",
    "read_jsonl",
    "registry",
    "run_lpbc",
    "run_lpbnc",
    "select",
    "solve_subproblem",
    "vertex_oracle",
]

"""Run telemetry, runtime invariant checks and table rendering."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field, fields
from typing import Iterable, Sequence

import numpy as np

CONVERGED = "converged"
BUDGET = "budget"
UNBOUNDED = "unbounded"
NUMERICAL_FAILURE = "numerical_failure"
BACKTRACK_EXHAUSTED = "backtrack_exhausted"
UNAVAILABLE = "unavailable"
ERROR = "error"


@dataclass(frozen=True)
class Budget:
    max_lp_solves: int = 100_000
    max_evals: int = 200_000

    def __post_init__(self):
        if self.max_lp_solves < 1 or self.max_evals < 1:
            raise ValueError("budgets must be positive")


@dataclass
class RunDiagnostics:
    """Counters for the invariants checked on every LP solve of a run.

    Violation counters should all end at zero; ``identity_max`` is the largest
    normalized residual of the model-reduction identity
    ``f(xbar) - z* = sum lam_i E_i + delta ||aggregate||_1 [boundary]``.
    """

    solves: int = 0
    identity_max: float = 0.0
    identity_violations: int = 0
    negative_model_reduction: int = 0
    z_checks: int = 0
    z_violations: int = 0
    f_violations: int = 0
    a_min_violations: int = 0
    min_E_scaled: float = math.inf
    E_violations: int = 0
    a_below_a_min: int = 0
    max_a_min: float = 0.0
    a_bound_violated: bool = False

    def record_identity(self, lhs: float, rhs: float, tol: float = 1e-6):
        res = abs(lhs - rhs) / (1.0 + abs(lhs))
        self.identity_max = max(self.identity_max, res)
        if res > tol:
            self.identity_violations += 1

    def record_errors(self, E: np.ndarray, f_center: float, tol: float = 1e-12):
        """Linearization errors, scaled by the magnitude of the center value."""
        worst = float(np.min(E)) / max(1.0, abs(f_center))
        self.min_E_scaled = min(self.min_E_scaled, worst)
        if worst < -tol:
            self.E_violations += 1

    @property
    def clean(self) -> bool:
        return not (
            self.identity_violations
            or self.z_violations
            or self.f_violations
            or self.a_min_violations
            or self.E_violations
            or self.a_below_a_min
            or self.a_bound_violated
        )


@dataclass
class RunReport:
    problem: str
    f_val: float
    error: float
    nf: int
    se: int
    pb: float
    k: int
    L: int
    wall_time: float
    lp_time: float
    delta_final: float
    sh: int
    a_final: float
    a_min_final: float
    au: int
    stop_reason: str
    x_final: np.ndarray | None = field(default=None, repr=False, compare=False)
    diagnostics: RunDiagnostics | None = field(default=None, repr=False, compare=False)


REPORT_FIELDS = [f.name for f in fields(RunReport) if f.compare]
_INT_FIELDS = {"nf", "se", "k", "L", "sh", "au"}
_TIME_FIELDS = {"wall_time", "lp_time"}
CONVEX_COLUMNS = ["problem", "f_val", "nf", "k", "L", "wall_time", "lp_time", "delta_final", "sh", "stop_reason"]
NONCONVEX_COLUMNS = ["problem", "error", "nf", "pb", "se", "k", "L", "a_final", "a_min_final", "au", "stop_reason"]


def _fmt(name: str, value) -> str:
    if name in _TIME_FIELDS:
        return f"{value:.3f}"
    if isinstance(value, float):
        return f"{value:.9g}"
    return str(value)


def _record(report: RunReport) -> dict:
    return {name: getattr(report, name) for name in REPORT_FIELDS}


def emit_table(reports: Sequence[RunReport], fmt: str = "table", columns: Sequence[str] | None = None) -> str:
    """Render reports as an aligned text table, CSV or JSON lines.

    CSV and JSON lines always carry every report field; ``columns`` only
    narrows the text table. JSON lines keep full float precision so that
    :func:`read_jsonl` reproduces the reports exactly.
    """
    if fmt == "jsonl":
        return "".join(json.dumps(_record(r)) + "\n" for r in reports)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(REPORT_FIELDS)
        for r in reports:
            writer.writerow([_fmt(n, getattr(r, n)) for n in REPORT_FIELDS])
        return buf.getvalue()
    if fmt != "table":
        raise ValueError(f"unknown output format {fmt!r}")
    cols = list(columns or REPORT_FIELDS)
    cells = [cols] + [[_fmt(c, getattr(r, c)) for c in cols] for r in reports]
    widths = [max(len(row[i]) for row in cells) for i in range(len(cols))]
    lines = []
    for j, row in enumerate(cells):
        lines.append("  ".join(
            cell.ljust(w) if i == 0 or cols[i] == "stop_reason" else cell.rjust(w)
            for i, (cell, w) in enumerate(zip(row, widths))
        ).rstrip())
        if j == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def read_jsonl(text: str) -> list[RunReport]:
    out = []
    for line in text.splitlines():
        if line.strip():
            rec = json.loads(line)
            out.append(RunReport(**{k: rec[k] for k in REPORT_FIELDS}))
    return out


@dataclass(frozen=True)
class ToleranceSpec:
    """Per-problem absolute error tolerances with a default."""

    default: float = 1e-4
    per_problem: dict = field(default_factory=dict)

    def __call__(self, name: str) -> float:
        return self.per_problem.get(name, self.default)


@dataclass
class Comparison:
    problem: str
    passed: bool
    detail: str


def compare_to_reference(
    reports: Iterable[RunReport], tolerance: ToleranceSpec, unbounded: Iterable[str] = ()
) -> tuple[bool, list[Comparison]]:
    """Check each report's error against its tolerance.

    Problems listed in ``unbounded`` pass only if the run stopped on the
    unboundedness floor.
    """
    unbounded = set(unbounded)
    results = []
    for r in reports:
        if r.problem in unbounded:
            ok = r.stop_reason == UNBOUNDED
            detail = f"stop_reason={r.stop_reason} (expected {UNBOUNDED})"
        else:
            tol = tolerance(r.problem)
            ok = r.stop_reason not in (UNAVAILABLE, ERROR, NUMERICAL_FAILURE) and abs(r.error) <= tol
            detail = f"|error|={abs(r.error):.3e} tol={tol:.1e} stop_reason={r.stop_reason}"
        results.append(Comparison(r.problem, ok, detail))
    return all(c.passed for c in results), results

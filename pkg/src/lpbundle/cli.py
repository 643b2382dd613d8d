"""Command-line benchmark harness.

Configuration comes from an optional INI file (sections ``[run]``,
``[trust]``, ``[lpbc]``, ``[lpbnc]``) overridden by command-line flags::

    lpbundle --algo lpbc --problems c1-14 --eps-tol 1e-6 --delta0 one --T 30
    lpbundle --algo lpbnc --problems nonconvex --beta 0.7 --format csv --out runs.csv
"""

from __future__ import annotations

import argparse
import configparser
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

from .errors import BacktrackExhausted, NumericalFailure, ProblemUnavailable
from .lp import ToleranceConfig
from .lpbc import Delta0, TrustRegionParams, run_lpbc
from .lpbnc import LpbncParams, run_lpbnc
from .problems import Problem, registry, select
from .report import (
    BACKTRACK_EXHAUSTED,
    CONVEX_COLUMNS,
    ERROR,
    NONCONVEX_COLUMNS,
    NUMERICAL_FAILURE,
    UNAVAILABLE,
    Budget,
    RunReport,
    ToleranceSpec,
    compare_to_reference,
    emit_table,
)

EXIT_OK, EXIT_CHECK_FAILED, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2, 3

# Accuracy targets for --check. Convex runs must come within 2e-4 of the
# reference optimum. Nonconvex targets are ten times the reference errors of
# runs with unit initial radius and beta = 0.7, with 1e-4 as a floor where
# that error was zero or tiny.
CONVEX_TOLERANCE = ToleranceSpec(default=2e-4)
NONCONVEX_TOLERANCE = ToleranceSpec(
    default=1e-4,
    per_problem={
        "Crescent": 2.57e-3,
        "Gill": 2.196e-3,
        "Steiner 2": 1.409e-3,
        "Chained Mifflin2": 4.05e-4,
        "Chained Crescent II": 1.01e-4,
    },
)


@dataclass
class RunConfig:
    algorithm: str = "lpbc"
    problems: str = "convex"
    eps_tol: float | None = None
    delta0: Delta0 = Delta0.ONE
    trust: TrustRegionParams = field(default_factory=TrustRegionParams)
    lpbnc: LpbncParams = field(default_factory=LpbncParams)
    T: int = 30
    budget: Budget = field(default_factory=Budget)
    tol: ToleranceConfig = field(default_factory=ToleranceConfig)
    output_format: str = "table"
    parallel: int = 1

    def __post_init__(self):
        if self.algorithm not in ("lpbc", "lpbnc"):
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.T < 20:
            raise ValueError("T must be at least 20")
        if self.parallel < 1:
            raise ValueError("--parallel must be at least 1")
        self.delta0 = Delta0(self.delta0)

    @property
    def effective_eps(self) -> float:
        if self.eps_tol is not None:
            return self.eps_tol
        return 1e-6 if self.algorithm == "lpbc" else self.lpbnc.eps_tol


def _failed(problem: Problem, reason: str) -> RunReport:
    nan = float("nan")
    return RunReport(problem.name, nan, nan, 0, 0, 0.0, 0, 0, 0.0, 0.0, nan, 0, nan, nan, 0, reason)


def run_one(problem: Problem, config: RunConfig) -> RunReport:
    """One solver run; failures become a report with the matching stop reason."""
    try:
        if config.algorithm == "lpbc":
            return run_lpbc(problem, config.trust, config.effective_eps, config.budget,
                            T=config.T, delta0=config.delta0, tol=config.tol)
        params = replace(config.lpbnc, trust=config.trust, eps_tol=config.effective_eps)
        return run_lpbnc(problem, params, config.budget, delta0=config.delta0, tol=config.tol)
    except ProblemUnavailable:
        return _failed(problem, UNAVAILABLE)
    except NumericalFailure as exc:
        return exc.report or _failed(problem, NUMERICAL_FAILURE)
    except BacktrackExhausted as exc:
        return exc.report or _failed(problem, BACKTRACK_EXHAUSTED)
    except (ArithmeticError, ValueError):
        return _failed(problem, ERROR)


def run(config: RunConfig, problems: list[Problem] | None = None) -> list[RunReport]:
    """Run the selected problems, in order, on up to ``config.parallel`` threads."""
    probs = select(config.problems) if problems is None else problems
    if config.parallel == 1 or len(probs) <= 1:
        return [run_one(p, config) for p in probs]
    with ThreadPoolExecutor(max_workers=config.parallel) as pool:
        return list(pool.map(lambda p: run_one(p, config), probs))


def check(reports: list[RunReport], algorithm: str) -> tuple[bool, str]:
    if algorithm == "lpbc":
        ok, rows = compare_to_reference(reports, CONVEX_TOLERANCE)
    else:
        unbounded = [p.name for p in registry() if p.unbounded]
        ok, rows = compare_to_reference(reports, NONCONVEX_TOLERANCE, unbounded)
    lines = [f"{'PASS' if c.passed else 'FAIL'}  {c.problem}: {c.detail}" for c in rows]
    return ok, "\n".join(lines) + "\n"


def _float(section, key, default):
    return section.getfloat(key, fallback=default) if section is not None else default


def load_config(path: str) -> dict:
    """Read an INI file into keyword overrides for :class:`RunConfig`."""
    cp = configparser.ConfigParser()
    if not cp.read(path):
        raise ValueError(f"cannot read config file {path!r}")
    out: dict = {}
    run_s = cp["run"] if cp.has_section("run") else None
    if run_s is not None:
        for key in ("algorithm", "problems", "delta0", "output_format"):
            if key in run_s:
                out[key] = run_s[key]
        if "eps_tol" in run_s:
            out["eps_tol"] = run_s.getfloat("eps_tol")
        if "parallel" in run_s:
            out["parallel"] = run_s.getint("parallel")
        if "max_lp_solves" in run_s or "max_evals" in run_s:
            out["budget"] = Budget(run_s.getint("max_lp_solves", fallback=100_000),
                                   run_s.getint("max_evals", fallback=200_000))
    if cp.has_section("trust"):
        s = cp["trust"]
        base = TrustRegionParams()
        out["trust"] = TrustRegionParams(
            eta1=_float(s, "eta1", base.eta1),
            eta3=_float(s, "eta3", base.eta3),
            alpha1=_float(s, "alpha1", base.alpha1),
            alpha2=_float(s, "alpha2", base.alpha2),
            delta_max=_float(s, "delta_max", base.delta_max),
            delta0=_float(s, "delta0", base.delta0),
            eta2=s.getfloat("eta2", fallback=None),
        )
    if cp.has_section("lpbc"):
        out["T"] = cp["lpbc"].getint("T", fallback=30)
    if cp.has_section("lpbnc"):
        s = cp["lpbnc"]
        base = LpbncParams()
        out["lpbnc"] = LpbncParams(
            beta=_float(s, "beta", base.beta),
            gamma=_float(s, "gamma", base.gamma),
            sigma=_float(s, "sigma", base.sigma),
            alpha3=_float(s, "alpha3", base.alpha3),
            eps_tol=_float(s, "eps_tol", base.eps_tol),
            unbounded_floor=_float(s, "unbounded_floor", base.unbounded_floor),
        )
    return out


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lpbundle", description="Run LP bundle methods on the benchmark corpus.")
    ap.add_argument("--config", help="INI file with [run], [trust], [lpbc] and [lpbnc] sections")
    ap.add_argument("--algo", choices=["lpbc", "lpbnc"], help="convex (lpbc) or nonconvex (lpbnc) method")
    ap.add_argument("--problems", help="all, convex, nonconvex, ranges like c1-14, or names/keys separated by commas")
    ap.add_argument("--eps-tol", type=float)
    ap.add_argument("--delta0", choices=[d.value for d in Delta0])
    ap.add_argument("--beta", type=float)
    ap.add_argument("--gamma", type=float)
    ap.add_argument("--sigma", type=float)
    ap.add_argument("--alpha3", type=float)
    ap.add_argument("--T", type=int, dest="T")
    ap.add_argument("--budget", type=int, help="maximum LP solves; the evaluation budget is twice this")
    ap.add_argument("--format", choices=["table", "csv", "jsonl"], dest="output_format")
    ap.add_argument("--out", help="write the rendered reports to this file instead of stdout")
    ap.add_argument("--parallel", type=int)
    ap.add_argument("--check", action="store_true", help="compare against reference optima; exit 1 on failure")
    ap.add_argument("--list", action="store_true", help="list the problem registry and exit")
    return ap


def config_from_args(args: argparse.Namespace) -> RunConfig:
    kw = load_config(args.config) if args.config else {}
    for key, attr in (("algo", "algorithm"), ("problems", "problems"), ("eps_tol", "eps_tol"),
                      ("delta0", "delta0"), ("T", "T"), ("output_format", "output_format"),
                      ("parallel", "parallel")):
        value = getattr(args, key)
        if value is not None:
            kw[attr] = value
    if args.budget is not None:
        kw["budget"] = Budget(args.budget, 2 * args.budget)
    overrides = {k: getattr(args, k) for k in ("beta", "gamma", "sigma", "alpha3") if getattr(args, k) is not None}
    if overrides:
        kw["lpbnc"] = replace(kw.get("lpbnc", LpbncParams()), **overrides)
    return RunConfig(**kw)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.list:
        for p in registry():
            flag = "" if p.available else "  (unavailable)"
            print(f"{p.key:4s} {p.name:26s} n={p.dim:<4d} f*={p.f_opt_ref:.8g}{flag}")
        return EXIT_OK
    try:
        config = config_from_args(args)
        problems = select(config.problems)
    except (ValueError, KeyError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    reports = run(config, problems)
    columns = CONVEX_COLUMNS if config.algorithm == "lpbc" else NONCONVEX_COLUMNS
    text = emit_table(reports, config.output_format, columns if config.output_format == "table" else None)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)

    status = EXIT_OK
    if args.check:
        ok, summary = check(reports, config.algorithm)
        sys.stderr.write(summary)
        if not ok:
            status = EXIT_CHECK_FAILED
    if any(r.stop_reason == NUMERICAL_FAILURE for r in reports):
        status = EXIT_NUMERICAL
    return status


if __name__ == "__main__":
    sys.exit(main())

"""Epigraph LP over an infinity-norm box.

Solves

    minimize z  subject to  z >= <g_i, x> + o_i   (i = 1..m)
                            ||x - c||_inf <= radius

and returns the primal optimum together with the KKT multipliers of the
plane rows and of the box faces.

The LP is solved through its simplex-weight dual

    maximize  sum_i lam_i r_i - radius * ||sum_i lam_i g_i||_1
    s.t.      lam in the unit simplex

(with ``r_i`` the value of row ``i`` at the center), written in standard form
with split variables ``u - w = sum_i lam_i g_i`` and handled by a dense revised
primal simplex. The basis has dimension ``n + 1`` independently of the number
of rows, the plane multipliers are primal variables of that LP, and the
minimizer ``(x*, z*)`` is read off the simplex multipliers of the final basis.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, NumericalFailure, SizeExceeded

UPPER = 1
LOWER = -1
INACTIVE = 0

_REFACTOR_EVERY = 50
_PERTURBATION = 1e-7
_ROUNDS = 4


def _spread(k: int) -> np.ndarray:
    """Deterministic, well-separated values in [0, 1) (golden-ratio sequence)."""
    return np.modf(np.arange(1, k + 1) * 0.6180339887498949)[0]


@dataclass(frozen=True)
class ToleranceConfig:
    feas_tol: float = 1e-9
    opt_tol: float = 1e-9

    def __post_init__(self):
        if not (self.feas_tol > 0 and self.opt_tol > 0):
            raise ValueError("tolerances must be positive")


@dataclass(frozen=True)
class PlaneRow:
    """One constraint ``z >= <gradient, x> + offset``."""

    gradient: np.ndarray
    offset: float

    def __post_init__(self):
        g = np.asarray(self.gradient, dtype=float)
        if g.ndim != 1:
            raise DimensionMismatch("row gradient must be a vector")
        if not (np.all(np.isfinite(g)) and np.isfinite(self.offset)):
            raise ValueError("row entries must be finite")
        object.__setattr__(self, "gradient", g)
        object.__setattr__(self, "offset", float(self.offset))

    def value(self, x) -> float:
        return float(self.gradient @ np.asarray(x, dtype=float) + self.offset)


@dataclass(frozen=True)
class BoxRegion:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        c = np.asarray(self.center, dtype=float)
        if c.ndim != 1:
            raise DimensionMismatch("box center must be a vector")
        if not (np.isfinite(self.radius) and self.radius > 0):
            raise ValueError(f"box radius must be positive and finite, got {self.radius}")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", float(self.radius))


@dataclass
class SubproblemSolution:
    """Optimal basic solution of the epigraph LP with its KKT data.

    ``multipliers[k]`` belongs to row ``active_rows[k]``. ``box_active[j]`` is
    ``UPPER``/``LOWER`` when ``x*_j`` sits on the corresponding box face.
    ``upper_multipliers``/``lower_multipliers`` are the box-face duals, so that
    ``aggregate + upper_multipliers - lower_multipliers == 0``.
    """

    x_star: np.ndarray
    z_star: float
    active_rows: np.ndarray
    multipliers: np.ndarray
    box_active: np.ndarray
    boundary_hit: bool
    aggregate: np.ndarray
    upper_multipliers: np.ndarray
    lower_multipliers: np.ndarray
    dual_value: float
    residuals: np.ndarray = field(repr=False)
    pivots: int = 0
    basis_rows: tuple = ()
    basis_box: tuple = ()

    def multiplier_vector(self, m: int | None = None) -> np.ndarray:
        """Multipliers scattered into a dense vector over all rows."""
        m = len(self.residuals) if m is None else m
        lam = np.zeros(m)
        lam[self.active_rows] = self.multipliers
        return lam


def _stack_rows(rows: Sequence[PlaneRow], n: int) -> tuple[np.ndarray, np.ndarray]:
    if len(rows) == 0:
        raise ValueError("at least one plane row is required")
    for row in rows:
        if row.gradient.shape != (n,):
            raise DimensionMismatch(
                f"row gradient has length {row.gradient.shape[0]}, expected {n}"
            )
    G = np.array([row.gradient for row in rows], dtype=float).reshape(len(rows), n)
    o = np.array([row.offset for row in rows], dtype=float)
    return G, o


def solve_subproblem(
    rows: Sequence[PlaneRow],
    box: BoxRegion,
    tol: ToleranceConfig | None = None,
    warm_start: tuple | None = None,
) -> SubproblemSolution:
    """Minimize the pointwise max of ``rows`` over ``box``."""
    n = box.center.shape[0]
    G, o = _stack_rows(rows, n)
    r = G @ box.center + o
    return solve_centered(G, r, box.center, box.radius, tol, warm_start)


def solve_centered(
    G: np.ndarray,
    r: np.ndarray,
    center: np.ndarray,
    radius: float,
    tol: ToleranceConfig | None = None,
    warm_start: tuple | None = None,
) -> SubproblemSolution:
    """Same LP with rows given by slopes ``G`` and their values ``r`` at ``center``.

    ``warm_start`` is ``(basis_rows, basis_box)`` of an earlier solution,
    re-indexed to the current rows; it is ignored when it no longer forms a
    valid starting basis.
    """
    tol = tol or ToleranceConfig()
    G = np.ascontiguousarray(G, dtype=float)
    r = np.asarray(r, dtype=float)
    m, n = G.shape
    if r.shape != (m,) or center.shape != (n,):
        raise DimensionMismatch("inconsistent LP data shapes")
    if not (np.all(np.isfinite(G)) and np.all(np.isfinite(r))):
        raise NumericalFailure("non-finite LP data")
    simplex = _WeightSimplex(G, r, float(radius), tol)
    simplex.run(warm_start)
    return simplex.extract(center)


class _WeightSimplex:
    """Revised primal simplex on the simplex-weight dual.

    Column layout: ``0..m-1`` plane weights ``lam``; ``m..m+n-1`` ``u_j``
    (column ``+e_j``); ``m+n..m+2n-1`` ``w_j`` (column ``-e_j``). Row 0 is
    ``sum lam = 1``; row ``1+j`` is ``-sum lam_i g_ij + u_j - w_j = 0``.
    """

    def __init__(self, G, r, radius, tol):
        self.G = G
        self.r = r
        self.radius = radius
        self.m, self.n = G.shape
        self.cost = np.concatenate([-r, np.full(2 * self.n, radius)])
        # Each column gets its own magnitude, so that far-away planes with huge
        # values do not loosen the optimality test for the relevant ones.
        gmax = np.max(np.abs(G), axis=1) if self.n else np.zeros(self.m)
        self.colscale = np.concatenate(
            [np.maximum(1.0, np.maximum(np.abs(r), radius * gmax)), np.full(2 * self.n, max(1.0, radius))]
        )
        self.ctol = tol.opt_tol * self.colscale
        self.ftol = tol.feas_tol
        self.tol = tol
        self.pivots = 0

    def column(self, q: int) -> np.ndarray:
        m, n = self.m, self.n
        col = np.zeros(n + 1)
        if q < m:
            col[0] = 1.0
            col[1:] = -self.G[q]
        elif q < m + n:
            col[1 + q - m] = 1.0
        else:
            col[1 + q - m - n] = -1.0
        return col

    def basis_matrix(self, basis) -> np.ndarray:
        return np.column_stack([self.column(q) for q in basis])

    def cold_basis(self) -> list[int]:
        m, n = self.m, self.n
        k = int(np.argmax(self.r))
        return [k] + [m + j if self.G[k, j] >= 0 else m + n + j for j in range(n)]

    def try_warm(self, warm_start):
        if warm_start is None:
            return None
        rows, box = warm_start
        m, n = self.m, self.n
        basis = [int(i) for i in rows]
        for j, side in box:
            basis.append(m + j if side == "u" else m + n + j)
        if len(basis) != n + 1 or len(set(basis)) != n + 1:
            return None
        if any(q < 0 or q >= m + 2 * n for q in basis):
            return None
        B = self.basis_matrix(basis)
        try:
            Binv = np.linalg.inv(B)
        except np.linalg.LinAlgError:
            return None
        if not np.all(np.isfinite(Binv)) or np.linalg.cond(B) > 1e12:
            return None
        xB = Binv[:, 0]
        if np.any(xB < -1e-12):
            return None
        return basis, Binv

    def run(self, warm_start=None):
        n = self.n
        start = self.try_warm(warm_start)
        if start is None:
            basis = self.cold_basis()
            Binv = np.linalg.inv(self.basis_matrix(basis))
        else:
            basis, Binv = start
        # The weight LP is highly degenerate (most basic u/w sit at zero), which
        # stalls the primal simplex. Solve a copy whose right-hand side moves the
        # starting point a little into the interior of every basic bound, then
        # drop the shift and repair the few infeasibilities with dual pivots.
        e0 = np.zeros(n + 1)
        e0[0] = 1.0
        shift = _PERTURBATION * (1.0 + _spread(n + 1))
        for _ in range(_ROUNDS):
            b = e0 + self.basis_matrix(basis) @ shift
            basis, Binv = self.primal(basis, Binv, b)
            basis, Binv = self.dual_cleanup(basis, Binv)
            if self.is_optimal(basis, Binv):
                break
        else:
            raise NumericalFailure("simplex could not certify an optimal basis")
        xB = Binv[:, 0].copy()
        # leftovers are rounding noise of an ill-conditioned basis; the
        # primal/dual gap check in extract() guards the result itself
        if np.min(xB) < -1e-6:
            raise NumericalFailure("basis lost primal feasibility")
        self.basis = basis
        self.xB = np.maximum(xB, 0.0)
        self.pi = self.cost[basis] @ Binv

    def is_optimal(self, basis, Binv) -> bool:
        rc = self.reduced_costs(self.cost[basis] @ Binv)
        rc[basis] = 0.0
        return bool(np.all(rc >= -self.ctol))

    def pivot(self, basis, Binv, p: int, q: int, col: np.ndarray) -> np.ndarray:
        basis[p] = q
        prow = Binv[p] / col[p]
        col = col.copy()
        col[p] = 0.0
        Binv = Binv - np.outer(col, prow)
        Binv[p] = prow
        self.pivots += 1
        return Binv

    def primal(self, basis, Binv, b):
        """Primal simplex iterations for right-hand side ``b`` until optimal."""
        m, n = self.m, self.n
        bland_after = self.pivots + 50 * (n + m)
        hard_cap = bland_after + 20 * (n + m) + 1000
        bland = False
        since_refactor = 0
        checks = 0
        xB = np.maximum(Binv @ b, 0.0)
        while True:
            pi = self.cost[basis] @ Binv
            rc = self.reduced_costs(pi)
            rc[basis] = 0.0
            if bland:
                cand = np.flatnonzero(rc < -self.ctol)
                q = int(cand[0]) if cand.size else -1
            else:
                scaled = rc / self.colscale
                q = int(np.argmin(scaled))
                if rc[q] >= -self.ctol[q]:
                    q = -1
            if q < 0:
                # fresh factorization before declaring optimality
                Binv = np.linalg.inv(self.basis_matrix(basis))
                rc = self.reduced_costs(self.cost[basis] @ Binv)
                rc[basis] = 0.0
                checks += 1
                if np.all(rc >= -self.ctol) or checks > 5:
                    return basis, Binv
                xB = np.maximum(Binv @ b, 0.0)
                since_refactor = 0
                continue
            col = Binv @ self.column(q)
            ptol = 1e-11 * max(1.0, float(np.max(np.abs(col))))
            idx = np.flatnonzero(col > ptol)
            if idx.size == 0:
                raise NumericalFailure("LP dual reported unbounded (ill-conditioned bundle)")
            ratios = xB[idx] / col[idx]
            theta = float(np.min(ratios))
            ties = idx[ratios <= theta + 1e-12 * max(1.0, theta)]
            if bland:
                p = int(min(ties, key=lambda i: basis[i]))
            else:
                p = int(ties[np.argmax(col[ties])])
            xB = xB - theta * col
            xB[p] = theta
            np.maximum(xB, 0.0, out=xB)
            Binv = self.pivot(basis, Binv, p, q, col)
            since_refactor += 1
            if since_refactor >= _REFACTOR_EVERY:
                Binv = np.linalg.inv(self.basis_matrix(basis))
                xB = np.maximum(Binv @ b, 0.0)
                since_refactor = 0
            if self.pivots > bland_after:
                bland = True
            if self.pivots > hard_cap:
                raise NumericalFailure(
                    f"simplex exceeded {hard_cap} pivots (cycling past the Bland fallback)"
                )

    def row_entries(self, row: np.ndarray) -> np.ndarray:
        """Entries of ``row @ A`` over all columns of the constraint matrix."""
        return np.concatenate([row[0] - self.G @ row[1:], row[1:], -row[1:]])

    def dual_cleanup(self, basis, Binv):
        """Dual simplex pivots restoring ``Binv @ e0 >= 0`` while keeping optimality.

        Returns on a fresh factorization; tiny negative leftovers of an
        ill-conditioned basis are left for the caller to judge.
        """
        cap = self.pivots + 20 * (self.n + 1) + 100
        fresh = False
        while True:
            xB = Binv[:, 0]
            p = int(np.argmin(xB))
            if xB[p] >= -(1e-10 if fresh else 1e-13) or self.pivots > cap:
                if fresh:
                    return basis, Binv
                Binv = np.linalg.inv(self.basis_matrix(basis))
                fresh = True
                continue
            fresh = False
            rc = self.reduced_costs(self.cost[basis] @ Binv)
            alpha = self.row_entries(Binv[p])
            alpha[basis] = 0.0
            cand = np.flatnonzero(alpha < -1e-11 * max(1.0, float(np.max(np.abs(alpha)))))
            if cand.size == 0:
                raise NumericalFailure("dual cleanup found no entering column")
            q = int(cand[np.argmin(np.maximum(rc[cand], 0.0) / -alpha[cand])])
            Binv = self.pivot(basis, Binv, p, q, Binv @ self.column(q))

    def reduced_costs(self, pi: np.ndarray) -> np.ndarray:
        m, n = self.m, self.n
        rc = np.empty(m + 2 * n)
        px = pi[1:]
        rc[:m] = -self.r - pi[0] + self.G @ px
        rc[m : m + n] = self.radius - px
        rc[m + n :] = self.radius + px
        return rc

    def extract(self, center: np.ndarray) -> SubproblemSolution:
        m, n, radius = self.m, self.n, self.radius
        lam = np.zeros(m)
        u = np.zeros(n)
        w = np.zeros(n)
        for q, v in zip(self.basis, self.xB):
            if q < m:
                lam[q] = v
            elif q < m + n:
                u[q - m] = v
            else:
                w[q - m - n] = v
        d = np.clip(-self.pi[1:], -radius, radius)
        vals = self.G @ d + self.r
        z = float(np.max(vals))
        dual_value = float(lam @ self.r - radius * np.sum(u + w))
        gap = z - dual_value
        used = self.colscale[np.asarray(self.basis)]
        gap_tol = 10.0 * self.tol.opt_tol * (1.0 + n) * float(np.max(used))
        if gap > gap_tol or gap < -gap_tol:
            raise NumericalFailure(f"primal/dual gap {gap:.3e} exceeds {gap_tol:.3e}")
        residuals = z - vals
        rtol = self.ftol * max(1.0, abs(z))
        active = np.flatnonzero((residuals <= rtol) | (lam > 0.0))
        btol = self.ftol * max(radius, 1e-3)
        box_active = np.zeros(n, dtype=np.int8)
        box_active[d >= radius - btol] = UPPER
        box_active[d <= -radius + btol] = LOWER
        aggregate = lam @ self.G
        basis_rows = tuple(q for q in self.basis if q < m)
        basis_box = tuple(
            (q - m, "u") if q < m + n else (q - m - n, "w") for q in self.basis if q >= m
        )
        return SubproblemSolution(
            x_star=center + d,
            z_star=z,
            active_rows=active,
            multipliers=lam[active],
            box_active=box_active,
            boundary_hit=bool(np.any(box_active != INACTIVE)),
            aggregate=aggregate,
            # u_j > 0 forces x_j to the lower face, w_j > 0 to the upper face
            upper_multipliers=w,
            lower_multipliers=u,
            dual_value=dual_value,
            residuals=residuals,
            pivots=self.pivots,
            basis_rows=basis_rows,
            basis_box=basis_box,
        )


def vertex_oracle(rows: Sequence[PlaneRow], box: BoxRegion) -> tuple[np.ndarray, float]:
    """Reference optimum by enumerating every basic point of the LP.

    Only for tiny instances (``n <= 3``, at most 6 rows); used to validate
    :func:`solve_subproblem`.
    """
    n = box.center.shape[0]
    if n > 3 or len(rows) > 6:
        raise SizeExceeded(f"vertex enumeration limited to n<=3 and 6 rows (got n={n}, {len(rows)})")
    G, o = _stack_rows(rows, n)
    # constraints a . (x, z) >= b
    A = []
    b = []
    for g, off in zip(G, o):
        A.append(np.append(-g, 1.0))
        b.append(off)
    for j in range(n):
        e = np.zeros(n + 1)
        e[j] = 1.0
        A.append(e)
        b.append(box.center[j] - box.radius)
        A.append(-e)
        b.append(-(box.center[j] + box.radius))
    A = np.array(A)
    b = np.array(b)
    scale = 1.0 + np.max(np.abs(b)) + np.max(np.abs(A))
    best = None
    for combo in itertools.combinations(range(len(A)), n + 1):
        M = A[list(combo)]
        with np.errstate(all="ignore"):
            singular = not abs(np.linalg.det(M)) >= 1e-12
        if singular:
            continue
        v = np.linalg.solve(M, b[list(combo)])
        if np.all(A @ v >= b - 1e-9 * scale):
            if best is None or v[-1] < best[-1]:
                best = v
    if best is None:
        raise NumericalFailure("no basic feasible point found")
    return best[:n], float(best[-1])

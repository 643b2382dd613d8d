"""Bundle storage, cutting-plane rows and the convexification lower bound.

Elements keep the raw triple ``(y_i, f(y_i), s_i)``; LP rows for the
(possibly convexified) model around a center ``xbar`` with parameter ``a``

    h(x) = f(y_i) + a/2 ||y_i - xbar||^2 + <s_i + a (y_i - xbar), x - y_i>

are rebuilt on demand, so nothing depending on ``a`` is ever stored.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionMismatch, NumericalFailure
from .lp import PlaneRow, SubproblemSolution

MAX_BUNDLE_SIZE = 5000
COINCIDENT_TOL = 1e-14


@dataclass
class BundleElement:
    point: np.ndarray
    value: float
    subgrad: np.ndarray
    born: tuple[int, int] = (0, 0)
    inactive_count: int = 0
    is_center_plane: bool = False

    def __post_init__(self):
        self.point = np.asarray(self.point, dtype=float)
        self.subgrad = np.asarray(self.subgrad, dtype=float)
        if self.point.shape != self.subgrad.shape or self.point.ndim != 1:
            raise DimensionMismatch("point and subgradient must be vectors of equal length")
        if not np.isfinite(self.value):
            raise ValueError("bundle element value must be finite")
        self.value = float(self.value)


@dataclass(frozen=True)
class ModelReduction:
    lhs: float
    rhs: float
    aggregate: np.ndarray
    eps_tilde: float

    @property
    def residual(self) -> float:
        return abs(self.lhs - self.rhs)


def _check(center_x: np.ndarray, elem: BundleElement):
    if center_x.shape != elem.point.shape:
        raise DimensionMismatch(
            f"center has length {center_x.shape[0]}, element {elem.point.shape[0]}"
        )


def linearization_error_convex(center, elem: BundleElement) -> float:
    """``f(xbar) - [f(y_i) + <s_i, xbar - y_i>]`` for ``center = (xbar, f(xbar))``."""
    x, fx = center
    x = np.asarray(x, dtype=float)
    _check(x, elem)
    return float(fx - (elem.value + elem.subgrad @ (x - elem.point)))


def linearization_error_E(center, elem: BundleElement, a: float) -> float:
    """Linearization error of the convexified function ``f + a/2 ||. - xbar||^2`` at ``xbar``."""
    if a < 0:
        raise ValueError("convexification parameter must be nonnegative")
    x, fx = center
    x = np.asarray(x, dtype=float)
    _check(x, elem)
    diff = elem.point - x
    slope = elem.subgrad + a * diff
    return float(fx - (elem.value + 0.5 * a * (diff @ diff) + slope @ (x - elem.point)))


def _pair_bounds(Y, F, S, y, f, s) -> tuple[float, float]:
    """Largest lower bound on ``a`` from pairs between one point and a set.

    Returns the max over the set of the two ordered-pair values (new point as
    ``i`` and as ``j``); pairs of coincident points are skipped.
    """
    D = Y - y
    sq = np.einsum("ij,ij->i", D, D)
    keep = sq > COINCIDENT_TOL**2 * np.maximum(1.0, np.einsum("ij,ij->i", Y, Y))
    if not np.any(keep):
        return -np.inf
    D, sq = D[keep], sq[keep]
    # new point as j: error of its plane at the old points
    as_j = -(F[keep] - f - D @ s) / (0.5 * sq)
    # new point as i: error of the old planes at the new point
    as_i = -(f - F[keep] + np.einsum("ij,ij->i", S[keep], D)) / (0.5 * sq)
    return float(max(np.max(as_j), np.max(as_i)))


def compute_a_min(bundle: Sequence[BundleElement]) -> float:
    """``max(0, max_{i != j} -(f_i - f_j - <s_j, y_i - y_j>) / (||y_i - y_j||^2 / 2))``."""
    if len(bundle) == 0:
        raise ValueError("bundle is empty")
    Y = np.array([e.point for e in bundle])
    F = np.array([e.value for e in bundle])
    S = np.array([e.subgrad for e in bundle])
    best = 0.0
    for k in range(1, len(bundle)):
        best = max(best, _pair_bounds(Y[:k], F[:k], S[:k], Y[k], F[k], S[k]))
    return best


def build_rows(bundle: Sequence[BundleElement], center, a: float) -> list[PlaneRow]:
    """One LP row per element for the model of ``f + a/2 ||. - center||^2``."""
    if a < 0:
        raise ValueError("convexification parameter must be nonnegative")
    c = np.asarray(center, dtype=float)
    rows = []
    for elem in bundle:
        _check(c, elem)
        diff = elem.point - c
        g = elem.subgrad + a * diff
        offset = elem.value + 0.5 * a * (diff @ diff) - g @ elem.point
        rows.append(PlaneRow(g, offset))
    return rows


def row_arrays(bundle: Sequence[BundleElement], center: np.ndarray, f_center: float, a: float):
    """Slopes, linearization errors and row values at the center, vectorized.

    The value of row ``i`` at the center equals ``f(center) - E_i``; computing
    it that way avoids the cancellation of going through the offset at zero.
    """
    Y = np.array([e.point for e in bundle])
    F = np.array([e.value for e in bundle])
    S = np.array([e.subgrad for e in bundle])
    D = Y - center
    G = S + a * D
    E = f_center - (F + 0.5 * a * np.einsum("ij,ij->i", D, D) - np.einsum("ij,ij->i", G, D))
    return G, E, f_center - E


def model_reduction_identity(
    sol: SubproblemSolution, bundle: Sequence[BundleElement], center, a: float, delta: float
) -> ModelReduction:
    """Both sides of ``f(xbar) - z* = sum lam_i E_i + delta ||sum lam_i g_i||_1 [boundary]``."""
    x, fx = center
    x = np.asarray(x, dtype=float)
    lam = sol.multipliers
    idx = sol.active_rows
    E = np.array([linearization_error_E((x, fx), bundle[i], a) for i in idx])
    slopes = np.array([bundle[i].subgrad + a * (bundle[i].point - x) for i in idx]).reshape(
        len(idx), x.shape[0]
    )
    aggregate = lam @ slopes
    eps_tilde = float(lam @ E)
    rhs = eps_tilde
    if sol.boundary_hit:
        rhs += delta * float(np.sum(np.abs(aggregate)))
    return ModelReduction(float(fx - sol.z_star), rhs, aggregate, eps_tilde)


def _row_is_active(sol: SubproblemSolution, m: int, feas_tol: float) -> np.ndarray:
    lam = sol.multiplier_vector(m)
    tight = sol.residuals <= feas_tol * max(1.0, abs(sol.z_star))
    return (lam > 0.0) | tight


def prune_lpbc(
    bundle: list[BundleElement], sol: SubproblemSolution, T: int, serious: bool = False,
    feas_tol: float = 1e-9,
) -> list[BundleElement]:
    """Update inactivity counters after a solve and drop stale planes.

    A row counts as inactive when its multiplier is zero and its residual
    exceeds ``feas_tol``. Planes inactive for ``T`` consecutive solves are
    removed; after a null step (``serious=False``) the center plane is kept
    regardless.
    """
    if T < 20:
        raise ValueError("inactivity threshold T must be at least 20")
    active = _row_is_active(sol, len(bundle), feas_tol)
    kept = []
    for elem, act in zip(bundle, active):
        elem.inactive_count = 0 if act else elem.inactive_count + 1
        if elem.inactive_count < T or (elem.is_center_plane and not serious):
            kept.append(elem)
    return kept


def prune_lpbnc_serious(bundle: list[BundleElement], f_u: float) -> list[BundleElement]:
    """Drop every element whose value exceeds the level bound ``f_u``."""
    return [e for e in bundle if e.value <= f_u]


class Bundle:
    """Ordered bundle with an incrementally maintained ``a_min``."""

    def __init__(self, elements: Iterable[BundleElement] = (), capacity: int = MAX_BUNDLE_SIZE):
        self.capacity = capacity
        self.elements: list[BundleElement] = []
        self._a_min_raw = -np.inf
        for e in elements:
            self.add(e)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, i):
        return self.elements[i]

    @property
    def a_min(self) -> float:
        return max(self._a_min_raw, 0.0)

    def add(self, elem: BundleElement):
        if len(self.elements) >= self.capacity:
            raise NumericalFailure(f"bundle exceeded {self.capacity} elements")
        if self.elements:
            if elem.point.shape != self.elements[0].point.shape:
                raise DimensionMismatch("element dimension differs from the bundle")
            Y = np.array([e.point for e in self.elements])
            F = np.array([e.value for e in self.elements])
            S = np.array([e.subgrad for e in self.elements])
            self._a_min_raw = max(
                self._a_min_raw, _pair_bounds(Y, F, S, elem.point, elem.value, elem.subgrad)
            )
        self.elements.append(elem)

    def replace(self, elements: Sequence[BundleElement]):
        """Swap in a pruned element list; ``a_min`` is recomputed when anything was removed."""
        removed = len(elements) != len(self.elements)
        self.elements = list(elements)
        if removed:
            self._a_min_raw = compute_a_min(self.elements) if self.elements else -np.inf
        return removed


def dump_bundle(bundle: Iterable[BundleElement]) -> str:
    """Line-oriented text dump, one element per line:
    ``born_k born_l inactive_count center | f | y... | s...``"""
    out = io.StringIO()
    for e in bundle:
        y = " ".join(repr(float(v)) for v in e.point)
        s = " ".join(repr(float(v)) for v in e.subgrad)
        out.write(
            f"{e.born[0]} {e.born[1]} {e.inactive_count} {int(e.is_center_plane)} "
            f"| {e.value!r} | {y} | {s}\n"
        )
    return out.getvalue()


def load_bundle(text: str) -> list[BundleElement]:
    elems = []
    for line in text.splitlines():
        if not line.strip():
            continue
        head, f, y, s = (part.strip() for part in line.split("|"))
        k, l, cnt, ctr = (int(t) for t in head.split())
        elems.append(
            BundleElement(
                point=np.array([float(t) for t in y.split()]),
                value=float(f),
                subgrad=np.array([float(t) for t in s.split()]),
                born=(k, l),
                inactive_count=cnt,
                is_center_plane=bool(ctr),
            )
        )
    return elems

"""Benchmark corpus: nonsmooth test functions with exact subgradient oracles.

Small problems follow the Luksan-Vlcek collection of nonsmooth test problems;
the large chained and generalized ones follow Karmitsa's large-scale
collection. Each oracle returns the
value and one subgradient; for max-type functions the gradient of the first
(lowest index) attaining piece is returned, and ``sign(0) = 0`` is used for
absolute values, which always yields a valid element of the subdifferential.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import DimensionMismatch, NotSmoothHere, ProblemUnavailable, SizeExceeded

Oracle = Callable[[np.ndarray], "tuple[float, np.ndarray]"]


@dataclass(frozen=True)
class OracleResponse:
    value: float
    subgrad: np.ndarray
    domain_error: bool = False


@dataclass(eq=False)
class Problem:
    name: str
    dim: int
    x0: np.ndarray
    f_opt_ref: float
    convex: bool
    number: int
    oracle: Oracle | None = field(default=None, repr=False)
    margin: Callable[[np.ndarray], float] | None = field(default=None, repr=False)
    minimizer: np.ndarray | None = field(default=None, repr=False)
    unbounded: bool = False
    note: str = ""

    @property
    def available(self) -> bool:
        return self.oracle is not None

    @property
    def key(self) -> str:
        return f"{'c' if self.convex else 'n'}{self.number}"

    def __call__(self, x) -> float:
        return evaluate(self, x).value


def evaluate(problem: Problem, x) -> OracleResponse:
    """Value and one subgradient of ``problem`` at ``x``."""
    x = np.asarray(x, dtype=float)
    if x.shape != (problem.dim,):
        raise DimensionMismatch(f"{problem.name} expects dimension {problem.dim}, got {x.shape}")
    if problem.oracle is None:
        raise ProblemUnavailable(f"{problem.name}: {problem.note}")
    with np.errstate(over="ignore", invalid="ignore"):
        f, g = problem.oracle(x)
    g = np.asarray(g, dtype=float)
    if not (np.isfinite(f) and np.all(np.isfinite(g))):
        return OracleResponse(np.inf, np.zeros(problem.dim), domain_error=True)
    return OracleResponse(float(f), g)


# --------------------------------------------------------------------- helpers


def _pick(vals, grads):
    k = int(np.argmax(vals))
    return float(vals[k]), np.asarray(grads[k], dtype=float)


def _gap(vals) -> float:
    v = np.sort(np.asarray(vals, dtype=float))[::-1]
    return float(v[0] - v[1]) if v.size > 1 else np.inf


def _termwise_gap(P) -> float:
    """Smallest top-minus-runner-up gap over the columns of a pieces-by-terms array."""
    S = np.sort(P, axis=0)
    return float(np.min(S[-1] - S[-2]))


# ------------------------------------------------------------ convex problems


def _cb2_pieces(x):
    x1, x2 = x
    p3 = 2.0 * np.exp(-x1 + x2)
    vals = np.array([x1**2 + x2**4, (2 - x1) ** 2 + (2 - x2) ** 2, p3])
    grads = [
        (2 * x1, 4 * x2**3),
        (-2 * (2 - x1), -2 * (2 - x2)),
        (-p3, p3),
    ]
    return vals, grads


def _cb3_pieces(x):
    x1, x2 = x
    p3 = 2.0 * np.exp(-x1 + x2)
    vals = np.array([x1**4 + x2**2, (2 - x1) ** 2 + (2 - x2) ** 2, p3])
    grads = [
        (4 * x1**3, 2 * x2),
        (-2 * (2 - x1), -2 * (2 - x2)),
        (-p3, p3),
    ]
    return vals, grads


def _dem_pieces(x):
    x1, x2 = x
    vals = np.array([5 * x1 + x2, -5 * x1 + x2, x1**2 + x2**2 + 4 * x2])
    grads = [(5.0, 1.0), (-5.0, 1.0), (2 * x1, 2 * x2 + 4)]
    return vals, grads


def _ql_pieces(x):
    x1, x2 = x
    q = x1**2 + x2**2
    vals = np.array([q, q + 10 * (-4 * x1 - x2 + 4), q + 10 * (-x1 - 2 * x2 + 6)])
    grads = [(2 * x1, 2 * x2), (2 * x1 - 40, 2 * x2 - 10), (2 * x1 - 10, 2 * x2 - 20)]
    return vals, grads


def _lq_pieces(x):
    x1, x2 = x
    vals = np.array([-x1 - x2, -x1 - x2 + (x1**2 + x2**2 - 1)])
    grads = [(-1.0, -1.0), (-1 + 2 * x1, -1 + 2 * x2)]
    return vals, grads


def _mifflin1(x):
    x1, x2 = x
    q = x1**2 + x2**2 - 1
    g = np.array([-1.0, 0.0])
    if q > 0:
        g += 20 * np.array([2 * x1, 2 * x2])
    return -x1 + 20 * max(q, 0.0), g


def _wolfe(x):
    x1, x2 = x
    if x1 >= abs(x2):
        r = np.sqrt(9 * x1**2 + 16 * x2**2)
        if r == 0.0:
            return 0.0, np.array([15.0, 0.0])
        return 5 * r, 5 * np.array([9 * x1, 16 * x2]) / r
    if x1 > 0:
        return 9 * x1 + 16 * abs(x2), np.array([9.0, 16 * np.sign(x2)])
    return 9 * x1 + 16 * abs(x2) - x1**9, np.array([9 - 9 * x1**8, 16 * np.sign(x2)])


def _wolfe_margin(x):
    x1, x2 = x
    m = min(abs(x1 - abs(x2)), abs(x1))
    if x1 <= 0:
        m = min(m, abs(x2))
    return 16 * m


def _rosen_pieces(x):
    x1, x2, x3, x4 = x
    f1 = x1**2 + x2**2 + 2 * x3**2 + x4**2 - 5 * x1 - 5 * x2 - 21 * x3 + 7 * x4
    f2 = x1**2 + x2**2 + x3**2 + x4**2 + x1 - x2 + x3 - x4 - 8
    f3 = x1**2 + 2 * x2**2 + x3**2 + 2 * x4**2 - x1 - x4 - 10
    f4 = x1**2 + x2**2 + x3**2 + 2 * x1 - x2 - x4 - 5
    g1 = np.array([2 * x1 - 5, 2 * x2 - 5, 4 * x3 - 21, 2 * x4 + 7])
    g2 = np.array([2 * x1 + 1, 2 * x2 - 1, 2 * x3 + 1, 2 * x4 - 1])
    g3 = np.array([2 * x1 - 1, 4 * x2, 2 * x3, 4 * x4 - 1])
    g4 = np.array([2 * x1 + 2, 2 * x2 - 1, 2 * x3, -1.0])
    vals = np.array([f1, f1 + 10 * f2, f1 + 10 * f3, f1 + 10 * f4])
    grads = [g1, g1 + 10 * g2, g1 + 10 * g3, g1 + 10 * g4]
    return vals, grads


_SHOR_A = np.array(
    [
        [0, 0, 0, 0, 0],
        [2, 1, 1, 1, 3],
        [1, 2, 1, 1, 2],
        [1, 4, 1, 2, 2],
        [3, 2, 1, 0, 1],
        [0, 2, 1, 0, 1],
        [1, 1, 1, 1, 1],
        [1, 0, 1, 2, 1],
        [0, 0, 2, 1, 0],
        [1, 1, 2, 0, 0],
    ],
    dtype=float,
)
_SHOR_B = np.array([1, 5, 10, 2, 4, 3, 1.7, 2.5, 6, 3.5])


def _shor_pieces(x):
    D = x - _SHOR_A
    vals = _SHOR_B * np.einsum("ij,ij->i", D, D)
    return vals, 2 * _SHOR_B[:, None] * D


@lru_cache(maxsize=None)
def _maxquad_data():
    n = 10
    A = np.zeros((5, n, n))
    b = np.zeros((5, n))
    for k in range(1, 6):
        for i in range(1, n + 1):
            for j in range(i + 1, n + 1):
                A[k - 1, i - 1, j - 1] = A[k - 1, j - 1, i - 1] = (
                    np.exp(i / j) * np.cos(i * j) * np.sin(k)
                )
        for i in range(1, n + 1):
            A[k - 1, i - 1, i - 1] = i / 10 * abs(np.sin(k)) + np.sum(np.abs(A[k - 1, i - 1]))
            b[k - 1, i - 1] = np.exp(i / k) * np.sin(i * k)
    return A, b


def _maxquad_pieces(x):
    A, b = _maxquad_data()
    Ax = A @ x
    vals = Ax @ x - b @ x
    return vals, 2 * Ax - b


def _maxq(x):
    k = int(np.argmax(x**2))
    g = np.zeros_like(x)
    g[k] = 2 * x[k]
    return float(x[k] ** 2), g


def _maxl(x):
    k = int(np.argmax(np.abs(x)))
    g = np.zeros_like(x)
    g[k] = np.sign(x[k])
    return float(abs(x[k])), g


def _goffin(x):
    k = int(np.argmax(x))
    g = -np.ones_like(x)
    g[k] += x.size
    return float(x.size * x[k] - np.sum(x)), g


@lru_cache(maxsize=None)
def _hilbert(n):
    i = np.arange(1, n + 1)
    return 1.0 / (i[:, None] + i[None, :] - 1)


def _mxhilb(x):
    H = _hilbert(x.size)
    v = H @ x
    k = int(np.argmax(np.abs(v)))
    return float(abs(v[k])), np.sign(v[k]) * H[k]


def _l1hilb(x):
    H = _hilbert(x.size)
    v = H @ x
    return float(np.sum(np.abs(v))), H.T @ np.sign(v)


def _chained_lq(x):
    a, b = x[:-1], x[1:]
    p1 = -a - b
    p2 = p1 + a**2 + b**2 - 1
    use2 = p2 > p1
    g = np.zeros_like(x)
    np.add.at(g, np.arange(x.size - 1), np.where(use2, -1 + 2 * a, -1.0))
    np.add.at(g, np.arange(1, x.size), np.where(use2, -1 + 2 * b, -1.0))
    return float(np.sum(np.where(use2, p2, p1))), g


def _chained_lq_margin(x):
    a, b = x[:-1], x[1:]
    return float(np.min(np.abs(a**2 + b**2 - 1)))


def _cb3_terms(x):
    a, b = x[:-1], x[1:]
    p3 = 2.0 * np.exp(-a + b)
    P = np.array([a**4 + b**2, (2 - a) ** 2 + (2 - b) ** 2, p3])
    Ga = np.array([4 * a**3, -2 * (2 - a), -p3])
    Gb = np.array([2 * b, -2 * (2 - b), p3])
    return P, Ga, Gb


def _chained_cb3_1(x):
    P, Ga, Gb = _cb3_terms(x)
    k = np.argmax(P, axis=0)
    cols = np.arange(P.shape[1])
    g = np.zeros_like(x)
    g[:-1] += Ga[k, cols]
    g[1:] += Gb[k, cols]
    return float(np.sum(P[k, cols])), g


def _chained_cb3_2(x):
    P, Ga, Gb = _cb3_terms(x)
    sums = P.sum(axis=1)
    k = int(np.argmax(sums))
    g = np.zeros_like(x)
    g[:-1] += Ga[k]
    g[1:] += Gb[k]
    return float(sums[k]), g


# --------------------------------------------------------- nonconvex problems


def _crescent_pieces(x):
    x1, x2 = x
    vals = np.array([x1**2 + (x2 - 1) ** 2 + x2 - 1, -(x1**2) - (x2 - 1) ** 2 + x2 + 1])
    grads = [(2 * x1, 2 * (x2 - 1) + 1), (-2 * x1, -2 * (x2 - 1) + 1)]
    return vals, grads


def _mifflin2(x):
    x1, x2 = x
    q = x1**2 + x2**2 - 1
    g = np.array([-1.0, 0.0]) + (2 + 1.75 * np.sign(q)) * np.array([2 * x1, 2 * x2])
    return -x1 + 2 * q + 1.75 * abs(q), g


_COLVILLE_E = np.array([-15.0, -27, -36, -18, -12])
_COLVILLE_C = np.array(
    [
        [30.0, -20, -10, 32, -10],
        [-20, 39, -6, -31, 32],
        [-10, -6, 10, -6, -10],
        [32, -31, -6, 39, -20],
        [-10, 32, -10, -20, 30],
    ]
)
_COLVILLE_D = np.array([4.0, 8, 10, 6, 2])
_COLVILLE_A = np.array(
    [
        [-16.0, 2, 0, 1, 0],
        [0, -2, 0, 0.4, 2],
        [-3.5, 0, 2, 0, 0],
        [0, -2, 0, -4, -1],
        [0, -9, -2, 1, -2.8],
        [2, 0, -4, 0, 0],
        [-1, -1, -1, -1, -1],
        [-1, -2, -3, -2, -1],
        [1, 2, 3, 4, 5],
        [1, 1, 1, 1, 1],
    ]
)
_COLVILLE_B = np.array([-40.0, -2, -0.25, -4, -4, -1, -40, -60, 5, 1])


def _colville1_penalty_terms(x):
    # 0, then the linear constraint violations b - A x, then -x
    return np.concatenate([[0.0], _COLVILLE_B - _COLVILLE_A @ x, -x])


def _colville1(x):
    C = _COLVILLE_C
    terms = _colville1_penalty_terms(x)
    i = int(np.argmax(terms))
    f = _COLVILLE_E @ x + x @ C @ x + _COLVILLE_D @ x**3 + 50 * terms[i]
    g = _COLVILLE_E + (C + C.T) @ x + 3 * _COLVILLE_D * x**2
    m = len(_COLVILLE_B)
    if 1 <= i <= m:
        g = g - 50 * _COLVILLE_A[i - 1]
    elif i > m:
        g[i - m - 1] -= 50
    return float(f), g


def _colville1_margin(x):
    top = np.sort(_colville1_penalty_terms(x))[-2:]
    return 50 * float(top[1] - top[0])


def _hs78_constraints(x):
    x1, x2, x3, x4, x5 = x
    c = np.array([x @ x - 10, x2 * x3 - 5 * x4 * x5, x1**3 + x2**3 + 1])
    J = np.array(
        [
            2 * x,
            [0, x3, x2, -5 * x5, -5 * x4],
            [3 * x1**2, 3 * x2**2, 0, 0, 0],
        ]
    )
    return c, J


def _hs78(x):
    prod = np.prod(x)
    gp = np.array([np.prod(np.delete(x, j)) for j in range(5)])
    c, J = _hs78_constraints(x)
    return float(prod + 10 * np.sum(np.abs(c))), gp + 10 * np.sign(c) @ J


def _hs78_margin(x):
    return 10 * float(np.min(np.abs(_hs78_constraints(x)[0])))


_EA_T = np.arange(51) / 10.0
_EA_Y = (
    0.5 * np.exp(-_EA_T)
    - np.exp(-2 * _EA_T)
    + 0.5 * np.exp(-3 * _EA_T)
    + 1.5 * np.exp(-1.5 * _EA_T) * np.sin(7 * _EA_T)
    + np.exp(-2.5 * _EA_T) * np.sin(5 * _EA_T)
)


def _el_attar_residuals(x):
    t = _EA_T
    e2 = np.exp(-x[1] * t)
    e6 = np.exp(-x[5] * t)
    arg = x[2] * t + x[3]
    cs, sn = np.cos(arg), np.sin(arg)
    r = x[0] * e2 * cs + x[4] * e6 - _EA_Y
    J = np.column_stack(
        [e2 * cs, -t * x[0] * e2 * cs, -t * x[0] * e2 * sn, -x[0] * e2 * sn, e6, -t * x[4] * e6]
    )
    return r, J


def _el_attar(x):
    r, J = _el_attar_residuals(x)
    return float(np.sum(np.abs(r))), np.sign(r) @ J


def _el_attar_margin(x):
    return float(np.min(np.abs(_el_attar_residuals(x)[0])))


_GILL_T = np.arange(1, 30) / 29.0
_GILL_J = np.arange(1, 11)


def _gill_pieces(x):
    t = _GILL_T
    j = _GILL_J
    s = x @ x - 0.25
    f1 = np.sum((x - 1) ** 2) + 1e-3 * s**2
    g1 = 2 * (x - 1) + 4e-3 * s * x

    pw = t[:, None] ** (j[None, :] - 1)  # t^(j-1), shape (29, 10)
    ds1 = np.zeros_like(pw)
    ds1[:, 1:] = (j[1:] - 1) * t[:, None] ** (j[1:] - 2)
    s1 = ds1 @ x
    s2 = pw @ x
    res = s1 - s2**2 - 1
    q = x[1] - x[0] ** 2 - 1
    f2 = np.sum(res**2) + x[0] ** 2 + q**2
    g2 = 2 * res @ (ds1 - 2 * s2[:, None] * pw)
    g2[0] += 2 * x[0] - 4 * x[0] * q
    g2[1] += 2 * q

    d = x[1:] - x[:-1] ** 2
    f3 = np.sum(100 * d**2 + (1 - x[1:]) ** 2)
    g3 = np.zeros_like(x)
    g3[1:] += 200 * d - 2 * (1 - x[1:])
    g3[:-1] += -400 * x[:-1] * d
    return np.array([f1, f2, f3]), [g1, g2, g3]


def _active_faces(x):
    s = np.sum(x)
    vals = np.concatenate([[np.log(abs(s) + 1)], np.log(np.abs(x) + 1)])
    k = int(np.argmax(vals))
    g = np.zeros_like(x)
    if k == 0:
        g[:] = np.sign(s) / (abs(s) + 1)
    else:
        g[k - 1] = np.sign(x[k - 1]) / (abs(x[k - 1]) + 1)
    return float(vals[k]), g


def _active_faces_margin(x):
    s = np.sum(x)
    vals = np.concatenate([[np.log(abs(s) + 1)], np.log(np.abs(x) + 1)])
    k = int(np.argmax(vals))
    arg = abs(s) if k == 0 else abs(x[k - 1])
    return min(_gap(vals), arg)


def _xlogx_pow(base, expo):
    """``base**expo * log(base)`` with the limit value 0 at ``base == 0``."""
    out = np.zeros_like(base)
    pos = base > 0
    out[pos] = base[pos] ** expo[pos] * np.log(base[pos])
    return out


def _brown2(x):
    a, b = np.abs(x[:-1]), np.abs(x[1:])
    p = x[1:] ** 2 + 1
    q = x[:-1] ** 2 + 1
    f = np.sum(a**p + b**q)
    g = np.zeros_like(x)
    g[:-1] += p * a ** (p - 1) * np.sign(x[:-1]) + _xlogx_pow(b, q) * 2 * x[:-1]
    g[1:] += _xlogx_pow(a, p) * 2 * x[1:] + q * b ** (q - 1) * np.sign(x[1:])
    return float(f), g


def _chained_mifflin2(x):
    a, b = x[:-1], x[1:]
    q = a**2 + b**2 - 1
    f = np.sum(-a + 2 * q + 1.75 * np.abs(q))
    w = 2 + 1.75 * np.sign(q)
    g = np.zeros_like(x)
    g[:-1] += -1 + w * 2 * a
    g[1:] += w * 2 * b
    return float(f), g


def _chained_mifflin2_margin(x):
    return float(np.min(np.abs(x[:-1] ** 2 + x[1:] ** 2 - 1)))


def _crescent_terms(x):
    a, b = x[:-1], x[1:]
    P = np.array([a**2 + (b - 1) ** 2 + b - 1, -(a**2) - (b - 1) ** 2 + b + 1])
    Ga = np.array([2 * a, -2 * a])
    Gb = np.array([2 * (b - 1) + 1, -2 * (b - 1) + 1])
    return P, Ga, Gb


def _chained_crescent_1(x):
    P, Ga, Gb = _crescent_terms(x)
    sums = P.sum(axis=1)
    k = int(np.argmax(sums))
    g = np.zeros_like(x)
    g[:-1] += Ga[k]
    g[1:] += Gb[k]
    return float(sums[k]), g


def _chained_crescent_2(x):
    P, Ga, Gb = _crescent_terms(x)
    k = np.argmax(P, axis=0)
    cols = np.arange(P.shape[1])
    g = np.zeros_like(x)
    g[:-1] += Ga[k, cols]
    g[1:] += Gb[k, cols]
    return float(np.sum(P[k, cols])), g


# ------------------------------------------------------------------ registry


def _from_pieces(pieces):
    def oracle(x):
        vals, grads = pieces(x)
        return _pick(vals, grads)

    def margin(x):
        return _gap(pieces(x)[0])

    return oracle, margin


def _alternating(n, odd, even):
    x = np.full(n, float(even))
    x[0::2] = odd
    return x


def _maxq_start(n):
    i = np.arange(1, n + 1, dtype=float)
    return np.where(i <= n // 2, i, -i)


def _abs_margin(fun):
    return lambda x: float(np.min(np.abs(fun(x))))


def _build_registry() -> list[Problem]:
    probs: list[Problem] = []

    def add(name, dim, x0, fopt, convex, number, oracle, margin=None, minimizer=None, **kw):
        probs.append(
            Problem(
                name=name,
                dim=dim,
                x0=np.asarray(x0, dtype=float),
                f_opt_ref=float(fopt),
                convex=convex,
                number=number,
                oracle=oracle,
                margin=margin,
                minimizer=None if minimizer is None else np.asarray(minimizer, dtype=float),
                **kw,
            )
        )

    s2 = 1 / np.sqrt(2)
    # convex problems
    add("CB2", 2, [1.0, -0.1], 1.9522245, True, 1, *_from_pieces(_cb2_pieces))
    add("CB3", 2, [2.0, 2.0], 2.0, True, 2, *_from_pieces(_cb3_pieces), minimizer=[1, 1])
    add("DEM", 2, [1.0, 1.0], -3.0, True, 3, *_from_pieces(_dem_pieces), minimizer=[0, -3])
    add("QL", 2, [-1.0, 5.0], 7.2, True, 4, *_from_pieces(_ql_pieces), minimizer=[1.2, 2.4])
    add("LQ", 2, [-0.5, -0.5], -1.4142136, True, 5, *_from_pieces(_lq_pieces), minimizer=[s2, s2])
    add("Mifflin1", 2, [0.8, 0.6], -1.0, True, 6, _mifflin1,
        _abs_margin(lambda x: [20 * (x @ x - 1)]), minimizer=[1, 0])
    add("Wolfe", 2, [3.0, 2.0], -8.0, True, 7, _wolfe, _wolfe_margin, minimizer=[-1, 0])
    add("Rosen", 4, np.zeros(4), -44.0, True, 8, *_from_pieces(_rosen_pieces),
        minimizer=[0, 1, 2, -1])
    add("Shor", 5, [0, 0, 0, 0, 1.0], 22.600162, True, 9, *_from_pieces(_shor_pieces))
    add("Maxquad", 10, np.ones(10), -0.8414083, True, 10, *_from_pieces(_maxquad_pieces))
    add("Maxq", 20, _maxq_start(20), 0.0, True, 11, _maxq,
        lambda x: _gap(x**2), minimizer=np.zeros(20))
    add("Maxl", 20, _maxq_start(20), 0.0, True, 12, _maxl,
        lambda x: min(_gap(np.abs(x)), float(np.max(np.abs(x)))), minimizer=np.zeros(20))
    add("Goffin", 50, np.arange(1, 51) - 25.5, 0.0, True, 13, _goffin,
        lambda x: 50 * _gap(x), minimizer=np.zeros(50))
    add("MXHILB", 50, np.ones(50), 0.0, True, 14, _mxhilb,
        lambda x: min(_gap(np.abs(_hilbert(50) @ x)), float(np.max(np.abs(_hilbert(50) @ x)))),
        minimizer=np.zeros(50))
    add("L1HILB", 50, np.ones(50), 0.0, True, 15, _l1hilb,
        _abs_margin(lambda x: _hilbert(50) @ x), minimizer=np.zeros(50))
    add("Generalization of MAXQ", 100, _maxq_start(100), 0.0, True, 16, _maxq,
        lambda x: _gap(x**2), minimizer=np.zeros(100))
    add("Generalization of MXHILB", 100, np.ones(100), 0.0, True, 17, _mxhilb,
        lambda x: min(_gap(np.abs(_hilbert(100) @ x)),
                      float(np.max(np.abs(_hilbert(100) @ x)))),
        minimizer=np.zeros(100))
    add("Chained LQ", 100, np.full(100, -0.5), -99 * np.sqrt(2), True, 18, _chained_lq,
        _chained_lq_margin, minimizer=np.full(100, s2))
    add("Chained CB3 I", 100, np.full(100, 2.0), 198.0, True, 19, _chained_cb3_1,
        lambda x: _termwise_gap(_cb3_terms(x)[0]), minimizer=np.ones(100))
    add("Chained CB3 II", 100, np.full(100, 2.0), 198.0, True, 20, _chained_cb3_2,
        lambda x: _gap(_cb3_terms(x)[0].sum(axis=1)), minimizer=np.ones(100))

    # nonconvex problems
    add("Crescent", 2, [-1.5, 2.0], 0.0, False, 1, *_from_pieces(_crescent_pieces),
        minimizer=[0, 0])
    add("Mifflin2", 2, [-1.0, -1.0], -1.0, False, 2, _mifflin2,
        _abs_margin(lambda x: [x @ x - 1]), minimizer=[1, 0])
    add("Colville 1", 5, [0, 0, 0, 0, 1.0], -32.348679, False, 3, _colville1,
        _colville1_margin)
    add("HS78", 5, [-2, 1.5, 2, -1, -1.0], -2.9197004, False, 4, _hs78, _hs78_margin,
        unbounded=True)
    add("El-Attar", 6, [2, 2, 7, 0, -2, 1.0], 0.5598131, False, 5, _el_attar, _el_attar_margin)
    add("Gill", 10, np.full(10, -0.1), 9.7857721, False, 6, *_from_pieces(_gill_pieces))
    add("Steiner 2", 12, np.zeros(12), 16.703838, False, 7, None,
        note="network data of this test function is not available to this build")
    add("Active Faces", 50, np.ones(50), 0.0, False, 8, _active_faces, _active_faces_margin,
        minimizer=np.zeros(50))
    add("Brown 2", 50, _alternating(50, -1.0, 1.0), 0.0, False, 9, _brown2,
        _abs_margin(lambda x: x), minimizer=np.zeros(50))
    add("Chained Mifflin2", 50, np.full(50, -1.0), -34.795, False, 10, _chained_mifflin2,
        _chained_mifflin2_margin)
    add("Chained Crescent I", 50, _alternating(50, -1.5, 2.0), 0.0, False, 11,
        _chained_crescent_1, lambda x: _gap(_crescent_terms(x)[0].sum(axis=1)),
        minimizer=np.zeros(50))
    add("Chained Crescent II", 50, _alternating(50, -1.5, 2.0), 0.0, False, 12,
        _chained_crescent_2, lambda x: _termwise_gap(_crescent_terms(x)[0]),
        minimizer=np.zeros(50))
    return probs


_REGISTRY = _build_registry()


def registry() -> list[Problem]:
    """All 32 benchmark problems: 20 convex followed by 12 nonconvex."""
    return list(_REGISTRY)


def lookup(name_or_key: str) -> Problem:
    """Find a problem by name (case-insensitive) or key such as ``c12`` / ``n3``."""
    key = name_or_key.strip().lower()
    for p in _REGISTRY:
        if p.name.lower() == key or p.key == key:
            return p
    raise KeyError(f"unknown problem {name_or_key!r}")


def select(selector: str) -> list[Problem]:
    """Resolve a selector such as ``all``, ``convex``, ``nonconvex``, ``c1-14``,
    ``n1,n2`` or a comma-separated list of names/keys."""
    out: list[Problem] = []
    for token in (t.strip() for t in selector.split(",")):
        if not token:
            continue
        low = token.lower()
        if low == "all":
            out.extend(_REGISTRY)
        elif low == "convex":
            out.extend(p for p in _REGISTRY if p.convex)
        elif low == "nonconvex":
            out.extend(p for p in _REGISTRY if not p.convex)
        elif low[0] in "cn" and "-" in low and low[1:].replace("-", "").isdigit():
            lo, hi = (int(v) for v in low[1:].split("-"))
            out.extend(lookup(f"{low[0]}{i}") for i in range(lo, hi + 1))
        else:
            out.append(lookup(token))
    return out


# ----------------------------------------------------------- reference tools


def fd_subgrad_check(problem: Problem, x, h: float = 1e-6) -> float:
    """Max abs difference between the oracle subgradient and central differences.

    Raises :class:`NotSmoothHere` when ``x`` is too close to a kink for the
    difference quotient to see a single smooth piece.
    """
    x = np.asarray(x, dtype=float)
    resp = evaluate(problem, x)
    if problem.margin is not None:
        scale = 10 * h * max(1.0, float(np.max(np.abs(x)))) * max(1.0, float(np.max(np.abs(resp.subgrad))))
        if not problem.margin(x) > scale:
            raise NotSmoothHere(f"{problem.name}: kink margin below {scale:.2e}")
    fd = np.empty(problem.dim)
    for j in range(problem.dim):
        e = np.zeros(problem.dim)
        e[j] = h
        fd[j] = (evaluate(problem, x + e).value - evaluate(problem, x - e).value) / (2 * h)
    return float(np.max(np.abs(fd - resp.subgrad)))


def brute_force_prox(f, x, a: float, grid_radius: float, grid_step: float):
    """Grid approximation of the proximal point and Moreau envelope.

    Minimizes ``f(w) + a/2 ||w - x||^2`` over a square grid of half-width
    ``grid_radius`` centered at ``x``. ``f`` is a :class:`Problem` or a scalar
    callable; only ``dim <= 2`` is supported. Returns ``(p, e)``.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.size > 2:
        raise SizeExceeded("brute-force prox is limited to dimension 2")
    fun = f if not isinstance(f, Problem) else (lambda w: evaluate(f, w).value)
    k = int(round(grid_radius / grid_step))
    offs = np.arange(-k, k + 1) * grid_step
    if x.size == 1:
        W = (x[0] + offs)[:, None]
    else:
        A, B = np.meshgrid(x[0] + offs, x[1] + offs, indexing="ij")
        W = np.column_stack([A.ravel(), B.ravel()])
    vals = np.array([fun(w) for w in W]) + 0.5 * a * np.sum((W - x) ** 2, axis=1)
    i = int(np.argmin(vals))
    return W[i].copy(), float(vals[i])

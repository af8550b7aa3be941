"""Floating-point hints for large cone problems, checked exactly.

HiGHS (through scipy) proposes a support set or a separating direction.
Nothing it returns is trusted: a support is accepted only after an exact
rational solve on those columns, and a direction only after it is made
exact (tight constraints are enforced in a rational nullspace) and every
sign condition is re-checked in rationals.  Any failure returns None and
the caller falls back to the exact simplex.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import linprog

from . import linalg as la
from .rational import ZERO, q

# below this many generators the exact simplex is fast enough on its own
MIN_GENERATORS = 40
_TOL = 1e-9


def _rat(x: float, den: int = 10**6):
    return q(Fraction(float(x)).limit_denominator(den))


def _array(rows) -> np.ndarray:
    return np.array([[float(x) for x in r] for r in rows], dtype=float)


def feasible_support(gens: Sequence[Sequence], v) -> Optional[list]:
    """Indices of a float solution of sum w_i g_i = v, w >= 0 (None if infeasible)."""
    G = _array(gens).T
    b = np.array([float(x) for x in v])
    res = linprog(np.zeros(G.shape[1]), A_eq=G, b_eq=b, bounds=(0, None), method="highs")
    if res.status != 0:
        return None
    return [i for i, w in enumerate(res.x) if w > _TOL]


def exact_direction(gens: Sequence[Sequence], tight: Sequence[int], y_float):
    """Rational y orthogonal to gens[tight] close to y_float, or None.

    The returned y satisfies y.g_i = 0 on ``tight`` exactly; callers still
    check the remaining sign conditions.
    """
    dim = len(gens[0])
    rows = [list(gens[i]) for i in tight]
    N = la.nullspace(rows, dim) if rows else [la.unit_vector(dim, k) for k in range(dim)]
    if not N:
        return None
    Nf = _array(N)
    z, *_ = np.linalg.lstsq(Nf.T, np.asarray(y_float, dtype=float), rcond=None)
    scale = max(1.0, float(np.max(np.abs(z))))
    zq = [_rat(x / scale) for x in z]
    y = [ZERO] * dim
    for c, n in zip(zq, N):
        if c:
            for k in range(dim):
                if n[k]:
                    y[k] += c * n[k]
    return tuple(y)


def separating_direction(gens: Sequence[Sequence], v) -> Optional[tuple]:
    """Exact y with y.g >= 0 for every generator and y.v < 0, or None."""
    G = _array(gens)
    b = np.array([float(x) for x in v])
    dim = G.shape[1]
    # find y with G y >= 0, v.y = -1, |y| <= 1e4
    res = linprog(
        np.zeros(dim),
        A_ub=-G,
        b_ub=np.zeros(G.shape[0]),
        A_eq=b.reshape(1, -1),
        b_eq=np.array([-1.0]),
        bounds=(-1e4, 1e4),
        method="highs",
    )
    if res.status != 0:
        return None
    vals = G @ res.x
    tight = [i for i, t in enumerate(vals) if t < 1e-7]
    y = exact_direction(gens, tight, res.x)
    if y is None:
        return None
    if la.dot(y, v) >= 0:
        return None
    if any(la.dot(y, g) < 0 for g in gens):
        return None
    return y


def exclusion_direction(gens: Sequence[Sequence], inside: Sequence[int]) -> Optional[tuple]:
    """Exact y >= 0 on all generators, = 0 on ``inside``, > 0 elsewhere."""
    inside = sorted(set(inside))
    outside = [i for i in range(len(gens)) if i not in set(inside)]
    dim = len(gens[0])
    rows = [list(gens[i]) for i in inside]
    N = la.nullspace(rows, dim) if rows else [la.unit_vector(dim, k) for k in range(dim)]
    if not outside:
        return (ZERO,) * dim
    if not N:
        return None
    # y = N^T z with (g_j . N^T z) >= 1 for j outside
    Nf = _array(N)
    Go = _array([gens[j] for j in outside]) @ Nf.T
    res = linprog(
        np.zeros(len(N)),
        A_ub=-Go,
        b_ub=-np.ones(len(outside)),
        bounds=(-1e6, 1e6),
        method="highs",
    )
    if res.status != 0:
        return None
    scale = max(1.0, float(np.max(np.abs(res.x))))
    zq = [_rat(x / scale, 10**9) for x in res.x]
    y = [ZERO] * dim
    for c, n in zip(zq, N):
        if c:
            for k in range(dim):
                if n[k]:
                    y[k] += c * n[k]
    y = tuple(y)
    if any(la.dot(y, gens[j]) <= 0 for j in outside):
        return None
    return y


def aggregate_support(gens: Sequence[Sequence], x) -> Optional[list]:
    """Float solution of the aggregate face LP: indices with positive weight."""
    G = _array(gens).T
    n = G.shape[1]
    b = np.array([float(t) for t in x])
    # variables c (n), t (n), lam; maximise sum t
    A_eq = np.hstack([G, np.zeros((G.shape[0], n)), -b.reshape(-1, 1)])
    A_ub = np.vstack([np.hstack([-np.eye(n), np.eye(n), np.zeros((n, 1))])])
    cost = np.concatenate([np.zeros(n), -np.ones(n), [0.0]])
    bounds = [(0, None)] * n + [(0, 1)] * n + [(0, None)]
    res = linprog(
        cost, A_ub=A_ub, b_ub=np.zeros(n), A_eq=A_eq, b_eq=np.zeros(G.shape[0]),
        bounds=bounds, method="highs",
    )
    if res.status != 0:
        return None
    return [i for i in range(n) if res.x[n + i] > 1e-7]

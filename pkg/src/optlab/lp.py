"""Exact two-phase simplex: Dantzig pricing, falling back to Bland's rule on long degenerate runs.

Constraints are ``a . x  (<=|>=|==)  b`` over rationals.  Variables are
nonnegative unless marked free.  An infeasible system comes back with a
Farkas certificate ``lam`` (one multiplier per constraint) such that

* ``lam_k >= 0`` for ``>=`` rows, ``lam_k <= 0`` for ``<=`` rows,
* ``sum_k lam_k a_kj <= 0`` for nonnegative ``x_j`` and ``== 0`` for free ones,
* ``sum_k lam_k b_k > 0``,

which no feasible ``x`` can satisfy.  ``verify_farkas`` replays it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence

from .linalg import DimensionError
from .rational import ONE, ZERO, q

SENSES = ("<=", ">=", "==")


@dataclass(frozen=True)
class Constraint:
    coeffs: tuple
    sense: str
    rhs: object

    def __post_init__(self):
        if self.sense not in SENSES:
            raise ValueError(f"unknown constraint sense {self.sense!r}")
        object.__setattr__(self, "coeffs", tuple(q(c) for c in self.coeffs))
        object.__setattr__(self, "rhs", q(self.rhs))

    def holds(self, x) -> bool:
        lhs = sum((a * v for a, v in zip(self.coeffs, x) if a), ZERO)
        if self.sense == "<=":
            return lhs <= self.rhs
        if self.sense == ">=":
            return lhs >= self.rhs
        return lhs == self.rhs


def le(coeffs, rhs) -> Constraint:
    return Constraint(tuple(coeffs), "<=", rhs)


def ge(coeffs, rhs) -> Constraint:
    return Constraint(tuple(coeffs), ">=", rhs)


def eq(coeffs, rhs) -> Constraint:
    return Constraint(tuple(coeffs), "==", rhs)


@dataclass
class LPResult:
    status: str  # "optimal", "infeasible", "unbounded"
    x: Optional[tuple] = None
    value: object = None
    farkas: Optional[tuple] = None

    @property
    def feasible(self) -> bool:
        return self.status != "infeasible"


DEGENERATE_LIMIT = 50


class _Tableau:
    """Dense tableau ``rows[i] = B^-1 [M | b]`` with the basis list."""

    def __init__(self, rows, basis, ncols):
        self.rows = rows
        self.basis = basis
        self.ncols = ncols  # excluding rhs column

    def pivot(self, r, c, objective_rows):
        prow = self.rows[r]
        inv = ONE / prow[c]
        if inv != 1:
            for j in range(len(prow)):
                if prow[j]:
                    prow[j] *= inv
        nz = [j for j, v in enumerate(prow) if v]
        for i, row in enumerate(self.rows):
            if i == r:
                continue
            f = row[c]
            if f:
                for j in nz:
                    row[j] -= f * prow[j]
        for obj in objective_rows:
            f = obj[c]
            if f:
                for j in nz:
                    obj[j] -= f * prow[j]
        self.basis[r] = c


def _reduced_costs(tab: _Tableau, cost: Sequence) -> list:
    """Row ``cost - c_B B^-1 M`` (last entry holds ``-c_B B^-1 b``)."""
    obj = list(cost) + [ZERO]
    for i, bi in enumerate(tab.basis):
        cb = cost[bi]
        if cb:
            row = tab.rows[i]
            for j, v in enumerate(row):
                if v:
                    obj[j] -= cb * v
    return obj


def _simplex(tab: _Tableau, obj: list, allowed: Sequence[bool]) -> str:
    """Minimise; ``obj`` holds reduced costs.

    Dantzig's most-negative rule, switching to Bland's rule for good after
    a run of degenerate pivots so that cycling is impossible.
    """
    n = tab.ncols
    bland = False
    degenerate_run = 0
    while True:
        enter = -1
        if bland:
            for j in range(n):
                if allowed[j] and obj[j] < 0:
                    enter = j
                    break
        else:
            low = ZERO
            for j in range(n):
                if allowed[j] and obj[j] < low:
                    low = obj[j]
                    enter = j
        if enter < 0:
            return "optimal"
        best = None
        leave = -1
        for i, row in enumerate(tab.rows):
            a = row[enter]
            if a > 0:
                ratio = row[n] / a
                if (
                    best is None
                    or ratio < best
                    or (ratio == best and tab.basis[i] < tab.basis[leave])
                ):
                    best = ratio
                    leave = i
        if leave < 0:
            return "unbounded"
        if best == 0:
            degenerate_run += 1
            if degenerate_run > DEGENERATE_LIMIT:
                bland = True
        else:
            degenerate_run = 0
        tab.pivot(leave, enter, [obj])


def _solve(constraints: Sequence[Constraint], nvars: int, objective, free):
    free = set(free or ())
    for con in constraints:
        if len(con.coeffs) != nvars:
            raise DimensionError(
                f"constraint has {len(con.coeffs)} coefficients, expected {nvars}"
            )
    # column layout: original nonneg parts, negated parts of free vars, slacks, artificials
    free_list = sorted(free)
    neg_col = {j: nvars + k for k, j in enumerate(free_list)}
    nstruct = nvars + len(free_list)
    m = len(constraints)
    rows = []
    signs = []
    for con in constraints:
        sign = ONE if con.rhs >= 0 else -ONE
        row = [sign * a for a in con.coeffs]
        row += [-row[j] for j in free_list]
        sense = con.sense
        if sign < 0 and sense != "==":
            sense = "<=" if sense == ">=" else ">="
        rows.append((row, sense, sign * con.rhs))
        signs.append(sign)
    nslack = sum(1 for _, s, _ in rows if s != "==")
    ncols_wo_art = nstruct + nslack
    # initial basis: slack for <= rows, artificial otherwise
    art_rows = [i for i, (_, s, _) in enumerate(rows) if s != "<="]
    ncols = ncols_wo_art + len(art_rows)
    tab_rows = []
    basis = []
    init_col = []
    k_slack = nstruct
    k_art = ncols_wo_art
    for i, (row, sense, b) in enumerate(rows):
        full = row + [ZERO] * (ncols - nstruct) + [b]
        if sense == "<=":
            full[k_slack] = ONE
            basis.append(k_slack)
            init_col.append(k_slack)
            k_slack += 1
        else:
            if sense == ">=":
                full[k_slack] = -ONE
                k_slack += 1
            full[k_art] = ONE
            basis.append(k_art)
            init_col.append(k_art)
            k_art += 1
        tab_rows.append(full)
    tab = _Tableau(tab_rows, basis, ncols)

    # phase 1
    cost1 = [ZERO] * ncols_wo_art + [ONE] * len(art_rows)
    obj1 = _reduced_costs(tab, cost1)
    _simplex(tab, obj1, [True] * ncols)
    infeas = -obj1[ncols]
    if infeas > 0:
        # y = c_B B^-1, columns of B^-1 are the initial identity columns
        y = []
        for r in range(m):
            col = init_col[r]
            s = ZERO
            for i, bi in enumerate(tab.basis):
                cb = cost1[bi]
                if cb:
                    v = tab.rows[i][col]
                    if v:
                        s += cb * v
            y.append(s)
        lam = tuple(signs[r] * y[r] for r in range(m))
        return LPResult("infeasible", farkas=lam)

    # drive artificials out of the basis
    is_art = [j >= ncols_wo_art for j in range(ncols)]
    keep = []
    for i in range(len(tab.rows)):
        if is_art[tab.basis[i]]:
            row = tab.rows[i]
            c = next((j for j in range(ncols_wo_art) if row[j] != 0), None)
            if c is None:
                continue  # redundant row
            tab.pivot(i, c, [obj1])
        keep.append(i)
    tab.rows = [tab.rows[i] for i in keep]
    tab.basis = [tab.basis[i] for i in keep]
    allowed = [not a for a in is_art]

    if objective is None:
        cost2 = [ZERO] * ncols
    else:
        c = [q(v) for v in objective]
        if len(c) != nvars:
            raise DimensionError("objective length mismatch")
        cost2 = [-v for v in c] + [c[j] for j in free_list]
        cost2 += [ZERO] * (ncols - len(cost2))
    status = "optimal"
    if objective is not None:
        obj2 = _reduced_costs(tab, cost2)
        status = _simplex(tab, obj2, allowed)
    z = [ZERO] * ncols
    for i, bi in enumerate(tab.basis):
        z[bi] = tab.rows[i][ncols]
    x = [z[j] for j in range(nvars)]
    for j in free_list:
        x[j] -= z[neg_col[j]]
    x = tuple(x)
    if status == "unbounded":
        return LPResult("unbounded", x=x)
    value = None
    if objective is not None:
        value = sum((a * b for a, b in zip(objective, x)), ZERO)
    return LPResult("optimal", x=x, value=q(value) if value is not None else None)


def lp_feasible(constraints: Sequence[Constraint], nvars: int, free=()) -> LPResult:
    """Exact feasibility: a witness, or a Farkas certificate."""
    res = _solve(list(constraints), nvars, None, free)
    if res.status == "infeasible":
        if not verify_farkas(constraints, nvars, res.farkas, free):
            raise ArithmeticError("internal error: Farkas certificate fails replay")
    else:
        if not all(c.holds(res.x) for c in constraints):
            raise ArithmeticError("internal error: witness fails replay")
    return res


def lp_maximize(objective, constraints: Sequence[Constraint], nvars: int, free=()) -> LPResult:
    res = _solve(list(constraints), nvars, objective, free)
    if res.status == "infeasible":
        if not verify_farkas(constraints, nvars, res.farkas, free):
            raise ArithmeticError("internal error: Farkas certificate fails replay")
    return res


def verify_farkas(constraints: Sequence[Constraint], nvars: int, lam, free=()) -> bool:
    if lam is None or len(lam) != len(constraints):
        return False
    free = set(free or ())
    total = ZERO
    agg = [ZERO] * nvars
    for l, con in zip(lam, constraints):
        if con.sense == ">=" and l < 0:
            return False
        if con.sense == "<=" and l > 0:
            return False
        if l:
            total += l * con.rhs
            for j, a in enumerate(con.coeffs):
                if a:
                    agg[j] += l * a
    for j in range(nvars):
        if j in free:
            if agg[j] != 0:
                return False
        elif agg[j] > 0:
            return False
    return total > 0


def cone_combination(generators: Sequence[Sequence], target, extra_free=None) -> Optional[tuple]:
    """Nonnegative ``c`` with ``sum c_i g_i == target``, or None."""
    n = len(generators)
    dim = len(target)
    cons = []
    for r in range(dim):
        cons.append(eq(tuple(g[r] for g in generators), target[r]))
    if n == 0:
        return () if all(t == 0 for t in target) else None
    res = _solve(cons, n, None, ())
    if res.status == "infeasible":
        return None
    return res.x

"""Finitely generated convex cones: membership, double description, faces."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import FrozenSet, List, Optional, Sequence

from . import linalg as la
from . import guided
from .lp import Constraint, eq, ge, le, lp_feasible, lp_maximize
from .rational import ONE, ZERO, q

MAX_DIM = 64
MAX_GENERATORS = 4096
MAX_INTERMEDIATE_RAYS = 200_000


class DDLimitError(ValueError):
    """Double description requested beyond the configured size caps."""


class NotInConeError(ValueError):
    pass


class ConeV:
    """Conic hull of a list of nonzero generators."""

    def __init__(self, ambient_dim: int, generators: Sequence[Sequence]):
        gens = []
        for g in generators:
            g = tuple(q(x) for x in g)
            if len(g) != ambient_dim:
                raise la.DimensionError(
                    f"generator of length {len(g)} in a cone of dimension {ambient_dim}"
                )
            if la.is_zero(g):
                raise ValueError("cone generators must be nonzero")
            gens.append(g)
        self.ambient_dim = ambient_dim
        self.generators = tuple(gens)
        self._rank = None
        self._independent = None

    def __len__(self):
        return len(self.generators)

    def __repr__(self):
        return f"ConeV(dim={self.ambient_dim}, gens={len(self.generators)})"

    @property
    def rank(self) -> int:
        if self._rank is None:
            self._rank = la.rank([list(g) for g in self.generators])
        return self._rank

    @property
    def simplicial(self) -> bool:
        """True when the generators are linearly independent."""
        if self._independent is None:
            self._independent = self.rank == len(self.generators)
        return self._independent

    def contains(self, v) -> bool:
        return cone_member(self, v)


class ConeH:
    """{x : <a, x> >= 0 for every listed a}."""

    def __init__(self, ambient_dim: int, inequalities: Sequence[Sequence]):
        ineqs = []
        for a in inequalities:
            a = tuple(q(x) for x in a)
            if len(a) != ambient_dim:
                raise la.DimensionError("inequality length mismatch")
            ineqs.append(a)
        self.ambient_dim = ambient_dim
        self.inequalities = tuple(ineqs)

    def __repr__(self):
        return f"ConeH(dim={self.ambient_dim}, ineqs={len(self.inequalities)})"

    def contains(self, v) -> bool:
        if len(v) != self.ambient_dim:
            raise la.DimensionError("point length mismatch")
        return all(la.dot(a, v) >= 0 for a in self.inequalities)

    def slack(self, v) -> tuple:
        return tuple(la.dot(a, v) for a in self.inequalities)


@dataclass(frozen=True)
class Face:
    parent: ConeV = field(repr=False)
    support: FrozenSet[int]
    dim: int

    def generators(self) -> list:
        return [self.parent.generators[i] for i in sorted(self.support)]

    def span_basis(self) -> list:
        return la.row_basis(self.generators())


# --------------------------------------------------------------------------
# membership


def _check_dim(K, v):
    if len(v) != K.ambient_dim:
        raise la.DimensionError(
            f"vector of length {len(v)} against cone of dimension {K.ambient_dim}"
        )


def cone_decompose(K: ConeV, v) -> Optional[tuple]:
    """Nonnegative coefficients expressing v over K's generators, or None."""
    _check_dim(K, v)
    v = tuple(q(x) for x in v)
    if not K.generators:
        return () if la.is_zero(v) else None
    if K.simplicial:
        c = la.coordinates(K.generators, v)
        if c is None or any(x < 0 for x in c):
            return None
        return c
    n = len(K.generators)
    if n >= guided.MIN_GENERATORS:
        hint = _guided_decompose(K, v)
        if hint is not None:
            return hint[1]
    return _exact_decompose(K, v)


def _exact_decompose(K: ConeV, v) -> Optional[tuple]:
    n = len(K.generators)
    cons = [eq(tuple(g[r] for g in K.generators), v[r]) for r in range(K.ambient_dim)]
    res = lp_feasible(cons, n)
    return res.x if res.feasible else None


def _guided_decompose(K: ConeV, v):
    """("in", coeffs) or ("out", None) when a float hint verifies exactly."""
    gens = K.generators
    support = guided.feasible_support(gens, v)
    if support is not None:
        sub = ConeV(K.ambient_dim, [gens[i] for i in support]) if support else None
        c = _exact_decompose(sub, v) if sub is not None else (() if la.is_zero(v) else None)
        if c is not None:
            full = [ZERO] * len(gens)
            for i, x in zip(support, c):
                full[i] = x
            return ("in", tuple(full))
        return None
    if guided.separating_direction(gens, v) is not None:
        return ("out", None)
    return None


def cone_member(K: ConeV, v) -> bool:
    return cone_decompose(K, v) is not None


# --------------------------------------------------------------------------
# double description


def _motzkin(M: list, k: int) -> list:
    """Extreme rays of the pointed cone {z in R^k : M z >= 0}; M has rank k."""
    if k == 0:
        return []
    chosen = la.independent_indices(M)
    seen = set(chosen)
    rest = [i for i in range(len(M)) if i not in seen]
    inv = la.inverse([list(M[i]) for i in chosen])
    rays = []
    zsets = []
    for j in range(k):
        col = tuple(inv[r][j] for r in range(k))
        rays.append(la.primitive(col))
        mask = 0
        for t, i in enumerate(chosen):
            if t != j:
                mask |= 1 << i
        zsets.append(mask)
    for i in rest:
        a = M[i]
        vals = [la.dot(a, r) for r in rays]
        pos = [t for t, v in enumerate(vals) if v > 0]
        neg = [t for t, v in enumerate(vals) if v < 0]
        zer = [t for t, v in enumerate(vals) if v == 0]
        if not neg:
            for t in zer:
                zsets[t] |= 1 << i
            continue
        new_rays = [rays[t] for t in pos] + [rays[t] for t in zer]
        new_z = [zsets[t] for t in pos] + [zsets[t] | (1 << i) for t in zer]
        all_idx = range(len(rays))
        for p in pos:
            zp = zsets[p]
            for n in neg:
                common = zp & zsets[n]
                if bin(common).count("1") < k - 2:
                    continue
                adjacent = True
                for t in all_idx:
                    if t != p and t != n and (zsets[t] & common) == common:
                        adjacent = False
                        break
                if not adjacent:
                    continue
                ap, an = vals[p], vals[n]
                w = tuple(ap * x - an * y for x, y in zip(rays[n], rays[p]))
                new_rays.append(la.primitive(w))
                new_z.append(common | (1 << i))
        if len(new_rays) > MAX_INTERMEDIATE_RAYS:
            raise DDLimitError("double description exceeded the intermediate ray cap")
        rays, zsets = new_rays, new_z
    # deduplicate
    out = []
    seen_r = set()
    for r in rays:
        if r not in seen_r:
            seen_r.add(r)
            out.append(r)
    return out


def h_to_v(H: ConeH) -> ConeV:
    """Generators of {x : A x >= 0}, lineality included as +/- pairs."""
    d = H.ambient_dim
    if d > MAX_DIM:
        raise DDLimitError(f"ambient dimension {d} exceeds cap {MAX_DIM}")
    if len(H.inequalities) > MAX_GENERATORS:
        raise DDLimitError(f"{len(H.inequalities)} inequalities exceed cap {MAX_GENERATORS}")
    A = [list(a) for a in H.inequalities if not la.is_zero(a)]
    lineality = la.nullspace(A, d) if A else [la.unit_vector(d, i) for i in range(d)]
    gens = []
    for l in lineality:
        l = la.primitive(l)
        gens.append(l)
        gens.append(tuple(-x for x in l))
    if A:
        B = la.row_basis(A)  # basis of the row space (complement of lineality)
        k = len(B)
        Bt = la.transpose([list(b) for b in B])  # d x k
        M = la.matmul(A, Bt)
        for z in _motzkin(M, k):
            x = la.matvec(Bt, z)
            if not la.is_zero(x):
                gens.append(la.primitive(x))
    return ConeV(d, gens)


def dd_convert(K):
    """V -> H for a ConeV, H -> V for a ConeH."""
    if isinstance(K, ConeH):
        return h_to_v(K)
    d = K.ambient_dim
    if d > MAX_DIM:
        raise DDLimitError(f"ambient dimension {d} exceeds cap {MAX_DIM}")
    if len(K.generators) > MAX_GENERATORS:
        raise DDLimitError(f"{len(K.generators)} generators exceed cap {MAX_GENERATORS}")
    dual = h_to_v(ConeH(d, K.generators))
    return ConeH(d, dual.generators)


def irredundant(K: ConeV) -> ConeV:
    """Drop generators lying in the cone of the others (and duplicate rays)."""
    gens = []
    seen = set()
    for g in K.generators:
        p = la.primitive(g)
        if p not in seen:
            seen.add(p)
            gens.append(g)
    keep = list(gens)
    i = 0
    while i < len(keep):
        others = keep[:i] + keep[i + 1:]
        if others and cone_member(ConeV(K.ambient_dim, others), keep[i]):
            keep.pop(i)
        else:
            i += 1
    return ConeV(K.ambient_dim, keep)


# --------------------------------------------------------------------------
# faces


def _face_lp(K: ConeV, x, i):
    """max eps s.t. x - eps g_i in K, 0 <= eps <= 1; returns (eps, coeffs)."""
    gens = K.generators
    n = len(gens)
    g = gens[i]
    cons = []
    for r in range(K.ambient_dim):
        coeffs = tuple(gj[r] for gj in gens) + (g[r],)
        cons.append(eq(coeffs, x[r]))
    cons.append(le((ZERO,) * n + (ONE,), ONE))
    res = lp_maximize((ZERO,) * n + (ONE,), cons, n + 1)
    if res.status != "optimal":
        raise ArithmeticError("face LP did not reach an optimum")
    return res.value, res.x[:n]


def face_support_lp(K: ConeV, x) -> frozenset:
    """Per-generator epsilon LPs (one per undecided generator)."""
    c = cone_decompose(K, x)
    if c is None:
        raise NotInConeError("point is not in the cone")
    support = {i for i, v in enumerate(c) if v > 0}
    decided_out = set()
    for i in range(len(K.generators)):
        if i in support or i in decided_out:
            continue
        eps, coeffs = _face_lp(K, x, i)
        if eps > 0:
            support.add(i)
            support.update(j for j, v in enumerate(coeffs) if v > 0)
        else:
            decided_out.add(i)
    return frozenset(support)


def face_support_aggregate(K: ConeV, x) -> frozenset:
    """One LP: max sum t_i, t_i <= c_i, t_i <= 1, sum c_j g_j = lam x."""
    gens = K.generators
    n = len(gens)
    if cone_decompose(K, x) is None:
        raise NotInConeError("point is not in the cone")
    if n >= guided.MIN_GENERATORS:
        hint = guided.aggregate_support(gens, x)
        if hint:
            # exact support inside the hinted columns, then certify the rest out
            sub = ConeV(K.ambient_dim, [gens[i] for i in hint])
            if cone_decompose(sub, x) is not None:
                inner = [hint[i] for i in face_support_aggregate(sub, x)]
                if guided.exclusion_direction(gens, inner) is not None:
                    return frozenset(inner)
    nv = 2 * n + 1  # c (n), t (n), lam
    cons = []
    for r in range(K.ambient_dim):
        coeffs = [g[r] for g in gens] + [ZERO] * n + [-x[r]]
        cons.append(eq(coeffs, 0))
    for i in range(n):
        row = [ZERO] * nv
        row[n + i] = ONE
        row[i] = -ONE
        cons.append(le(row, 0))
        row = [ZERO] * nv
        row[n + i] = ONE
        cons.append(le(row, 1))
    obj = [ZERO] * n + [ONE] * n + [ZERO]
    res = lp_maximize(obj, cons, nv)
    if res.status != "optimal":
        raise ArithmeticError("aggregate face LP did not reach an optimum")
    return frozenset(i for i in range(n) if res.x[n + i] > 0)


def minimal_face(K: ConeV, x, method: str = "auto") -> Face:
    """Smallest face of K containing x, as a generator support."""
    _check_dim(K, x)
    x = tuple(q(v) for v in x)
    if la.is_zero(x):
        return Face(K, frozenset(), 0)
    if K.simplicial and method == "auto":
        c = cone_decompose(K, x)
        if c is None:
            raise NotInConeError("point is not in the cone")
        support = frozenset(i for i, v in enumerate(c) if v > 0)
    elif method == "aggregate" or (method == "auto" and len(K.generators) > 48):
        support = face_support_aggregate(K, x)
    elif method in ("auto", "lp"):
        support = face_support_lp(K, x)
    else:
        raise ValueError(f"unknown face method {method!r}")
    dim = la.rank([list(K.generators[i]) for i in sorted(support)]) if support else 0
    return Face(K, support, dim)


def is_extreme_ray(K: ConeV, x) -> bool:
    return minimal_face(K, x).dim <= 1

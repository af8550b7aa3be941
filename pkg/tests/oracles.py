"""Brute-force reference computations, independent of the solver code paths."""

from itertools import combinations

from optlab import linalg as la
from optlab.rational import ZERO, q


def _solve_square(rows, rhs):
    m = [list(r) + [b] for r, b in zip(rows, rhs)]
    n = len(rows)
    for c in range(n):
        p = next((r for r in range(c, n) if m[r][c] != 0), None)
        if p is None:
            return None
        m[c], m[p] = m[p], m[c]
        piv = m[c][c]
        m[c] = [x / piv for x in m[c]]
        for r in range(n):
            if r != c and m[r][c] != 0:
                f = m[r][c]
                m[r] = [a - f * b for a, b in zip(m[r], m[c])]
    return tuple(m[r][n] for r in range(n))


def polytope_vertices(A, b):
    """Vertices of {x >= 0, A x <= b} by trying every square subsystem of tight rows."""
    n = len(A[0])
    rows = [tuple(r) for r in A] + [tuple(q(1) if j == i else ZERO for j in range(n)) for i in range(n)]
    rhs = list(b) + [ZERO] * n
    senses = ["<="] * len(A) + [">="] * n
    out = set()
    for idx in combinations(range(len(rows)), n):
        x = _solve_square([rows[i] for i in idx], [rhs[i] for i in idx])
        if x is None:
            continue
        ok = all(
            (la.dot(r, x) <= c) if s == "<=" else (la.dot(r, x) >= c)
            for r, c, s in zip(rows, rhs, senses)
        )
        if ok:
            out.add(x)
    return out


def face_support_bruteforce(gens, x):
    """Union of supports of all basic nonnegative decompositions of x.

    For a pointed cone the decomposition polytope is bounded, so every
    decomposition is a convex combination of basic ones; the union of their
    supports is exactly the generator support of the minimal face.
    """
    d = len(x)
    support = set()
    for k in range(1, min(d, len(gens)) + 1):
        for idx in combinations(range(len(gens)), k):
            cols = [gens[i] for i in idx]
            if la.rank([list(c) for c in cols]) < k:
                continue
            c = la.coordinates(cols, x)
            if c is None or any(v < 0 for v in c):
                continue
            support |= {idx[j] for j, v in enumerate(c) if v > 0}
    return frozenset(support)


def subset_rank(gens, support):
    return la.rank([list(gens[i]) for i in sorted(support)]) if support else 0

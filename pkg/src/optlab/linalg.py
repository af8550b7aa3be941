"""Dense exact linear algebra over the rationals.

Matrices are lists of rows; vectors are tuples or lists.  Nothing here is
clever: the sizes the package deals with are at most a few hundred, and the
point is exactness.  Complex matrices are handled as ``(re, im)`` pairs of
real matrices.
"""

from __future__ import annotations

from typing import Iterable, List, Optional, Sequence, Tuple

from .rational import ONE, ZERO, Q, q


class DimensionError(ValueError):
    """Operands have inconsistent dimensions."""


# --------------------------------------------------------------------------
# construction


def zeros(r: int, c: int) -> list:
    return [[ZERO] * c for _ in range(r)]


def eye(n: int) -> list:
    m = zeros(n, n)
    for i in range(n):
        m[i][i] = ONE
    return m


def unit_vector(n: int, i: int) -> tuple:
    v = [ZERO] * n
    v[i] = ONE
    return tuple(v)


def shape(m: Sequence[Sequence]) -> Tuple[int, int]:
    return len(m), (len(m[0]) if m else 0)


def copy(m):
    return [list(row) for row in m]


# --------------------------------------------------------------------------
# vector arithmetic


def dot(u: Sequence, v: Sequence):
    if len(u) != len(v):
        raise DimensionError(f"dot of lengths {len(u)} and {len(v)}")
    s = ZERO
    for a, b in zip(u, v):
        if a and b:
            s += a * b
    return s


def vadd(u, v) -> tuple:
    if len(u) != len(v):
        raise DimensionError("vector lengths differ")
    return tuple(a + b for a, b in zip(u, v))


def vsub(u, v) -> tuple:
    if len(u) != len(v):
        raise DimensionError("vector lengths differ")
    return tuple(a - b for a, b in zip(u, v))


def vscale(c, v) -> tuple:
    return tuple(c * a for a in v)


def vsum(vectors: Iterable[Sequence], n: int) -> tuple:
    acc = [ZERO] * n
    for v in vectors:
        if len(v) != n:
            raise DimensionError("vector lengths differ")
        for i, a in enumerate(v):
            if a:
                acc[i] += a
    return tuple(acc)


def is_zero(v) -> bool:
    return all(a == 0 for a in v)


def proportional_factor(v, ref) -> Optional[Q]:
    """Return ``c`` with ``v == c * ref``, or None.  ``ref`` must be nonzero."""
    c = None
    for a, b in zip(v, ref):
        if b == 0:
            if a != 0:
                return None
            continue
        ratio = a / b
        if c is None:
            c = ratio
        elif ratio != c:
            return None
    return c if c is not None else ZERO


def primitive(v) -> tuple:
    """Scale a rational vector to coprime integers (sign kept)."""
    from math import gcd

    dens = 1
    for a in v:
        if a:
            d = int(a.denominator)
            dens = dens * d // gcd(dens, d)
    ints = [int(a * dens) for a in v]
    g = 0
    for a in ints:
        g = gcd(g, abs(a))
    if g == 0:
        return tuple(q(0) for _ in v)
    return tuple(q(a // g) for a in ints)


# --------------------------------------------------------------------------
# matrix arithmetic


def transpose(m) -> list:
    if not m:
        return []
    return [list(col) for col in zip(*m)]


def matmul(a, b) -> list:
    ra, ca = shape(a)
    rb, cb = shape(b)
    if ca != rb:
        raise DimensionError(f"matmul {ra}x{ca} by {rb}x{cb}")
    bt = transpose(b)
    out = []
    for row in a:
        nz = [(k, x) for k, x in enumerate(row) if x]
        out_row = []
        for col in bt:
            s = ZERO
            for k, x in nz:
                y = col[k]
                if y:
                    s += x * y
            out_row.append(s)
        out.append(out_row)
    return out


def matvec(m, v) -> tuple:
    r, c = shape(m)
    if c != len(v):
        raise DimensionError(f"matvec {r}x{c} by {len(v)}")
    nz = [(k, x) for k, x in enumerate(v) if x]
    out = []
    for row in m:
        s = ZERO
        for k, x in nz:
            y = row[k]
            if y:
                s += x * y
        out.append(s)
    return tuple(out)


def vecmat(v, m) -> tuple:
    return matvec(transpose(m), v)


def madd(a, b) -> list:
    if shape(a) != shape(b):
        raise DimensionError("matrix shapes differ")
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def msub(a, b) -> list:
    if shape(a) != shape(b):
        raise DimensionError("matrix shapes differ")
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mscale(c, a) -> list:
    return [[c * x for x in row] for row in a]


def mequal(a, b) -> bool:
    return shape(a) == shape(b) and all(
        x == y for ra, rb in zip(a, b) for x, y in zip(ra, rb)
    )


def kron(a, b) -> list:
    ra, ca = shape(a)
    rb, cb = shape(b)
    out = zeros(ra * rb, ca * cb)
    for i in range(ra):
        for j in range(ca):
            x = a[i][j]
            if not x:
                continue
            for k in range(rb):
                row = out[i * rb + k]
                brow = b[k]
                for l in range(cb):
                    y = brow[l]
                    if y:
                        row[j * cb + l] = x * y
    return out


def kron_vec(u, v) -> tuple:
    return tuple(a * b for a in u for b in v)


def flatten(m) -> tuple:
    return tuple(x for row in m for x in row)


def unflatten(v, r: int, c: int) -> list:
    if len(v) != r * c:
        raise DimensionError("cannot reshape")
    return [list(v[i * c:(i + 1) * c]) for i in range(r)]


def trace(m):
    return sum((m[i][i] for i in range(len(m))), ZERO)


# --------------------------------------------------------------------------
# elimination


def rref(m, ncols: Optional[int] = None):
    """Reduced row echelon form; returns (matrix, pivot columns)."""
    a = copy(m)
    rows = len(a)
    cols = ncols if ncols is not None else (len(a[0]) if a else 0)
    pivots = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        p = None
        for i in range(r, rows):
            if a[i][c] != 0:
                p = i
                break
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = ONE / a[r][c]
        a[r] = [x * inv for x in a[r]]
        pivot_row = a[r]
        nzc = [j for j, x in enumerate(pivot_row) if x]
        for i in range(rows):
            if i != r:
                f = a[i][c]
                if f:
                    row = a[i]
                    for j in nzc:
                        row[j] -= f * pivot_row[j]
        pivots.append(c)
        r += 1
    return a, pivots


def rank(m) -> int:
    """Rank via fraction-free style forward elimination."""
    if not m or not m[0]:
        return 0
    a = [list(row) for row in m if any(row)]
    if not a:
        return 0
    cols = len(a[0])
    r = 0
    for c in range(cols):
        p = None
        for i in range(r, len(a)):
            if a[i][c] != 0:
                p = i
                break
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        prow = a[r]
        inv = ONE / prow[c]
        nzc = [j for j in range(c, cols) if prow[j]]
        for i in range(r + 1, len(a)):
            f = a[i][c]
            if f:
                f = f * inv
                row = a[i]
                for j in nzc:
                    row[j] -= f * prow[j]
        r += 1
        if r == len(a):
            break
    return r


def row_basis(vectors: Sequence[Sequence]) -> list:
    """A maximal linearly independent subset, in input order."""
    return [tuple(vectors[i]) for i in independent_indices(vectors)]


def independent_indices(vectors: Sequence[Sequence]) -> list:
    """Indices of a greedy maximal independent subset."""
    basis: list = []
    echelon: list = []  # (pivot, row) pairs, rows normalised at pivot
    for idx, v in enumerate(vectors):
        w = list(v)
        for piv, row in echelon:
            f = w[piv]
            if f:
                for j, x in enumerate(row):
                    if x:
                        w[j] -= f * x
        piv = next((j for j, x in enumerate(w) if x), None)
        if piv is None:
            continue
        inv = ONE / w[piv]
        w = [x * inv for x in w]
        echelon.append((piv, w))
        basis.append(idx)
    return basis


def nullspace(m, ncols: Optional[int] = None) -> list:
    """Basis of {x : m x = 0} as a list of tuples."""
    cols = ncols if ncols is not None else (len(m[0]) if m else 0)
    if not m:
        return [unit_vector(cols, i) for i in range(cols)]
    red, piv = rref(m, cols)
    free = [c for c in range(cols) if c not in piv]
    basis = []
    for f in free:
        x = [ZERO] * cols
        x[f] = ONE
        for i, p in enumerate(piv):
            x[p] = -red[i][f]
        basis.append(tuple(x))
    return basis


def solve(m, b) -> Optional[tuple]:
    """One solution of m x = b, or None if inconsistent."""
    r, c = shape(m)
    if len(b) != r:
        raise DimensionError("rhs length mismatch")
    aug = [list(row) + [b[i]] for i, row in enumerate(m)]
    red, piv = rref(aug, c + 1)
    if c in piv:
        return None
    x = [ZERO] * c
    for i, p in enumerate(piv):
        x[p] = red[i][c]
    return tuple(x)


def inverse(m) -> list:
    n = len(m)
    aug = [list(row) + list(e) for row, e in zip(m, eye(n))]
    red, piv = rref(aug, n)
    if piv != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in red]


def span_contains(basis: Sequence[Sequence], v) -> bool:
    if is_zero(v):
        return True
    if not basis:
        return False
    return rank(list(basis) + [list(v)]) == rank(list(basis))


def coordinates(basis: Sequence[Sequence], v) -> Optional[tuple]:
    """Coefficients of v in the given (independent) basis, or None."""
    if not basis:
        return () if is_zero(v) else None
    return solve(transpose([list(b) for b in basis]), list(v))


# --------------------------------------------------------------------------
# sparse elimination for large, mostly-empty families


class SparseEchelon:
    """Incremental rank of sparse vectors stored as ``{index: value}``."""

    def __init__(self):
        self.rows = {}  # pivot -> normalised row dict

    def add(self, v: dict) -> bool:
        w = {k: x for k, x in v.items() if x}
        while w:
            piv = min(w)
            row = self.rows.get(piv)
            if row is None:
                inv = ONE / w[piv]
                self.rows[piv] = {k: x * inv for k, x in w.items()}
                return True
            f = w[piv]
            for k, x in row.items():
                y = w.get(k, ZERO) - f * x
                if y:
                    w[k] = y
                else:
                    w.pop(k, None)
        return False

    @property
    def rank(self) -> int:
        return len(self.rows)


def sparse(v) -> dict:
    return {i: x for i, x in enumerate(v) if x}


# --------------------------------------------------------------------------
# symmetric PSD test


def is_psd_symmetric(m) -> bool:
    """Exact positive-semidefiniteness test for a rational symmetric matrix.

    Symmetric Gaussian elimination with diagonal pivots: every pivot must be
    nonnegative, and a zero pivot forces its whole row to vanish.  This is
    equivalent to all principal minors being nonnegative.
    """
    a = copy(m)
    n = len(a)
    for i in range(n):
        for j in range(i + 1, n):
            if a[i][j] != a[j][i]:
                raise ValueError("matrix is not symmetric")
    active = list(range(n))
    while active:
        # pick the largest diagonal to keep numbers tame
        k = max(active, key=lambda t: a[t][t])
        d = a[k][k]
        if d < 0:
            return False
        if d == 0:
            if any(a[k][j] != 0 for j in active):
                return False
            active.remove(k)
            continue
        active.remove(k)
        rowk = a[k]
        for i in active:
            f = rowk[i]
            if not f:
                continue
            f = f / d
            ri = a[i]
            for j in active:
                x = rowk[j]
                if x:
                    ri[j] -= f * x
    return True


# --------------------------------------------------------------------------
# complex matrices as (re, im) pairs


def cmat(re, im=None):
    if im is None:
        im = zeros(*shape(re))
    return (re, im)


def czeros(r, c):
    return (zeros(r, c), zeros(r, c))


def ceye(n):
    return (eye(n), zeros(n, n))


def cadd(a, b):
    return (madd(a[0], b[0]), madd(a[1], b[1]))


def csub(a, b):
    return (msub(a[0], b[0]), msub(a[1], b[1]))


def cscale(c, a):
    return (mscale(c, a[0]), mscale(c, a[1]))


def cmatmul(a, b):
    ar, ai = a
    br, bi = b
    re = msub(matmul(ar, br), matmul(ai, bi))
    im = madd(matmul(ar, bi), matmul(ai, br))
    return (re, im)


def cdagger(a):
    return (transpose(a[0]), [[-x for x in row] for row in transpose(a[1])])


def ckron(a, b):
    ar, ai = a
    br, bi = b
    re = msub(kron(ar, br), kron(ai, bi))
    im = madd(kron(ar, bi), kron(ai, br))
    return (re, im)


def ctrace(a):
    return trace(a[0]), trace(a[1])


def cequal(a, b) -> bool:
    return mequal(a[0], b[0]) and mequal(a[1], b[1])


def cis_zero(a) -> bool:
    return all(x == 0 for row in a[0] for x in row) and all(
        x == 0 for row in a[1] for x in row
    )


def is_hermitian(a) -> bool:
    re, im = a
    n = len(re)
    for i in range(n):
        for j in range(i, n):
            if re[i][j] != re[j][i] or im[i][j] != -im[j][i]:
                return False
    return True


def real_embedding(a) -> list:
    """[[re, -im], [im, re]]; Hermitian a maps to a real symmetric matrix."""
    re, im = a
    n = len(re)
    m = len(re[0]) if n else 0
    out = zeros(2 * n, 2 * m)
    for i in range(n):
        for j in range(m):
            out[i][j] = re[i][j]
            out[i + n][j + m] = re[i][j]
            out[i][j + m] = -im[i][j]
            out[i + n][j] = im[i][j]
    return out


def cis_psd(a) -> bool:
    if not is_hermitian(a):
        return False
    if all(x == 0 for row in a[1] for x in row):
        return is_psd_symmetric(a[0])
    return is_psd_symmetric(real_embedding(a))


def crank(a) -> int:
    if all(x == 0 for row in a[1] for x in row):
        return rank(a[0])
    return rank(real_embedding(a)) // 2


def cinverse(a):
    n = len(a[0])
    inv = inverse(real_embedding(a))
    re = [row[:n] for row in inv[:n]]
    im = [row[:n] for row in inv[n:]]
    return (re, im)


def ccolumns(a) -> List[Tuple[tuple, tuple]]:
    re, im = a
    n = len(re[0]) if re else 0
    return [(tuple(r[j] for r in re), tuple(r[j] for r in im)) for j in range(n)]


def cfrom_columns(cols, nrows):
    re = zeros(nrows, len(cols))
    im = zeros(nrows, len(cols))
    for j, (cr, ci) in enumerate(cols):
        for i in range(nrows):
            re[i][j] = cr[i]
            im[i][j] = ci[i]
    return (re, im)


def ccolumn_space(a):
    """Independent columns spanning the (complex) range of ``a``."""
    # c is independent of the chosen columns over C iff both c and i*c
    # raise the real rank of the (re, im) stacked vectors
    n = len(a[0])
    ech = SparseEchelon()
    chosen = []
    for cr, ci in ccolumns(a):
        if ech.add(sparse(tuple(cr) + tuple(ci))):
            ech.add(sparse(tuple(-x for x in ci) + tuple(cr)))
            chosen.append((cr, ci))
    return chosen


def crange_projector(a):
    """Orthogonal projector onto the range of a complex matrix (exact)."""
    n = len(a[0])
    cols = ccolumn_space(a)
    if not cols:
        return czeros(n, n)
    v = cfrom_columns(cols, n)
    vd = cdagger(v)
    gram = cmatmul(vd, v)
    return cmatmul(cmatmul(v, cinverse(gram)), vd)


def couter(u, v):
    """|u><v| for complex vectors given as (re, im) tuples."""
    ur, ui = u
    vr, vi = v
    n, m = len(ur), len(vr)
    re = zeros(n, m)
    im = zeros(n, m)
    for i in range(n):
        for j in range(m):
            # u_i * conj(v_j)
            re[i][j] = ur[i] * vr[j] + ui[i] * vi[j]
            im[i][j] = ui[i] * vr[j] - ur[i] * vi[j]
    return (re, im)


def cinner(u, v):
    """<u|v> = sum conj(u_i) v_i as (re, im)."""
    ur, ui = u
    vr, vi = v
    re = sum((ur[i] * vr[i] + ui[i] * vi[i] for i in range(len(ur))), ZERO)
    im = sum((ur[i] * vi[i] - ui[i] * vr[i] for i in range(len(ur))), ZERO)
    return re, im


def cmatvec(a, v):
    ar, ai = a
    vr, vi = v
    re = vsub(matvec(ar, vr), matvec(ai, vi))
    im = vadd(matvec(ar, vi), matvec(ai, vr))
    return (re, im)


def to_q_matrix(rows) -> list:
    return [[q(x) for x in row] for row in rows]

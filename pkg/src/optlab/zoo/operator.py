"""Theories whose states are operators on a finite Hilbert space.

States live in an allowed real span of Hermitian matrices (see
:class:`~optlab.psd.HermSpace`); a transformation ``A -> B`` is stored as
its Choi matrix ``J = sum_ij T(|i><j|) x |i><j|`` on ``B x A'``.  Applying
``T`` to a factor of a larger operator works block by block from ``J``,
so the same code serves complex, real and parity-restricted theories.
"""

from __future__ import annotations

import math
import random
from typing import List, Optional

from .. import linalg as la
from ..core import TransfMap
from ..psd import HermSpace, PSDCone
from ..rational import ONE, ZERO, q
from ..systems import TRIVIAL


def parity(k: int) -> int:
    return bin(k).count("1") & 1


def _nonzeros(M):
    re, im = M
    out = []
    n = len(re)
    for r in range(n):
        rr, ri = re[r], im[r]
        for c in range(n):
            a, b = rr[c], ri[c]
            if a or b:
                out.append((r, c, a, b))
    return out


def apply_choi(J, din, dout, M, p, s, odd_sign=None):
    """(id_p x T x id_s)(M) for T with Choi J on dout x din.

    ``odd_sign`` (fermionic theories) is a list of +-1 per before-index;
    entries of J in the odd total-parity sector pick up
    ``odd_sign[x] * odd_sign[x']``.
    """
    nin = p * din * s
    if len(M[0]) != nin:
        raise la.DimensionError(f"operator of size {len(M[0])}, expected {nin}")
    # group the input operator by its (i, j) block of the acted-on factor
    blocks = {}
    for r, c, a, b in _nonzeros(M):
        x, rest = divmod(r, din * s)
        i, y = divmod(rest, s)
        x2, rest2 = divmod(c, din * s)
        j, y2 = divmod(rest2, s)
        blocks.setdefault((i, j), []).append((x, y, x2, y2, a, b))
    nout = p * dout * s
    ore = la.zeros(nout, nout)
    oim = la.zeros(nout, nout)
    for r, c, jr, ji in _nonzeros(J):
        b, i = divmod(r, din)
        b2, j = divmod(c, din)
        entries = blocks.get((i, j))
        if not entries:
            continue
        odd = odd_sign is not None and (parity(b) + parity(i)) & 1
        for x, y, x2, y2, a, bb in entries:
            vr = jr * a - ji * bb
            vi = jr * bb + ji * a
            if odd and odd_sign[x] != odd_sign[x2]:
                vr, vi = -vr, -vi
            R = (x * dout + b) * s + y
            C = (x2 * dout + b2) * s + y2
            ore[R][C] += vr
            oim[R][C] += vi
    return (ore, oim)


def dual_choi(J, din, dout):
    """Choi matrix (on din x dout') of the dual map."""
    re, im = J
    n = din * dout
    ore = la.zeros(n, n)
    oim = la.zeros(n, n)
    for r, c, a, b in _nonzeros(J):
        bo, i = divmod(r, din)
        bo2, j = divmod(c, din)
        # J'[(j, bo2), (i, bo)] = J[(bo, i), (bo2, j)]
        R = j * dout + bo2
        C = i * dout + bo
        ore[R][C] = a
        oim[R][C] = b
    return (ore, oim)


def vec_choi(K):
    """Column vector |K>> with entries K[b][i] at index (b, i)."""
    re, im = K
    return (tuple(x for row in re for x in row), tuple(x for row in im for x in row))


def cayley(H):
    """(I - iH)(I + iH)^-1: a unitary with rational entries."""
    n = len(H[0])
    I = la.ceye(n)
    iH = (la.mscale(-ONE, H[1]), H[0])
    return la.cmatmul(la.csub(I, iH), la.cinverse(la.cadd(I, iH)))


def cmat_from(re, im=None):
    re = [[q(x) for x in row] for row in re]
    if im is None:
        im = la.zeros(len(re), len(re[0]))
    else:
        im = [[q(x) for x in row] for row in im]
    return (re, im)


def _isqrt_exact(n: int):
    r = math.isqrt(n)
    return r if r * r == n else None


def _three_squares(n: int):
    a = 0
    while a * a <= n:
        rest = n - a * a
        b = 0
        while b * b <= rest:
            c = _isqrt_exact(rest - b * b)
            if c is not None:
                return [a, b, c]
            b += 1
        a += 1
    return None


def squares(n: int) -> list:
    """Nonzero integers whose squares sum to n (at most four of them)."""
    if n == 0:
        return []
    r = _isqrt_exact(n)
    if r is not None:
        return [r]
    a = 1
    while a * a <= n:
        b = _isqrt_exact(n - a * a)
        if b is not None:
            return [x for x in (a, b) if x]
        a += 1
    t = _three_squares(n)
    if t is not None:
        return [x for x in t if x]
    a = 1
    while a * a <= n:
        t = _three_squares(n - a * a)
        if t is not None:
            return [a] + [x for x in t if x]
        a += 1
    raise ArithmeticError(f"no four-square representation of {n}")


def rational_sqrt_terms(D) -> list:
    """Rationals s_m with sum s_m^2 = D >= 0."""
    D = q(D)
    num, den = int(D.numerator), int(D.denominator)
    return [q(x, den) for x in squares(num * den)]


def ldl_hermitian(M):
    """Pivots (D_k, l_k) with M = sum_k D_k l_k l_k^dagger, or None if M is not PSD."""
    re = [list(r) for r in M[0]]
    im = [list(r) for r in M[1]]
    n = len(re)
    out = []
    for p in range(n):
        d = re[p][p]
        if d < 0:
            return None
        if d == 0:
            if any(re[p][j] or im[p][j] for j in range(n)):
                return None
            continue
        lr = tuple(re[i][p] / d for i in range(n))
        li = tuple(im[i][p] / d for i in range(n))
        out.append((d, (lr, li)))
        for i in range(n):
            if not (lr[i] or li[i]):
                continue
            for j in range(n):
                if not (lr[j] or li[j]):
                    continue
                # d * l_i * conj(l_j)
                re[i][j] -= d * (lr[i] * lr[j] + li[i] * li[j])
                im[i][j] -= d * (li[i] * lr[j] - lr[i] * li[j])
    return out


class OperatorTheory:
    """Mixin with the operator-theory machinery; combine with TheoryModel."""

    leaf_d = 2
    real = False
    fermionic = False

    # -- spaces --------------------------------------------------------------
    def hdim(self, A) -> int:
        return self.leaf_d ** len(A)

    def _sectors(self, n):
        if not self.fermionic:
            return None
        return tuple(parity(k) for k in range(n))

    def space(self, A) -> HermSpace:
        return self.memo(("space", tuple(A)), lambda: HermSpace(self.hdim(A), self.real, self._sectors(self.hdim(A))))

    def choi_space(self, A, B) -> HermSpace:
        n = self.hdim(A) * self.hdim(B)
        return self.memo(("cspace", tuple(A), tuple(B)), lambda: HermSpace(n, self.real, self._sectors(n)))

    def dim(self, A):
        return self.space(A).dim

    def mat(self, v, A):
        return self.space(A).from_coords(v)

    def coords(self, M, A):
        return self.space(A).to_coords(M)

    def state_cone(self, A):
        return self.memo(("scone", tuple(A)), lambda: PSDCone(self.space(A)))

    def effect_cone(self, A):
        return self.state_cone(A)

    def pair(self, e, rho, A):
        return self.space(A).pair(e, rho)

    def unit_effect(self, A):
        return self.space(A).identity_coords()

    def pure_states(self, A):
        return None

    def product_state(self, rho, A, sigma, B):
        return self.coords(la.ckron(self.mat(rho, A), self.mat(sigma, B)), tuple(A) + tuple(B))

    def product_effect(self, a, A, b, B):
        return self.product_state(a, A, b, B)

    def _partial(self, M, dA, dB, E):
        ore = la.zeros(dA, dA)
        oim = la.zeros(dA, dA)
        er, ei = E
        for r, c, a, b in _nonzeros(M):
            x, y = divmod(r, dB)
            x2, y2 = divmod(c, dB)
            # E[y2][y]
            fr, fi = er[y2][y], ei[y2][y]
            if fr or fi:
                ore[x][x2] += a * fr - b * fi
                oim[x][x2] += a * fi + b * fr
        return (ore, oim)

    def discard(self, psi, A, B, e):
        M = self.mat(psi, tuple(A) + tuple(B))
        return self.coords(self._partial(M, self.hdim(A), self.hdim(B), self.mat(e, B)), A)

    def effect_marginal(self, c, A, B, omega):
        return self.discard(c, A, B, omega)

    def _leaf_perm_index(self, x, k, perm):
        d = self.leaf_d
        digits = []
        t = x
        for _ in range(k):
            t, r = divmod(t, d)
            digits.append(r)
        digits.reverse()
        new = 0
        for p in range(k):
            new = new * d + digits[perm[p]]
        sign = 1
        if self.fermionic:
            pos = {old: p for p, old in enumerate(perm)}
            occ = [a for a in range(k) if digits[a]]
            for i, a in enumerate(occ):
                for b in occ[i + 1:]:
                    if pos[a] > pos[b]:
                        sign = -sign
        return new, sign

    def permute_leaves(self, v, k, perm):
        """Reorder the k elementary factors: new slot p holds old factor perm[p].

        Fermionic modes are reordered with the sign of the permuted
        creation operators, so parity-even operators stay consistent.
        """
        A = (self.leaf,) * k
        re, im = self.mat(v, A)
        n = len(re)
        idx = [self._leaf_perm_index(x, k, perm) for x in range(n)]
        ore = la.zeros(n, n)
        oim = la.zeros(n, n)
        for x in range(n):
            nx, sx = idx[x]
            for y in range(n):
                a, b = re[x][y], im[x][y]
                if a or b:
                    ny, sy = idx[y]
                    s = sx * sy
                    ore[nx][ny] = a * s
                    oim[nx][ny] = b * s
        return self.coords((ore, oim), A)

    def ket_state(self, vec, A):
        """|v><v| for a complex vector (re, im) given as tuples."""
        return self.coords(la.couter(vec, vec), A)

    # -- transformations -----------------------------------------------------
    def choi(self, T):
        return (T.data[0], T.data[1])

    def make(self, A, B, J, label="") -> TransfMap:
        return TransfMap.of(A, B, [J[0], J[1]], label)

    def identity(self, A):
        d = self.hdim(A)
        J = la.czeros(d * d, d * d)
        for i in range(d):
            for j in range(d):
                J[0][i * d + i][j * d + j] = ONE
        return self.make(A, A, J, "id")

    def _odd_sign(self, before):
        if not self.fermionic or not before:
            return None
        return [1 - 2 * parity(x) for x in range(self.hdim(before))]

    def apply_matrix(self, T, M, before, after):
        return apply_choi(
            self.choi(T), self.hdim(T.inp), self.hdim(T.out), M,
            self.hdim(before), self.hdim(after), self._odd_sign(before),
        )

    def apply_at(self, T, psi, before, after):
        M = self.mat(psi, tuple(before) + tuple(T.inp) + tuple(after))
        out = self.apply_matrix(T, M, before, after)
        return self.coords(out, tuple(before) + tuple(T.out) + tuple(after))

    def apply_dual_at(self, T, e, before, after):
        E = self.mat(e, tuple(before) + tuple(T.out) + tuple(after))
        Jd = dual_choi(self.choi(T), self.hdim(T.inp), self.hdim(T.out))
        out = apply_choi(
            Jd, self.hdim(T.out), self.hdim(T.inp), E,
            self.hdim(before), self.hdim(after), self._odd_sign(before),
        )
        return self.coords(out, tuple(before) + tuple(T.inp) + tuple(after))

    def seq(self, T2, T1):
        if T2.inp != T1.out:
            raise la.DimensionError("sequential composition: wire types differ")
        J = apply_choi(
            self.choi(T2), self.hdim(T2.inp), self.hdim(T2.out), self.choi(T1),
            1, self.hdim(T1.inp), None,
        )
        return self.make(T1.inp, T2.out, J)

    def par(self, T1, T2):
        d1, d2 = self.hdim(T1.inp), self.hdim(T2.inp)
        n = d1 * d2 * d1 * d2
        Phi = la.czeros(n, n)
        idx = [((i * d2 + j) * d1 + i) * d2 + j for i in range(d1) for j in range(d2)]
        for r in idx:
            for c in idx:
                Phi[0][r][c] = ONE
        step = apply_choi(self.choi(T1), d1, self.hdim(T1.out), Phi, 1, d2 * d1 * d2, None)
        J = apply_choi(
            self.choi(T2), d2, self.hdim(T2.out), step,
            self.hdim(T1.out), d1 * d2, self._odd_sign(T1.out),
        )
        return self.make(tuple(T1.inp) + tuple(T2.inp), tuple(T1.out) + tuple(T2.out), J)

    def transf_coords(self, T):
        return self.choi_space(T.inp, T.out).to_coords(self.choi(T))

    def transf_from_coords(self, A, B, v):
        return self.make(A, B, self.choi_space(A, B).from_coords(tuple(v)))

    def transf_cone(self, A, B):
        return self.memo(("tcone", tuple(A), tuple(B)), lambda: PSDCone(self.choi_space(A, B)))

    def transf_span_basis(self, A, B):
        sp = self.choi_space(A, B)
        out = []
        for k in range(sp.dim):
            v = [ZERO] * sp.dim
            v[k] = ONE
            out.append(self.transf_from_coords(A, B, v))
        return out

    def prep_map(self, rho, A):
        return self.make(TRIVIAL, A, self.mat(rho, A))

    def effect_map(self, e, A):
        E = self.mat(e, A)
        return self.make(A, TRIVIAL, (E[0], la.mscale(-ONE, E[1])))

    def map_state(self, T):
        return self.coords(self.choi(T), T.out)

    def map_effect(self, T):
        J = self.choi(T)
        return self.coords((J[0], la.mscale(-ONE, J[1])), T.inp)

    def max_entangled(self, A):
        """Normalised |Phi><Phi| on A*A with |Phi> = sum_i |ii>."""
        d = self.hdim(A)
        n = d * d
        M = la.czeros(n, n)
        for i in range(d):
            for j in range(d):
                M[0][i * d + i][j * d + j] = q(1, d)
        return self.coords(M, tuple(A) + tuple(A))

    def witnesses(self, A):
        return self.memo(("wit", tuple(A)), lambda: [(tuple(A), self.max_entangled(A))])

    def kraus(self, A, B, ops, label="") -> TransfMap:
        """Map with Kraus operators ``ops`` (complex dout x din matrices)."""
        n = self.hdim(A) * self.hdim(B)
        J = la.czeros(n, n)
        for K in ops:
            v = vec_choi(K)
            J = la.cadd(J, la.couter(v, v))
        return self.make(A, B, J, label)

    def unitary(self, U, A, label=""):
        return self.kraus(A, A, [U], label)

    # -- probes and samples ----------------------------------------------------
    def _sector_ok(self, k, l):
        return not self.fermionic or parity(k) == parity(l)

    def basis_vec(self, n, k):
        v = [ZERO] * n
        v[k] = ONE
        return (tuple(v), (ZERO,) * n)

    def superposition(self, n, k, l, phase_i=False):
        re = [ZERO] * n
        im = [ZERO] * n
        re[k] = ONE
        if phase_i:
            im[l] = ONE
        else:
            re[l] = ONE
        return (tuple(re), tuple(im))

    def probe_states(self, A, C):
        key = ("probes", tuple(A), tuple(C))
        return self.memo(key, lambda: self._probes(A, C))

    def _probes(self, A, C):
        AC = tuple(A) + tuple(C)
        n = self.hdim(AC)
        out = []
        for k in range(n):
            out.append(self.ket_state(self.basis_vec(n, k), AC))
        pairs = [(k, l) for k in range(n) for l in range(k + 1, n) if self._sector_ok(k, l)]
        stride = max(1, len(pairs) // 24)
        for k, l in pairs[::stride]:
            for ph in ((False,) if self.real else (False, True)):
                v = self.superposition(n, k, l, ph)
                out.append(tuple(x / 2 for x in self.ket_state(v, AC)))
        if tuple(C[: len(A)]) == tuple(A):
            rest = tuple(C[len(A):])
            phi = self.max_entangled(A)
            if rest:
                r0 = self.ket_state(self.basis_vec(self.hdim(rest), 0), rest)
                phi = self.product_state(phi, tuple(A) + tuple(A), r0, rest)
            out.append(phi)
        return out

    def _rand_vec(self, n, rng, sector=None):
        while True:
            re = []
            im = []
            for k in range(n):
                if sector is not None and parity(k) != sector:
                    re.append(ZERO)
                    im.append(ZERO)
                    continue
                re.append(q(rng.randint(-2, 2)))
                im.append(ZERO if self.real else q(rng.randint(-2, 2)))
            if any(re) or any(im):
                return (tuple(re), tuple(im))

    def sample_states(self, A, rng: random.Random, count: int) -> list:
        n = self.hdim(A)
        out = []
        for _ in range(count):
            sector = rng.randint(0, 1) if self.fermionic else None
            M = la.czeros(n, n)
            for _ in range(rng.randint(1, 3)):
                v = self._rand_vec(n, rng, sector)
                M = la.cadd(M, la.couter(v, v))
            tr = la.trace(M[0])
            out.append(self.coords(la.cscale(ONE / tr, M), A))
        return out

    def sample_effects(self, A, rng: random.Random, count: int) -> list:
        n = self.hdim(A)
        out = []
        for _ in range(count):
            M = la.czeros(n, n)
            for _ in range(rng.randint(1, 2)):
                sector = rng.randint(0, 1) if self.fermionic else None
                v = self._rand_vec(n, rng, sector)
                M = la.cadd(M, la.couter(v, v))
            tr = la.trace(M[0])
            t = q(rng.randint(1, 4), 4)
            out.append(self.coords(la.cscale(t / tr, M), A))
        return out

    def _rand_kraus(self, din, dout, rng, par_bit=None):
        re = la.zeros(dout, din)
        im = la.zeros(dout, din)
        for b in range(dout):
            for i in range(din):
                if par_bit is not None and (parity(b) + parity(i)) & 1 != par_bit:
                    continue
                re[b][i] = q(rng.randint(-2, 2))
                if not self.real:
                    im[b][i] = q(rng.randint(-2, 2))
        return (re, im)

    def sample_transformations(self, A, B, rng: random.Random, count: int) -> list:
        din, dout = self.hdim(A), self.hdim(B)
        out = []
        while len(out) < count:
            ops = []
            for _ in range(rng.randint(1, 2)):
                par_bit = rng.randint(0, 1) if self.fermionic else None
                ops.append(self._rand_kraus(din, dout, rng, par_bit))
            T = self.kraus(A, B, ops)
            if T.is_zero():
                continue
            # Tr sum K^dag K bounds the largest eigenvalue of the effect u o T
            tot = ZERO
            for K in ops:
                tot += sum((x * x for row in K[0] for x in row), ZERO)
                tot += sum((x * x for row in K[1] for x in row), ZERO)
            out.append(T.scale(ONE / tot))
        return out

    # -- purification ------------------------------------------------------------
    def purify(self, rho, A):
        """(ancilla, pure dilation) of rho built from an exact LDL factorisation.

        Each pivot D_k is a sum of rational squares s_m^2, so
        psi = sum_k sum_m s_m |l_k>|j_km> has rational entries; for
        Fermionic systems the ancilla index j_km carries the parity of
        l_k's sector, making psi parity-definite.
        """
        M = self.mat(rho, A)
        piv = ldl_hermitian(M)
        if piv is None:
            return None
        terms = []
        for D, l in piv:
            sec = parity(next(i for i, (a, b) in enumerate(zip(*l)) if a or b)) if self.fermionic else 0
            for sm in rational_sqrt_terms(D):
                terms.append((sm, l, sec))
        need = [sum(1 for t in terms if t[2] == b) for b in (0, 1)]
        m = 1
        while True:
            nb = self.leaf_d ** m
            if self.fermionic:
                ok = nb // 2 >= max(need)
            else:
                ok = nb >= len(terms)
            if ok:
                break
            m += 1
        B = (self.leaf,) * m
        nb = self.leaf_d ** m
        free = {0: [j for j in range(nb) if not self.fermionic or parity(j) == 0],
                1: [j for j in range(nb) if self.fermionic and parity(j) == 1]}
        na = self.hdim(A)
        vr = [ZERO] * (na * nb)
        vi = [ZERO] * (na * nb)
        used = {0: 0, 1: 0}
        for sm, (lr, li), sec in terms:
            key = sec if self.fermionic else 0
            j = free[key][used[key]]
            used[key] += 1
            for i in range(na):
                if lr[i] or li[i]:
                    vr[i * nb + j] += sm * lr[i]
                    vi[i * nb + j] += sm * li[i]
        psi = (tuple(vr), tuple(vi))
        return B, self.ket_state(psi, tuple(A) + B)

    # -- catalog helpers ---------------------------------------------------------
    def projector(self, n, ks):
        P = la.czeros(n, n)
        for k in ks:
            P[0][k][k] = ONE
        return P

    def lueders(self, A, projs, labels, name):
        from ..core import TestSpec

        return TestSpec.of([self.kraus(A, A, [P]) for P in projs], labels, name)

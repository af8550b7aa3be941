"""Theories whose composite spaces are tensor products of local ones.

States and effects are coordinate vectors, pairing is the dot product and
a transformation ``A -> B`` is a ``dim(B) x dim(A)`` matrix acting as
``M x id`` on dilated states (composites use Kronecker ordering).
"""

from __future__ import annotations

import itertools
import random
from typing import List, Optional

from .. import linalg as la
from ..cones import ConeV, cone_member, minimal_face
from ..core import TransfMap
from ..rational import ONE, ZERO, q
from ..systems import TRIVIAL, SystemId
from ..theory import PolyCone, TheoryModel


class VectorTheory(TheoryModel):
    leaf_dim = 2

    # -- leaf data supplied by subclasses ------------------------------------
    def leaf_unit(self) -> tuple:
        raise NotImplementedError

    def leaf_pure_states(self) -> list:
        raise NotImplementedError

    def leaf_effect_generators(self) -> list:
        raise NotImplementedError

    # -- spaces --------------------------------------------------------------
    def dim(self, A):
        return self.leaf_dim ** len(A)

    def pair(self, e, rho, A):
        return la.dot(e, rho)

    def unit_effect(self, A):
        u = (ONE,)
        for _ in A:
            u = la.kron_vec(u, self.leaf_unit())
        return u

    def _kron_all(self, factors):
        v = (ONE,)
        for f in factors:
            v = la.kron_vec(v, f)
        return v

    def product_state(self, rho, A, sigma, B):
        return la.kron_vec(rho, sigma)

    def product_effect(self, a, A, b, B):
        return la.kron_vec(a, b)

    def discard(self, psi, A, B, e):
        dA, dB = self.dim(A), self.dim(B)
        if len(psi) != dA * dB or len(e) != dB:
            raise la.DimensionError("discard: dimension mismatch")
        return tuple(
            sum((psi[a * dB + b] * e[b] for b in range(dB) if e[b]), ZERO) for a in range(dA)
        )

    def effect_marginal(self, c, A, B, omega):
        return self.discard(c, A, B, omega)

    def product_pure_states(self, A) -> list:
        """Products of leaf pure states (always states of any composite)."""
        out = []
        for combo in itertools.product(self.leaf_pure_states(), repeat=len(A)):
            out.append(self._kron_all(combo))
        return out

    def probe_states(self, A, C):
        sysAC = tuple(A) + tuple(C)
        pure = self.pure_states(sysAC) if len(sysAC) <= 2 else None
        if pure is not None:
            return pure
        left = self.pure_states(A) if len(A) <= 2 else self.product_pure_states(A)
        right = self.pure_states(C) if len(C) <= 2 else self.product_pure_states(C)
        return [la.kron_vec(a, c) for a in left for c in right]

    def sample_states(self, A, rng: random.Random, count: int) -> list:
        pure = self.pure_states(A) or self.product_pure_states(A)
        out = []
        for _ in range(count):
            k = rng.randint(1, min(3, len(pure)))
            picks = rng.sample(range(len(pure)), k)
            w = [q(rng.randint(1, 5)) for _ in picks]
            tot = sum(w, ZERO)
            out.append(la.vsum([la.vscale(x / tot, pure[i]) for x, i in zip(w, picks)], self.dim(A)))
        return out

    def sample_effects(self, A, rng: random.Random, count: int) -> list:
        gens = self.effect_vertices(A)
        out = []
        for _ in range(count):
            k = rng.randint(1, min(3, len(gens)))
            picks = rng.sample(range(len(gens)), k)
            w = [q(rng.randint(1, 5)) for _ in picks]
            tot = sum(w, ZERO) + rng.randint(0, 3)
            out.append(la.vsum([la.vscale(x / tot, gens[i]) for x, i in zip(w, picks)], self.dim(A)))
        return out

    def effect_vertices(self, A) -> list:
        """Effects e with 0 <= e <= u used for sampling (products of leaf ones)."""
        leaf = list(self.leaf_effect_vertices())
        out = []
        for combo in itertools.product(leaf, repeat=len(A)):
            out.append(self._kron_all(combo))
        return out

    def leaf_effect_vertices(self) -> list:
        return [self.leaf_unit()] + list(self.leaf_effect_generators())

    # -- transformations -----------------------------------------------------
    def matrix(self, T: TransfMap):
        return T.data[0]

    def make(self, A, B, M, label="") -> TransfMap:
        return TransfMap.of(A, B, [M], label)

    def identity(self, A):
        return self.make(A, A, la.eye(self.dim(A)), "id")

    def apply_at(self, T, psi, before, after):
        M = self.matrix(T)
        p, s = self.dim(before), self.dim(after)
        din, dout = self.dim(T.inp), self.dim(T.out)
        if len(psi) != p * din * s:
            raise la.DimensionError(
                f"state of length {len(psi)} does not fit {p}x{din}x{s}"
            )
        out = [ZERO] * (p * dout * s)
        cols = [[(b, M[b][i]) for b in range(dout) if M[b][i]] for i in range(din)]
        for x in range(p):
            for i in range(din):
                base_in = (x * din + i) * s
                nz = cols[i]
                if not nz:
                    continue
                for y in range(s):
                    v = psi[base_in + y]
                    if not v:
                        continue
                    for b, m in nz:
                        out[(x * dout + b) * s + y] += m * v
        return tuple(out)

    def apply_dual_at(self, T, e, before, after):
        M = self.matrix(T)
        p, s = self.dim(before), self.dim(after)
        din, dout = self.dim(T.inp), self.dim(T.out)
        if len(e) != p * dout * s:
            raise la.DimensionError("effect does not fit the output system")
        out = [ZERO] * (p * din * s)
        for x in range(p):
            for i in range(din):
                for y in range(s):
                    acc = ZERO
                    for b in range(dout):
                        m = M[b][i]
                        if m:
                            v = e[(x * dout + b) * s + y]
                            if v:
                                acc += m * v
                    out[(x * din + i) * s + y] = acc
        return tuple(out)

    def seq(self, T2, T1):
        if T2.inp != T1.out:
            raise la.DimensionError("sequential composition: wire types differ")
        return self.make(T1.inp, T2.out, la.matmul(self.matrix(T2), self.matrix(T1)))

    def par(self, T1, T2):
        return self.make(
            T1.inp + T2.inp, T1.out + T2.out, la.kron(self.matrix(T1), self.matrix(T2))
        )

    def permute_leaves(self, v, k, perm):
        """Reorder the k elementary factors of v: new slot p holds old factor perm[p]."""
        d = self.leaf_dim
        out = [ZERO] * (d ** k)
        for idx, x in enumerate(v):
            if not x:
                continue
            digits = []
            t = idx
            for _ in range(k):
                t, r = divmod(t, d)
                digits.append(r)
            digits.reverse()
            new = 0
            for p in range(k):
                new = new * d + digits[perm[p]]
            out[new] = x
        return tuple(out)

    def swap(self, A, B):
        dA, dB = self.dim(A), self.dim(B)
        M = la.zeros(dA * dB, dA * dB)
        for a in range(dA):
            for b in range(dB):
                M[b * dA + a][a * dB + b] = ONE
        return self.make(tuple(A) + tuple(B), tuple(B) + tuple(A), M, "swap")

    def transf_coords(self, T):
        return la.flatten(self.matrix(T))

    def transf_from_coords(self, A, B, v):
        return self.make(A, B, la.unflatten(tuple(v), self.dim(B), self.dim(A)))

    def transf_span_basis(self, A, B):
        dA, dB = self.dim(A), self.dim(B)
        out = []
        for b in range(dB):
            for a in range(dA):
                M = la.zeros(dB, dA)
                M[b][a] = ONE
                out.append(self.make(A, B, M))
        return out

    def prep_map(self, rho, A):
        return self.make(TRIVIAL, A, [[x] for x in rho])

    def effect_map(self, e, A):
        return self.make(A, TRIVIAL, [list(e)])

    def map_state(self, T):
        """Inverse of prep_map."""
        return tuple(row[0] for row in self.matrix(T))

    def map_effect(self, T):
        return tuple(self.matrix(T)[0])

    def witnesses(self, A):
        return [(TRIVIAL, s) for s in self.product_pure_states(A)]

    def transf_cone(self, A, B):
        if not A:
            return self.state_cone(B)
        if not B:
            return self.effect_cone(A)
        return self.memo(("tcone", A, B), lambda: self._transf_cone(A, B))

    def _transf_cone(self, A, B):
        raise NotImplementedError

    # -- random admissible maps -------------------------------------------------
    def sample_transformations(self, A, B, rng: random.Random, count: int) -> list:
        cone = self.transf_cone(A, B)
        gens = cone.generators
        out = []
        uA = self.unit_effect(A)
        for _ in range(count):
            k = rng.randint(1, min(4, len(gens)))
            picks = rng.sample(range(len(gens)), k)
            coords = la.vsum(
                [la.vscale(q(rng.randint(1, 4)), gens[i]) for i in picks], cone.ambient_dim
            )
            T = self.transf_from_coords(A, B, coords)
            # scale into a trace-non-increasing event
            back = self.apply_dual_at(T, self.unit_effect(B), TRIVIAL, TRIVIAL)
            worst = ZERO
            for s in self.pure_states(A) or self.product_pure_states(A):
                worst = max(worst, la.dot(back, s))
            if worst > 1:
                T = T.scale(ONE / worst)
            out.append(T)
        return out


def permutation_matrix(perm) -> list:
    n = len(perm)
    M = la.zeros(n, n)
    for i, p in enumerate(perm):
        M[p][i] = ONE
    return M


def simplex_cone(d: int) -> ConeV:
    return ConeV(d, [la.unit_vector(d, i) for i in range(d)])

"""Classical theory on n-level systems and its deterministic restriction."""

from __future__ import annotations

import itertools
import random

from .. import linalg as la
from ..core import TestSpec
from ..rational import ONE, ZERO, q
from ..systems import TRIVIAL
from ..theory import FaceInfo, PolyCone
from .vector import VectorTheory, permutation_matrix, simplex_cone


class Classical(VectorTheory):
    kind = "Classical"
    leaf = "C"

    def __init__(self, n: int = 2):
        if n < 2:
            raise ValueError("classical systems need n >= 2")
        super().__init__()
        self.n = n
        self.leaf_dim = n
        self.name = f"classical{n}"

    @property
    def params(self):
        return {"n": self.n}

    def registered_systems(self):
        return [(self.leaf,), (self.leaf, self.leaf)]

    def leaf_unit(self):
        return (ONE,) * self.n

    def leaf_pure_states(self):
        return [la.unit_vector(self.n, i) for i in range(self.n)]

    def leaf_effect_generators(self):
        return [la.unit_vector(self.n, i) for i in range(self.n)]

    def pure_states(self, A):
        d = self.dim(A)
        return [la.unit_vector(d, i) for i in range(d)]

    def state_cone(self, A):
        return self.memo(("scone", A), lambda: PolyCone(simplex_cone(self.dim(A))))

    def effect_cone(self, A):
        return self.state_cone(A)

    def effect_vertices(self, A):
        d = self.dim(A)
        # all 0/1 indicator effects
        out = []
        for bits in itertools.product((ZERO, ONE), repeat=d):
            out.append(tuple(bits))
        return out

    def _transf_cone(self, A, B):
        return PolyCone(simplex_cone(self.dim(A) * self.dim(B)))

    # -- catalogs --------------------------------------------------------------
    def reversibles(self, A):
        return self.memo(("rev", A), lambda: self._reversibles(A))

    def _reversibles(self, A):
        k = len(A)
        n = self.n
        local = [permutation_matrix(p) for p in itertools.permutations(range(n))]
        if k == 1:
            return [self.make(A, A, M, f"perm{i}") for i, M in enumerate(local)]
        mats = []
        seen = set()
        swap = self.matrix(self.swap(A[:1], A[1:]))
        for combo in itertools.product(local, repeat=k):
            M = combo[0]
            for f in combo[1:]:
                M = la.kron(M, f)
            for cand in (M, la.matmul(swap, M)) if k == 2 else (M,):
                key = la.flatten(cand)
                if key not in seen:
                    seen.add(key)
                    mats.append(cand)
        return [self.make(A, A, M, f"rev{i}") for i, M in enumerate(mats)]

    def _diag(self, d, entries):
        M = la.zeros(d, d)
        for i, x in enumerate(entries):
            M[i][i] = q(x)
        return M

    def test_catalog(self, A):
        return self.memo(("catalog", A), lambda: self._catalog(A))

    def _readout(self, A, d):
        return TestSpec.of(
            [self.make(A, A, self._diag(d, [1 if j == i else 0 for j in range(d)])) for i in range(d)],
            [str(i) for i in range(d)],
            "readout",
        )

    def _catalog(self, A):
        d = self.dim(A)
        I = self.identity(A)
        tests = [
            TestSpec.of([I], ["id"], "identity"),
            TestSpec.of([I.scale(q(1, 2)), I.scale(q(1, 2))], ["a", "b"], "halves"),
            TestSpec.of([I.scale(q(1, 3)), I.scale(q(2, 3))], ["a", "b"], "thirds"),
            self._readout(A, d),
            TestSpec.of(
                [
                    self.make(A, A, self._diag(d, [1] + [0] * (d - 1))),
                    self.make(A, A, self._diag(d, [0] + [1] * (d - 1))),
                ],
                ["0", "rest"],
                "coarse-readout",
            ),
            TestSpec.of(
                [
                    self.make(A, A, self._diag(d, [q(2, 3)] + [q(1, 3)] * (d - 1))),
                    self.make(A, A, self._diag(d, [q(1, 3)] + [q(2, 3)] * (d - 1))),
                ],
                ["0", "1"],
                "noisy-readout",
            ),
        ]
        reset = []
        for k in range(d):
            M = la.zeros(d, d)
            M[0][k] = ONE
            reset.append(self.make(A, A, M))
        tests.append(TestSpec.of(reset, [str(k) for k in range(d)], "measure-prepare"))
        cyc = permutation_matrix([(i + 1) % d for i in range(d)])
        tests.append(TestSpec.of([self.make(A, A, cyc)], ["shift"], "shift"))
        return tests


class DetClassical(Classical):
    """Classical systems where every event has 0/1 probabilities.

    States are the point masses, transformations are partial functions
    (0/1 matrices with at most one 1 per column) and a test is a family
    of such maps summing to a function.  Refinement and coexistence are
    decided against this catalog, not by cone order.
    """

    kind = "DetClassical"
    leaf = "D"
    convex = False
    no_restriction = False

    def __init__(self, n: int = 2):
        super().__init__(n)
        self.name = f"detclassical{n}"

    @staticmethod
    def is_submap(M) -> bool:
        cols = len(M[0]) if M else 0
        for j in range(cols):
            ones = 0
            for row in M:
                x = row[j]
                if x == 1:
                    ones += 1
                elif x != 0:
                    return False
            if ones > 1:
                return False
        return True

    @staticmethod
    def is_function(M) -> bool:
        cols = len(M[0]) if M else 0
        for j in range(cols):
            col = [row[j] for row in M]
            if sorted(col) != [0] * (len(col) - 1) + [1]:
                return False
        return True

    def in_transf_cone(self, T):
        return self.is_submap(self.matrix(T))

    def is_deterministic(self, T):
        return self.is_function(self.matrix(T))

    def refines(self, D, C):
        return self.is_submap(self.matrix(D)) and self.is_submap(self.matrix(C - D))

    def coexistent(self, A, B):
        return self.in_transf_cone(A) and self.in_transf_cone(B) and self.is_submap(self.matrix(A + B))

    def face_info(self, T):
        M = self.matrix(T)
        if not self.is_submap(M):
            raise ValueError("not an event of the deterministic classical theory")
        gens = []
        for b, row in enumerate(M):
            for a, x in enumerate(row):
                if x:
                    E = la.zeros(len(M), len(row))
                    E[b][a] = ONE
                    gens.append(self.make(T.inp, T.out, E))
        basis = tuple(self.transf_coords(g) for g in gens)
        return FaceInfo(len(gens), basis, tuple(gens), "catalog")

    def sample_states(self, A, rng, count):
        pure = self.pure_states(A)
        return [pure[rng.randrange(len(pure))] for _ in range(count)]

    def sample_effects(self, A, rng, count):
        d = self.dim(A)
        return [tuple(q(rng.randint(0, 1)) for _ in range(d)) for _ in range(count)]

    def sample_transformations(self, A, B, rng, count):
        dA, dB = self.dim(A), self.dim(B)
        out = []
        for _ in range(count):
            M = la.zeros(dB, dA)
            for a in range(dA):
                t = rng.randrange(dB + 1)
                if t < dB:
                    M[t][a] = ONE
            out.append(self.make(A, B, M))
        return out

    def _catalog(self, A):
        d = self.dim(A)
        I = self.identity(A)
        tests = [
            TestSpec.of([I], ["id"], "identity"),
            self._readout(A, d),
            TestSpec.of(
                [
                    self.make(A, A, self._diag(d, [1] + [0] * (d - 1))),
                    self.make(A, A, self._diag(d, [0] + [1] * (d - 1))),
                ],
                ["0", "rest"],
                "coarse-readout",
            ),
        ]
        reset = []
        for k in range(d):
            M = la.zeros(d, d)
            M[0][k] = ONE
            reset.append(self.make(A, A, M))
        tests.append(TestSpec.of(reset, [str(k) for k in range(d)], "measure-prepare"))
        cyc = permutation_matrix([(i + 1) % d for i in range(d)])
        tests.append(TestSpec.of([self.make(A, A, cyc)], ["shift"], "shift"))
        return tests

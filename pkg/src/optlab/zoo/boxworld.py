"""Box world: squits (square state spaces) with maximal or minimal composites.

The single squit has states ``(1, x, y)`` with ``|x|, |y| <= 1`` and unit
effect ``(1, 0, 0)``.  The maximal composite admits every vector that is
nonnegative on product effects (this includes the PR boxes); the minimal
composite keeps only mixtures of product states.  Effects are products
in both variants.
"""

from __future__ import annotations

import itertools

from .. import linalg as la
from ..cones import ConeH, ConeV, cone_member, h_to_v, minimal_face
from ..core import TestSpec
from ..rational import ONE, ZERO, q
from ..systems import TRIVIAL
from ..theory import PolyCone
from .vector import VectorTheory

HALF = q(1, 2)


class HConeAdapter:
    """Membership-only cone given by inequalities (used beyond the DD cap)."""

    kind = "inequalities"

    def __init__(self, H: ConeH):
        self.H = H
        self.ambient_dim = H.ambient_dim

    def contains(self, v):
        return self.H.contains(v)

    def face(self, v, candidates=None):
        raise NotImplementedError("faces are only computed for generator-described cones")


def _signed_perms():
    out = []
    for perm in ((0, 1), (1, 0)):
        for sx in (ONE, -ONE):
            for sy in (ONE, -ONE):
                P = la.zeros(2, 2)
                P[0][perm[0]] = sx
                P[1][perm[1]] = sy
                out.append(P)
    return out


class BoxWorld(VectorTheory):
    leaf = "S"
    leaf_dim = 3
    no_restriction = False

    def __init__(self, variant: str = "max"):
        if variant not in ("max", "min"):
            raise ValueError("variant must be 'max' or 'min'")
        super().__init__()
        self.variant = variant
        self.name = f"prbox-{variant}"
        self.kind = "PRBoxMax" if variant == "max" else "PRBoxMin"

    @property
    def params(self):
        return {"variant": self.variant}

    def registered_systems(self):
        return [(self.leaf,), (self.leaf, self.leaf)]

    # -- leaf ----------------------------------------------------------------
    def leaf_unit(self):
        return (ONE, ZERO, ZERO)

    def leaf_pure_states(self):
        return [(ONE, q(x), q(y)) for x in (1, -1) for y in (1, -1)]

    def leaf_effect_generators(self):
        return [
            (HALF, HALF, ZERO),
            (HALF, -HALF, ZERO),
            (HALF, ZERO, HALF),
            (HALF, ZERO, -HALF),
        ]

    def leaf_effect_vertices(self):
        return [(ZERO, ZERO, ZERO), self.leaf_unit()] + self.leaf_effect_generators()

    # -- cones ---------------------------------------------------------------
    def product_effects(self, A):
        out = []
        for combo in itertools.product(self.leaf_effect_generators(), repeat=len(A)):
            out.append(self._kron_all(combo))
        return out

    def effect_cone(self, A):
        return self.memo(("econe", A), lambda: PolyCone(ConeV(self.dim(A), self.product_effects(A))))

    def state_cone(self, A):
        return self.memo(("scone", A), lambda: self._state_cone(A))

    def _state_cone(self, A):
        d = self.dim(A)
        if not A:
            return PolyCone(ConeV(1, [(ONE,)]))
        if self.variant == "min" or len(A) == 1:
            return PolyCone(ConeV(d, self.product_pure_states(A)))
        if len(A) == 2:
            return PolyCone(h_to_v(ConeH(d, self.product_effects(A))))
        return HConeAdapter(ConeH(d, self.product_effects(A)))

    def pure_states(self, A):
        if len(A) > 2:
            return self.product_pure_states(A) if self.variant == "min" else None
        cone = self.state_cone(A)
        u = self.unit_effect(A)
        return [la.vscale(ONE / la.dot(u, g), g) for g in cone.generators]

    def pr_boxes(self):
        """Pure states of the maximal two-squit composite that are not products."""
        A = (self.leaf, self.leaf)
        prods = {tuple(p) for p in self.product_pure_states(A)}
        return [s for s in self.pure_states(A) if tuple(s) not in prods]

    # -- transformations ------------------------------------------------------
    def positive_map_cone(self) -> ConeV:
        """Maps of one squit sending states to states (rows of M flattened)."""
        def build():
            ineqs = []
            for f in self.leaf_effect_generators():
                for s in self.leaf_pure_states():
                    ineqs.append(tuple(f[b] * s[a] for b in range(3) for a in range(3)))
            return h_to_v(ConeH(9, ineqs))
        return self.memo("posmaps", build)

    def _transf_cone(self, A, B):
        S = (self.leaf,)
        if A == S and B == S:
            return PolyCone(self.positive_map_cone())
        gens = []
        seen = set()

        def add(M):
            v = la.flatten(M)
            key = la.primitive(v)
            if not la.is_zero(v) and key not in seen:
                seen.add(key)
                gens.append(v)

        if A == B and len(A) == 2:
            # products of local admissible maps, with and without a swap;
            # the identity is one of the local generators, so this covers
            # the reversibles and the one-sided local maps
            swap = self.matrix(self.swap(A[:1], A[1:]))
            local = [la.unflatten(g, 3, 3) for g in self.positive_map_cone().generators]
            for M in local:
                for N in local:
                    P = la.kron(M, N)
                    add(P)
                    add(la.matmul(swap, P))
        states = self.pure_states(B) or self.product_pure_states(B)
        for s in states:
            for e in self.product_effects(A):
                add([[x * y for y in e] for x in s])
        return PolyCone(ConeV(self.dim(A) * self.dim(B), gens))

    def face_candidates(self, T):
        """Generators g with g(psi) inside the face of T(psi) for every pure psi."""
        cone = self.transf_cone(T.inp, T.out)
        if not isinstance(cone, PolyCone) or len(cone.generators) <= 48:
            return None
        pure = self.pure_states(T.inp)
        scone = self.state_cone(T.out)
        if pure is None or not isinstance(scone, PolyCone):
            return None
        targets = []
        for psi in pure:
            img = self.apply_at(T, psi, TRIVIAL, TRIVIAL)
            if la.is_zero(img):
                targets.append(("zero", None))
                continue
            if la.primitive(img) in self._extreme_keys(T.out):
                targets.append(("ray", img))
                continue
            f = minimal_face(scone.cone, img)
            if f.dim == 1:
                targets.append(("ray", img))
            else:
                targets.append(("face", ConeV(scone.ambient_dim, f.generators())))
        images = self.memo(
            ("gen-images", T.inp, T.out),
            lambda: [
                [self.apply_at(self.transf_from_coords(T.inp, T.out, g), psi, TRIVIAL, TRIVIAL) for psi in pure]
                for g in cone.generators
            ],
        )
        keep = []
        for gi, imgs in enumerate(images):
            ok = True
            for (kind, data), img in zip(targets, imgs):
                if kind == "zero":
                    ok = la.is_zero(img)
                elif kind == "ray":
                    c = la.proportional_factor(img, data)
                    ok = c is not None and c >= 0
                else:
                    ok = cone_member(data, img)
                if not ok:
                    break
            if ok:
                keep.append(gi)
        return keep

    def _extreme_keys(self, A):
        """Primitive forms of the (irredundant) state-cone generators."""
        return self.memo(
            ("extreme-keys", A),
            lambda: {la.primitive(g) for g in self.state_cone(A).generators},
        )

    def reversibles(self, A):
        return self.memo(("rev", A), lambda: self._reversibles(A))

    def _reversibles(self, A):
        local = []
        for P in _signed_perms():
            M = la.zeros(3, 3)
            M[0][0] = ONE
            for i in range(2):
                for j in range(2):
                    M[1 + i][1 + j] = P[i][j]
            local.append(M)
        if len(A) == 1:
            return [self.make(A, A, M, f"d8_{i}") for i, M in enumerate(local)]
        if len(A) != 2:
            raise NotImplementedError("reversible catalog is modelled for one and two squits")
        swap = self.matrix(self.swap(A[:1], A[1:]))
        out = []
        for i, (U, V) in enumerate(itertools.product(local, repeat=2)):
            M = la.kron(U, V)
            out.append(self.make(A, A, M, f"loc{i}"))
            out.append(self.make(A, A, la.matmul(swap, M), f"swp{i}"))
        return out

    def test_catalog(self, A):
        return self.memo(("catalog", A), lambda: self._catalog(A))

    def _catalog(self, A):
        I = self.identity(A)
        d = self.dim(A)
        tests = [
            TestSpec.of([I], ["id"], "identity"),
            TestSpec.of([I.scale(HALF), I.scale(HALF)], ["a", "b"], "halves"),
            TestSpec.of([I.scale(q(1, 3)), I.scale(q(2, 3))], ["a", "b"], "thirds"),
        ]
        revs = self.reversibles(A)
        tests.append(
            TestSpec.of([revs[1].scale(HALF), revs[2].scale(HALF)], ["r1", "r2"], "random-reversible")
        )
        # read out the x coordinate of the first squit, prepare an edge state
        ex_p, ex_m = self.leaf_effect_generators()[0], self.leaf_effect_generators()[1]
        rest = A[1:]
        u_rest = self.unit_effect(rest)
        pure_rest = (self.pure_states(rest) or self.product_pure_states(rest))[0] if rest else (ONE,)
        ev = []
        for e, s in ((ex_p, (ONE, ONE, ZERO)), (ex_m, (ONE, -ONE, ZERO))):
            eff = la.kron_vec(e, u_rest)
            st = la.kron_vec(s, pure_rest)
            ev.append(self.make(A, A, [[x * y for y in eff] for x in st]))
        tests.append(TestSpec.of(ev, ["+", "-"], "x-measure-prepare"))
        # same readout, followed by a reset to a fixed vertex
        s0 = self.product_pure_states(A)[0]
        ev = []
        for e in (ex_p, ex_m):
            eff = la.kron_vec(e, u_rest)
            ev.append(self.make(A, A, [[x * y for y in eff] for x in s0]))
        tests.append(TestSpec.of(ev, ["+", "-"], "x-measure-reset"))
        return tests

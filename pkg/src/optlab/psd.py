"""Positive-semidefinite cones over block-structured Hermitian subspaces.

A :class:`HermSpace` is the real span of Hermitian (or real symmetric)
``n x n`` matrices whose nonzero entries sit only inside diagonal blocks
given by a sector label per index.  Coordinates use the orthogonal basis

* ``E_ii``                     (weight 1),
* ``X_ij = E_ij + E_ji``       (weight 2),
* ``Y_ij = -i E_ij + i E_ji``  (weight 2, complex spaces only),

so the Hilbert-Schmidt inner product is a weighted dot product.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence

from . import linalg as la
from .rational import ONE, ZERO, q


class HermSpace:
    def __init__(self, n: int, real: bool = False, sectors: Optional[Sequence] = None):
        self.n = n
        self.real = real
        self.sectors = tuple(sectors) if sectors is not None else (0,) * n
        basis = []
        for i in range(n):
            basis.append(("d", i, i))
        for i in range(n):
            for j in range(i + 1, n):
                if self.sectors[i] != self.sectors[j]:
                    continue
                basis.append(("x", i, j))
                if not real:
                    basis.append(("y", i, j))
        self.basis = tuple(basis)
        self.dim = len(basis)
        self.weights = tuple(ONE if k == "d" else q(2) for k, _, _ in basis)
        self.index = {b: t for t, b in enumerate(basis)}
        blocks = {}
        for i, s in enumerate(self.sectors):
            blocks.setdefault(s, []).append(i)
        self.blocks = [tuple(v) for _, v in sorted(blocks.items(), key=lambda kv: kv[0])]

    def __repr__(self):
        kind = "Sym" if self.real else "Herm"
        return f"{kind}Space(n={self.n}, dim={self.dim})"

    # ------------------------------------------------------------------
    def in_span(self, M) -> bool:
        re, im = M
        n = self.n
        if self.real and any(x != 0 for row in im for x in row):
            return False
        for i in range(n):
            if im[i][i] != 0:
                return False
            for j in range(i + 1, n):
                if re[i][j] != re[j][i] or im[i][j] != -im[j][i]:
                    return False
                if self.sectors[i] != self.sectors[j] and (re[i][j] != 0 or im[i][j] != 0):
                    return False
        return True

    def to_coords(self, M) -> tuple:
        if not self.in_span(M):
            raise ValueError("matrix is outside the allowed Hermitian subspace")
        re, im = M
        out = []
        for k, i, j in self.basis:
            if k == "d":
                out.append(re[i][i])
            elif k == "x":
                out.append(re[i][j])
            else:
                out.append(-im[i][j])
        return tuple(out)

    def from_coords(self, v):
        if len(v) != self.dim:
            raise la.DimensionError(f"{len(v)} coordinates for a space of dimension {self.dim}")
        n = self.n
        re = la.zeros(n, n)
        im = la.zeros(n, n)
        for (k, i, j), c in zip(self.basis, v):
            if not c:
                continue
            if k == "d":
                re[i][i] = c
            elif k == "x":
                re[i][j] = c
                re[j][i] = c
            else:
                im[i][j] = -c
                im[j][i] = c
        return (re, im)

    def pair(self, u, v):
        """Hilbert-Schmidt inner product tr(U V) in coordinates."""
        s = ZERO
        for w, a, b in zip(self.weights, u, v):
            if a and b:
                s += w * a * b
        return s

    def identity_coords(self) -> tuple:
        return tuple(ONE if k == "d" else ZERO for k, _, _ in self.basis)

    def block_of(self, M, block):
        re, im = M
        return (
            [[re[i][j] for j in block] for i in block],
            [[im[i][j] for j in block] for i in block],
        )


@dataclass(frozen=True)
class PSDFace:
    dim: int
    basis: tuple
    ranks: tuple


class PSDCone:
    """{X in the space : X >= 0}, decided exactly block by block."""

    kind = "psd"

    def __init__(self, space: HermSpace):
        self.space = space
        self.ambient_dim = space.dim

    def __repr__(self):
        return f"PSDCone({self.space!r})"

    def contains(self, v) -> bool:
        M = self.space.from_coords(tuple(q(x) for x in v))
        return self.contains_matrix(M)

    def contains_matrix(self, M) -> bool:
        if not self.space.in_span(M):
            return False
        for b in self.space.blocks:
            if not la.cis_psd(self.space.block_of(M, b)):
                return False
        return True

    def block_ranks(self, v) -> tuple:
        M = self.space.from_coords(v)
        return tuple(la.crank(self.space.block_of(M, b)) for b in self.space.blocks)

    def face_dim_formula(self, v) -> int:
        """Dimension of the minimal face from block ranks alone."""
        ranks = self.block_ranks(v)
        if self.space.real:
            return sum(r * (r + 1) // 2 for r in ranks)
        return sum(r * r for r in ranks)

    def face(self, v) -> PSDFace:
        """Minimal face at v: the matrices V H V^dagger with V spanning range(v)."""
        if not self.contains(v):
            raise ValueError("point is not in the PSD cone")
        sp = self.space
        n = sp.n
        M = sp.from_coords(v)
        basis = []
        ranks = []
        for b in sp.blocks:
            sub = sp.block_of(M, b)
            cols = la.ccolumn_space(sub)
            ranks.append(len(cols))
            # embed range vectors into the full index set
            vecs = []
            for cr, ci in cols:
                er = [ZERO] * n
                ei = [ZERO] * n
                for t, idx in enumerate(b):
                    er[idx] = cr[t]
                    ei[idx] = ci[t]
                vecs.append((tuple(er), tuple(ei)))
            r = len(vecs)
            for a in range(r):
                basis.append(sp.to_coords(la.couter(vecs[a], vecs[a])))
                for c in range(a + 1, r):
                    s = la.couter(vecs[a], vecs[c])
                    sd = la.couter(vecs[c], vecs[a])
                    basis.append(sp.to_coords(la.cadd(s, sd)))
                    if not sp.real:
                        # i(|a><c| - |c><a|)
                        diff = la.csub(s, sd)
                        basis.append(sp.to_coords((la.mscale(-ONE, diff[1]), diff[0])))
        basis = la.row_basis(basis)
        return PSDFace(len(basis), tuple(basis), tuple(ranks))

    def is_extreme(self, v) -> bool:
        return sum(self.block_ranks(v)) <= 1

"""Quantum theory over complex or real Hilbert spaces (d = 2, 3)."""

from __future__ import annotations

from .. import linalg as la
from ..core import TestSpec
from ..rational import ONE, ZERO, q
from ..theory import TheoryModel
from .operator import OperatorTheory, cayley, cmat_from

HALF = q(1, 2)


def _shift(n):
    re = la.zeros(n, n)
    for i in range(n):
        re[(i + 1) % n][i] = ONE
    return (re, la.zeros(n, n))


def _swap(d):
    n = d * d
    re = la.zeros(n, n)
    for a in range(d):
        for b in range(d):
            re[b * d + a][a * d + b] = ONE
    return (re, la.zeros(n, n))


class Quantum(OperatorTheory, TheoryModel):
    kind = "Quantum"
    leaf = "Q"
    real = False

    def __init__(self, d: int = 2):
        if d not in (2, 3):
            raise ValueError("quantum systems are modelled for d in {2, 3}")
        super().__init__()
        self.d = d
        self.leaf_d = d
        self.name = f"quantum{d}"

    @property
    def params(self):
        return {"d": self.d}

    def registered_systems(self):
        if self.d == 2:
            return [(self.leaf,), (self.leaf, self.leaf)]
        return [(self.leaf,)]

    # -- unitary catalog -------------------------------------------------------
    def _generator_hamiltonian(self, n):
        re = la.zeros(n, n)
        im = la.zeros(n, n)
        for i in range(n - 1):
            re[i][i + 1] = re[i + 1][i] = HALF
            if not self.real:
                im[i][i + 1] = q(1, 3)
                im[i + 1][i] = -q(1, 3)
        re[0][0] = q(1, 4)
        return (re, im)

    def _orthogonal_generator(self, n):
        # antisymmetric K, so (I - K)(I + K)^-1 is orthogonal
        K = la.zeros(n, n)
        for i in range(n - 1):
            K[i][i + 1] = HALF
            K[i + 1][i] = -HALF
        I = la.eye(n)
        O = la.matmul(la.msub(I, K), la.inverse(la.madd(I, K)))
        return (O, la.zeros(n, n))

    def _phase(self, n):
        re = la.zeros(n, n)
        im = la.zeros(n, n)
        for k in range(n):
            if self.real:
                re[k][k] = ONE if k % 2 == 0 else -ONE
            else:
                # i^k
                re[k][k], im[k][k] = [(ONE, ZERO), (ZERO, ONE), (-ONE, ZERO), (ZERO, -ONE)][k % 4]
        return (re, im)

    def unitary_generators(self, A):
        n = self.hdim(A)
        gens = [("shift", _shift(n)), ("phase", self._phase(n))]
        if self.real:
            gens.append(("rot", self._orthogonal_generator(n)))
        else:
            gens.append(("cayley", cayley(self._generator_hamiltonian(n))))
        if len(A) == 2:
            gens.append(("swap", _swap(self.leaf_d)))
        return gens

    def reversibles(self, A):
        return self.memo(("rev", tuple(A)), lambda: self._reversibles(A))

    def _reversibles(self, A):
        out = [self.identity(A)]
        for name, U in self.unitary_generators(A):
            out.append(self.unitary(U, A, name))
            out.append(self.unitary(la.cdagger(U), A, name + "^-1"))
        return out

    # -- tests -----------------------------------------------------------------
    def test_catalog(self, A):
        return self.memo(("catalog", tuple(A)), lambda: self._catalog(A))

    def _catalog(self, A):
        n = self.hdim(A)
        I = self.identity(A)
        tests = [
            TestSpec.of([I], ["id"], "identity"),
            TestSpec.of([I.scale(HALF), I.scale(HALF)], ["a", "b"], "halves"),
            TestSpec.of([I.scale(q(1, 3)), I.scale(q(2, 3))], ["a", "b"], "thirds"),
            self.lueders(A, [self.projector(n, [k]) for k in range(n)], [str(k) for k in range(n)], "computational"),
            self.lueders(A, [self.projector(n, [0]), self.projector(n, range(1, n))], ["0", "rest"], "coarse-computational"),
        ]
        prep = []
        for k in range(n):
            K = la.czeros(n, n)
            K[0][0][k] = ONE
            prep.append(self.kraus(A, A, [K]))
        tests.append(TestSpec.of(prep, [str(k) for k in range(n)], "measure-prepare"))
        U = self.unitary_generators(A)[-1][1]
        tests.append(
            TestSpec.of(
                [self.unitary(U, A).scale(HALF), self.unitary(la.cdagger(U), A).scale(HALF)],
                ["u", "u*"],
                "unitary-mixture",
            )
        )
        return tests


class RealQuantum(Quantum):
    """Quantum theory with real amplitudes: states are real symmetric."""

    kind = "RealQuantum"
    leaf = "R"
    real = True

    def __init__(self, d: int = 2):
        super().__init__(d)
        self.name = f"realquantum{d}"

    def registered_systems(self):
        if self.d == 2:
            return [(self.leaf,), (self.leaf, self.leaf)]
        return [(self.leaf,)]

"""Fermionic modes under the parity superselection rule.

Modes are encoded by the Jordan-Wigner map: basis index bits are mode
occupations, first mode most significant.  Admissible states and effects
commute with the total parity, so they are block diagonal in the even and
odd sectors.  An odd map acting on later modes picks up the parity string
of the modes in front of it, which :func:`apply_choi` applies as a sign.
"""

from __future__ import annotations

from .. import linalg as la
from ..core import TestSpec
from ..rational import ONE, ZERO, q
from ..theory import TheoryModel
from .operator import OperatorTheory, cayley, parity

HALF = q(1, 2)
MAX_MODES = 3


def parity_projector(n_modes: int, bit: int):
    n = 2 ** n_modes
    re = la.zeros(n, n)
    for k in range(n):
        if parity(k) == bit:
            re[k][k] = ONE
    return (re, la.zeros(n, n))


def _pauli(name):
    z = ZERO
    o = ONE
    return {
        "I": ([[o, z], [z, o]], [[z, z], [z, z]]),
        "X": ([[z, o], [o, z]], [[z, z], [z, z]]),
        "Y": ([[z, z], [z, z]], [[z, -o], [o, z]]),
        "Z": ([[o, z], [z, -o]], [[z, z], [z, z]]),
    }[name]


def pauli_string(s: str):
    M = ([[ONE]], [[ZERO]])
    for ch in s:
        M = la.ckron(M, _pauli(ch))
    return M


def majoranas(n_modes: int):
    """Jordan-Wigner Majorana operators (Z..Z X I..I and Z..Z Y I..I)."""
    out = []
    for k in range(n_modes):
        pre = "Z" * k
        post = "I" * (n_modes - k - 1)
        out.append((f"g{2 * k}", pauli_string(pre + "X" + post)))
        out.append((f"g{2 * k + 1}", pauli_string(pre + "Y" + post)))
    return out


class Fermionic(OperatorTheory, TheoryModel):
    kind = "Fermionic"
    leaf = "F"
    leaf_d = 2
    fermionic = True

    def __init__(self, N: int = 2):
        if N not in range(1, MAX_MODES + 1):
            raise ValueError(f"Fermionic systems are modelled for 1..{MAX_MODES} modes")
        super().__init__()
        self.N = N
        self.name = f"fermionic{N}"

    @property
    def params(self):
        return {"N": self.N}

    def registered_systems(self):
        # transformations on three modes have a 2048-dimensional Choi span;
        # three-mode systems are used only for states and dilations
        return [self.system(k) for k in range(1, min(self.N, 2) + 1)]

    def parity_projectors(self, n_modes: int) -> TestSpec:
        A = self.system(n_modes)
        return self.lueders(
            A, [parity_projector(n_modes, 0), parity_projector(n_modes, 1)], ["e", "o"], "parity"
        )

    # -- unitary catalog ---------------------------------------------------------
    def _even_hamiltonian(self, n):
        re = la.zeros(n, n)
        im = la.zeros(n, n)
        for i in range(n):
            re[i][i] = q(i + 1, 4)
            for j in range(i + 1, n):
                if parity(i) == parity(j):
                    re[i][j] = re[j][i] = HALF
                    im[i][j] = q(1, 3)
                    im[j][i] = -q(1, 3)
        return (re, im)

    def unitary_generators(self, A):
        k = len(A)
        n = 2 ** k
        phase = la.czeros(n, n)
        for x in range(n):
            if parity(x):
                phase[1][x][x] = ONE
            else:
                phase[0][x][x] = ONE
        gens = [("cayley", cayley(self._even_hamiltonian(n))), ("phase", phase)]
        gens += majoranas(k)
        if k == 2:
            # fermionic swap: exchanges the modes with a sign on |11>
            re = la.zeros(4, 4)
            re[0][0] = ONE
            re[1][2] = ONE
            re[2][1] = ONE
            re[3][3] = -ONE
            gens.append(("fswap", (re, la.zeros(4, 4))))
        return gens

    def reversibles(self, A):
        return self.memo(("rev", tuple(A)), lambda: self._reversibles(A))

    def _reversibles(self, A):
        out = [self.identity(A)]
        for name, U in self.unitary_generators(A):
            out.append(self.unitary(U, A, name))
            Ud = la.cdagger(U)
            if not la.cequal(Ud, U):
                out.append(self.unitary(Ud, A, name + "^-1"))
        return out

    # -- tests -----------------------------------------------------------------
    def test_catalog(self, A):
        return self.memo(("catalog", tuple(A)), lambda: self._catalog(A))

    def _catalog(self, A):
        k = len(A)
        n = 2 ** k
        I = self.identity(A)
        tests = [
            TestSpec.of([I], ["id"], "identity"),
            TestSpec.of([I.scale(HALF), I.scale(HALF)], ["a", "b"], "halves"),
            TestSpec.of([I.scale(q(1, 3)), I.scale(q(2, 3))], ["a", "b"], "thirds"),
            self.parity_projectors(k),
        ]
        # occupation of the first mode (an even observable)
        occ = [self.projector(n, [x for x in range(n) if (x >> (k - 1)) & 1 == b]) for b in (0, 1)]
        tests.append(self.lueders(A, occ, ["0", "1"], "occupation"))
        prep = []
        for x in range(n):
            K = la.czeros(n, n)
            target = 0 if parity(x) == 0 else 1
            K[0][target][x] = ONE
            prep.append(self.kraus(A, A, [K]))
        tests.append(TestSpec.of(prep, [str(x) for x in range(n)], "measure-prepare"))
        g = majoranas(k)[0][1]
        tests.append(
            TestSpec.of(
                [self.unitary(g, A).scale(HALF), I.scale(HALF)], ["flip", "keep"], "majorana-mixture"
            )
        )
        return tests

    # -- the three-mode state used in the counterexample ------------------------
    def psi3(self):
        """1/2 (|000> + |011>)(<000| + <011|), an even three-mode state."""
        n = 8
        re = la.zeros(n, n)
        for a in (0, 3):
            for b in (0, 3):
                re[a][b] = HALF
        return self.coords((re, la.zeros(n, n)), self.system(3))

"""Theory-independent operations: maps, tests, pairing, dilations, refinement.

Every function takes the theory as its first argument and only uses the
:class:`~optlab.theory.TheoryModel` interface, so the same code runs on
classical, box-world and operator theories alike.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple

from . import linalg as la
from .lp import eq, lp_feasible
from .rational import ONE, ZERO, q
from .systems import TRIVIAL, SystemId, compose, fmt_system


class SystemMismatch(ValueError):
    pass


class WitnessError(RuntimeError):
    """The theory's faithfulness witnesses do not separate transformations."""


class IncompleteTest(ValueError):
    pass


def _freeze(m) -> tuple:
    return tuple(tuple(q(x) for x in row) for row in m)


@dataclass(frozen=True)
class TransfMap:
    """A transformation ``inp -> out`` in the theory's representation.

    ``data`` is a tuple of real matrices: one matrix for vector theories,
    the real and imaginary parts of a Choi matrix for operator theories.
    """

    inp: SystemId
    out: SystemId
    data: tuple = field(repr=False)
    label: str = field(default="", compare=False)

    @staticmethod
    def of(inp, out, mats, label="") -> "TransfMap":
        return TransfMap(tuple(inp), tuple(out), tuple(_freeze(m) for m in mats), label)

    def _check(self, other):
        if self.inp != other.inp or self.out != other.out:
            raise SystemMismatch(
                f"{fmt_system(self.inp)}->{fmt_system(self.out)} vs "
                f"{fmt_system(other.inp)}->{fmt_system(other.out)}"
            )

    def __add__(self, other):
        self._check(other)
        data = tuple(
            tuple(tuple(a + b for a, b in zip(ra, rb)) for ra, rb in zip(ma, mb))
            for ma, mb in zip(self.data, other.data)
        )
        return TransfMap(self.inp, self.out, data)

    def __sub__(self, other):
        self._check(other)
        data = tuple(
            tuple(tuple(a - b for a, b in zip(ra, rb)) for ra, rb in zip(ma, mb))
            for ma, mb in zip(self.data, other.data)
        )
        return TransfMap(self.inp, self.out, data)

    def scale(self, c) -> "TransfMap":
        c = q(c)
        data = tuple(tuple(tuple(c * a for a in row) for row in m) for m in self.data)
        return TransfMap(self.inp, self.out, data, self.label)

    def flat(self) -> tuple:
        return tuple(x for m in self.data for row in m for x in row)

    def is_zero(self) -> bool:
        return all(x == 0 for x in self.flat())

    def relabel(self, label) -> "TransfMap":
        return TransfMap(self.inp, self.out, self.data, label)


def tsum(maps: Sequence[TransfMap]) -> TransfMap:
    if not maps:
        raise ValueError("empty sum of transformations")
    acc = maps[0]
    for m in maps[1:]:
        acc = acc + m
    return acc


def proportionality(v, ref) -> Optional[object]:
    """c >= 0 with v == c*ref (ref nonzero), else None."""
    c = la.proportional_factor(v, ref)
    if c is None or c < 0:
        return None
    return c


@dataclass(frozen=True)
class TestSpec:
    __test__ = False  # not a pytest class

    events: tuple
    labels: tuple
    name: str = ""

    def __post_init__(self):
        if not self.events:
            raise ValueError("a test needs at least one event")
        if len(self.labels) != len(self.events):
            raise ValueError("one label per event")
        inp, out = self.events[0].inp, self.events[0].out
        for e in self.events:
            if e.inp != inp or e.out != out:
                raise SystemMismatch("events of a test must share input and output systems")

    @staticmethod
    def of(events, labels=None, name="") -> "TestSpec":
        events = tuple(events)
        if labels is None:
            labels = tuple(str(i) for i in range(len(events)))
        return TestSpec(events, tuple(labels), name)

    @property
    def inp(self):
        return self.events[0].inp

    @property
    def out(self):
        return self.events[0].out

    def total(self) -> TransfMap:
        return tsum(list(self.events))

    def __len__(self):
        return len(self.events)


# --------------------------------------------------------------------------
# closed circuits and state manipulation


def pair(theory, e, rho, system: SystemId):
    """Probability (e|rho) of an effect on a state of the same system."""
    d = theory.dim(system)
    if len(e) != d or len(rho) != d:
        raise SystemMismatch(f"vectors do not live on {fmt_system(system)}")
    return theory.pair(e, rho, system)


def apply(theory, T: TransfMap, psi, ancilla: SystemId = TRIVIAL):
    """(T x id_C) applied to a state on inp(T)*C."""
    return theory.apply_at(T, psi, TRIVIAL, tuple(ancilla))


def marginal_state(theory, psi, A: SystemId, B: SystemId, e=None):
    """Discard B from a state on A*B with the deterministic effect e."""
    if e is None:
        e = theory.unit_effect(B)
    elif not theory.is_deterministic_effect(e, B):
        raise ValueError("marginals are taken with deterministic effects only")
    return theory.discard(psi, A, B, e)


def is_dilation(theory, psi, rho, A: SystemId, B: SystemId):
    """Does some deterministic effect on B reduce psi to rho?

    The deterministic effects form the convex hull of the listed extreme
    ones; the weights are found by an exact LP.  Returns the weights or None.
    """
    dets = theory.det_effects(B)
    margs = [theory.discard(psi, A, B, e) for e in dets]
    d = theory.dim(A)
    if len(rho) != d:
        raise SystemMismatch("rho does not live on A")
    n = len(margs)
    cons = [eq(tuple(m[r] for m in margs), rho[r]) for r in range(d)]
    cons.append(eq((ONE,) * n, ONE))
    res = lp_feasible(cons, n)
    return res.x if res.feasible else None


def product_state(theory, rho, A, sigma, B):
    return theory.product_state(rho, A, sigma, B)


# --------------------------------------------------------------------------
# equality of transformations


def witness_images(theory, T: TransfMap) -> tuple:
    out = []
    for C, w in theory.witnesses(T.inp):
        out.extend(theory.apply_at(T, w, TRIVIAL, C))
    return tuple(out)


def validate_witness(theory, A: SystemId, witnesses=None, B: SystemId = None) -> bool:
    """Injectivity of T -> (T x id)(w) over the transformation span A -> B."""
    B = A if B is None else B
    wit = theory.witnesses(A) if witnesses is None else witnesses
    basis = theory.transf_span_basis(A, B)
    ech = la.SparseEchelon()
    for T in basis:
        img = []
        for C, w in wit:
            img.extend(theory.apply_at(T, w, TRIVIAL, C))
        if not ech.add(la.sparse(img)):
            return False
    return True


def transf_equal(theory, T1: TransfMap, T2: TransfMap) -> bool:
    if T1.inp != T2.inp or T1.out != T2.out:
        raise SystemMismatch("transformations act between different systems")
    if not theory.witness_validated(T1.inp):
        raise WitnessError(f"witness set for {fmt_system(T1.inp)} failed validation")
    for C, w in theory.witnesses(T1.inp):
        if theory.apply_at(T1, w, TRIVIAL, C) != theory.apply_at(T2, w, TRIVIAL, C):
            return False
    return True


def distinguishing_witness(theory, T1, T2):
    """First witness (ancilla, state) on which T1 and T2 differ, if any."""
    for C, w in theory.witnesses(T1.inp):
        if theory.apply_at(T1, w, TRIVIAL, C) != theory.apply_at(T2, w, TRIVIAL, C):
            return C, w
    return None


# --------------------------------------------------------------------------
# tests, refinement, coexistence


def is_complete(theory, test: TestSpec) -> bool:
    return theory.is_deterministic(test.total())


def make_test(theory, events, labels=None, name="") -> TestSpec:
    t = TestSpec.of(events, labels, name)
    if not is_complete(theory, t):
        raise IncompleteTest(f"events of {name or 'test'} do not sum to a deterministic map")
    return t


def coarse_grain(theory, test: TestSpec, partition: Sequence[Sequence[int]], labels=None) -> TestSpec:
    idx = sorted(i for block in partition for i in block)
    if idx != list(range(len(test.events))):
        raise ValueError("partition must cover every outcome exactly once")
    if any(len(block) == 0 for block in partition):
        raise ValueError("empty block in partition")
    events = [tsum([test.events[i] for i in block]) for block in partition]
    if labels is None:
        labels = ["+".join(test.labels[i] for i in block) for block in partition]
    out = TestSpec.of(events, labels, test.name)
    if is_complete(theory, test) and not is_complete(theory, out):
        raise ArithmeticError("coarse-graining lost completeness")
    return out


def refines(theory, D: TransfMap, C: TransfMap) -> bool:
    if D.inp != C.inp or D.out != C.out:
        raise SystemMismatch("refinement across different systems")
    return theory.refines(D, C)


def is_non_redundant(theory, test: TestSpec) -> bool:
    coords = [theory.transf_coords(e) for e in test.events]
    for i in range(len(coords)):
        for j in range(i + 1, len(coords)):
            a, b = coords[i], coords[j]
            if la.is_zero(a) or la.is_zero(b):
                if la.is_zero(a) and la.is_zero(b):
                    return False
                continue
            c = la.proportional_factor(a, b)
            if c is not None and c > 0:
                return False
    return True


def coexistent(theory, A: TransfMap, B: TransfMap) -> bool:
    return theory.coexistent(A, B)


def coexistent_completion(theory, X: Sequence[TransfMap], catalog: Sequence[TransfMap]) -> list:
    """Catalog events coexistent with at least one element of X (X included)."""
    out = list(X)
    for c in catalog:
        if any(c == x for x in out):
            continue
        if any(theory.coexistent(c, x) for x in X):
            out.append(c)
    return out


def state_as_map(theory, rho, A) -> TransfMap:
    return theory.prep_map(rho, A)


def effect_as_map(theory, e, A) -> TransfMap:
    return theory.effect_map(e, A)

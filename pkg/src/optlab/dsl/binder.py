"""Resolve a parsed program against a theory.

Values are evaluated in one of three contexts: a state or an effect of a
system (a coordinate vector), or a transformation between two systems.
Matrix literals are written in the theory's canonical basis: density and
effect matrices for operator theories, coordinate vectors for vector
theories.  In a transformation context an operator-theory matrix ``K``
stands for the single-Kraus map ``rho -> K rho K^dagger`` and a
vector-theory matrix is the map itself.

Named shortcuts (``ket01``, ``unit``, ``proj_even``, ``bell``, ...) are
listed by :func:`shortcut_names`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .. import linalg as la
from ..core import TestSpec, TransfMap, tsum
from ..rational import ONE, ZERO, q
from ..systems import TRIVIAL, compose, fmt_system
from ..zoo import get_theory
from ..zoo.boxworld import BoxWorld
from ..zoo.fermionic import Fermionic, parity_projector
from ..zoo.operator import OperatorTheory
from .ast import (
    Call,
    CircuitDecl,
    IdAtom,
    MatrixLit,
    NameRef,
    ObsDecl,
    PrepDecl,
    Program,
    RefAtom,
    RestrictDecl,
    SystemDecl,
    TestDecl,
    TheoryDecl,
    Value,
    VectorLit,
)
from .errors import BindError

STATE, EFFECT, TRANSF = "state", "effect", "transformation"


@dataclass(frozen=True)
class BoundElement:
    """A test of the circuit: preparation, transformation, observation or wire."""

    name: str
    kind: str  # "prep" | "test" | "obs" | "id"
    inp: tuple
    out: tuple
    events: Tuple[TransfMap, ...]
    labels: Tuple[str, ...]

    @property
    def informative(self) -> bool:
        return len(self.events) > 1

    def as_test(self) -> TestSpec:
        return TestSpec.of(self.events, self.labels, self.name)


@dataclass(frozen=True)
class BoundCircuit:
    name: str
    stages: Tuple[Tuple[BoundElement, ...], ...]
    inp: tuple
    out: tuple

    @property
    def closed(self) -> bool:
        return self.inp == TRIVIAL and self.out == TRIVIAL


@dataclass
class BoundProgram:
    theory: object
    systems: Dict[str, tuple]
    elements: Dict[str, BoundElement]
    circuits: Dict[str, BoundCircuit]
    restrictions: Dict[str, object]
    states: Dict[str, list]
    effects: Dict[str, list]


# --------------------------------------------------------------------------
# shortcuts


def _digits(name, prefix, leaves, base):
    body = name[len(prefix):]
    if len(body) != leaves or not all(c.isdigit() and int(c) < base for c in body):
        return None
    k = 0
    for c in body:
        k = k * base + int(c)
    return k


def shortcut_names(theory) -> List[str]:
    names = ["unit", "maxmixed", "id", "ket<digits>"]
    if isinstance(theory, OperatorTheory):
        if theory.leaf_d == 2 and not isinstance(theory, Fermionic):
            names += ["plus", "minus", "bell"]
        if isinstance(theory, Fermionic):
            names += ["proj_even", "proj_odd", "psi3"]
    elif isinstance(theory, BoxWorld):
        names += ["vpp", "vpm", "vmp", "vmm", "xp", "xm", "yp", "ym", "pr", "d8_<k>"]
    else:
        names += ["delta<digits>"]
    return names


def _operator_shortcut(th, name, A):
    d = th.hdim(A)
    n = len(A)
    if name == "unit":
        return la.ceye(d)
    if name == "maxmixed":
        return la.cscale(q(1, d), la.ceye(d))
    k = _digits(name, "ket", n, th.leaf_d) if name.startswith("ket") else None
    if k is not None:
        return th.projector(d, [k])
    if isinstance(th, Fermionic):
        if name in ("proj_even", "proj_odd"):
            return parity_projector(n, 0 if name == "proj_even" else 1)
        if name == "psi3" and n == 3:
            return th.mat(th.psi3(), A)
    elif th.leaf_d == 2 and n == 1 and name in ("plus", "minus"):
        s = ONE if name == "plus" else -ONE
        h = q(1, 2)
        return ([[h, s * h], [s * h, h]], la.zeros(2, 2))
    elif th.leaf_d == 2 and n == 2 and name == "bell":
        return th.mat(th.max_entangled(A[:1]), A)
    return None


def _vector_shortcut(th, name, A):
    d = th.dim(A)
    if name == "unit":
        return th.unit_effect(A)
    if name == "maxmixed":
        return th.normalise(th.unit_effect(A), A)
    if isinstance(th, BoxWorld):
        leaf = {
            "vpp": (ONE, ONE, ONE), "vpm": (ONE, ONE, -ONE),
            "vmp": (ONE, -ONE, ONE), "vmm": (ONE, -ONE, -ONE),
        }
        effs = dict(zip(("xp", "xm", "yp", "ym"), th.leaf_effect_generators()))
        if len(A) == 1 and name in leaf:
            return leaf[name]
        if len(A) == 1 and name in effs:
            return effs[name]
        if name == "pr" and len(A) == 2 and th.variant == "max":
            return th.pr_boxes()[0]
        return None
    for prefix in ("ket", "delta"):
        if name.startswith(prefix):
            k = _digits(name, prefix, len(A), th.leaf_dim)
            if k is not None:
                return la.unit_vector(d, k)
    return None


# --------------------------------------------------------------------------
# binding


class Binder:
    def __init__(self, theory):
        self.th = theory
        self.systems: Dict[str, tuple] = {}
        self.elements: Dict[str, BoundElement] = {}
        self.states: Dict[str, list] = {}
        self.effects: Dict[str, list] = {}
        self.op = isinstance(theory, OperatorTheory)

    # -- systems --------------------------------------------------------------
    def system(self, sx) -> tuple:
        out = ()
        for n in sx.names:
            if n in self.systems:
                out = compose(out, self.systems[n])
            elif n == self.th.leaf:
                out = compose(out, (self.th.leaf,))
            else:
                raise BindError(
                    f"unknown system {n!r} (theory {self.th.name} has elementary system {self.th.leaf!r})",
                    sx.span,
                )
        return out

    # -- values ---------------------------------------------------------------
    def value(self, v: Value, ctx, A, B=None):
        acc = None
        for t in v.terms:
            x = self.primary(t.primary, ctx, A, B)
            x = self._scale(x, t.coeff, ctx)
            acc = x if acc is None else self._add(acc, x, ctx)
        if ctx == TRANSF:
            return acc
        return self._to_coords(acc, A, v)

    def _scale(self, x, c, ctx):
        if ctx == TRANSF:
            return x.scale(c)
        if self.op:
            return la.cscale(c, x)
        return la.vscale(c, x)

    def _add(self, a, b, ctx):
        if ctx == TRANSF:
            return a + b
        if self.op:
            return la.cadd(a, b)
        return la.vadd(a, b)

    def _to_coords(self, x, A, node):
        if not self.op:
            if len(x) != self.th.dim(A):
                raise BindError(
                    f"vector of length {len(x)} given for system {fmt_system(A)} of dimension {self.th.dim(A)}",
                    node.span,
                )
            return tuple(x)
        sp = self.th.space(A)
        if len(x[0]) != sp.n:
            raise BindError(f"matrix of size {len(x[0])} given for system {fmt_system(A)} of size {sp.n}", node.span)
        if not sp.in_span(x):
            raise BindError(
                f"matrix is not an admissible operator on {fmt_system(A)} (hermiticity or superselection)",
                node.span,
            )
        return sp.to_coords(x)

    def _literal(self, p, ctx, A, B):
        if isinstance(p, VectorLit):
            if self.op:
                raise BindError("operator theories take matrix literals", p.span)
            if ctx == TRANSF:
                raise BindError("a transformation needs a matrix literal", p.span)
            if any(im for _, im in p.entries):
                raise BindError("complex entries are not allowed here", p.span)
            return tuple(re for re, _ in p.entries)
        re = [[e[0] for e in row] for row in p.rows]
        im = [[e[1] for e in row] for row in p.rows]
        if not self.op:
            if ctx != TRANSF:
                raise BindError("a state or effect of a vector theory is a vector literal", p.span)
            if any(x for row in im for x in row):
                raise BindError("complex entries are not allowed here", p.span)
            return self._vector_map(re, A, B, p)
        M = (re, im)
        if ctx == TRANSF:
            return self._kraus([M], A, B, p)
        return M

    def _vector_map(self, M, A, B, node):
        if (len(M), len(M[0])) != (self.th.dim(B), self.th.dim(A)):
            raise BindError(
                f"map matrix must be {self.th.dim(B)}x{self.th.dim(A)} for {fmt_system(A)} -> {fmt_system(B)}",
                node.span,
            )
        return self.th.make(A, B, M)

    def _kraus(self, ops, A, B, node):
        din, dout = self.th.hdim(A), self.th.hdim(B)
        for K in ops:
            if (len(K[0]), len(K[0][0])) != (dout, din):
                raise BindError(f"Kraus operator must be {dout}x{din}", node.span)
        return self.th.kraus(A, B, ops)

    def primary(self, p, ctx, A, B):
        if isinstance(p, (VectorLit, MatrixLit)):
            return self._literal(p, ctx, A, B)
        if isinstance(p, Call):
            return self.call(p, ctx, A, B)
        name = p.name
        if ctx == TRANSF:
            if name == "id":
                if A != B:
                    raise BindError("id needs equal input and output systems", p.span)
                return self.th.identity(A)
            if A == B:
                for U in self.th.reversibles(A):
                    if U.label == name:
                        return U
            if self.op:
                M = _operator_shortcut(self.th, name, A)
                if M is not None and A == B:
                    return self._kraus([M], A, B, p)
            raise BindError(f"unknown transformation {name!r} on {fmt_system(A)}", p.span)
        x = _operator_shortcut(self.th, name, A) if self.op else _vector_shortcut(self.th, name, A)
        if x is None:
            raise BindError(
                f"unknown {ctx} {name!r} on {fmt_system(A)}; shortcuts: {', '.join(shortcut_names(self.th))}",
                p.span,
            )
        return x

    def call(self, c: Call, ctx, A, B):
        f = c.func
        if f == "prod":
            if ctx == TRANSF:
                raise BindError("prod builds product states and effects", c.span)
            if len(c.args) != len(A):
                raise BindError(f"prod needs one factor per elementary system of {fmt_system(A)}", c.span)
            acc = None
            for arg, leaf in zip(c.args, A):
                x = self.value(arg, ctx, (leaf,))
                x = self._from_coords(x, (leaf,))
                acc = x if acc is None else (la.ckron(acc, x) if self.op else la.kron_vec(acc, x))
            return acc
        if ctx != TRANSF:
            raise BindError(f"{f}(...) builds a transformation, not a {ctx}", c.span)
        if f == "kraus":
            if not self.op:
                raise BindError("kraus(...) needs an operator theory", c.span)
            ops = [self._raw_matrix(a) for a in c.args]
            return self._kraus(ops, A, B, c)
        if f == "choi":
            if not self.op or len(c.args) != 1:
                raise BindError("choi(...) takes one matrix in an operator theory", c.span)
            J = self._raw_matrix(c.args[0])
            n = self.th.hdim(A) * self.th.hdim(B)
            if len(J[0]) != n:
                raise BindError(f"Choi matrix must be {n}x{n}", c.span)
            return self.th.make(A, B, J)
        if f == "map":
            if self.op or len(c.args) != 1:
                raise BindError("map(...) takes one matrix in a vector theory", c.span)
            lit = self._single_literal(c.args[0], MatrixLit)
            return self._vector_map([[e[0] for e in row] for row in lit.rows], A, B, c)
        if f == "measure_prepare":
            # measure_prepare(effect_on_A, state_on_B)
            if len(c.args) != 2:
                raise BindError("measure_prepare(effect, state) takes two arguments", c.span)
            e = self.value(c.args[0], EFFECT, A)
            s = self.value(c.args[1], STATE, B)
            return self.th.seq(self.th.prep_map(s, B), self.th.effect_map(e, A))
        raise BindError(f"unknown function {f!r}", c.span)

    def _from_coords(self, x, A):
        return self.th.mat(x, A) if self.op else x

    def _single_literal(self, v: Value, cls):
        if len(v.terms) != 1 or v.terms[0].coeff != 1 or not isinstance(v.terms[0].primary, cls):
            raise BindError("expected a plain literal", v.span)
        return v.terms[0].primary

    def _raw_matrix(self, v: Value):
        acc = None
        for t in v.terms:
            p = t.primary
            if isinstance(p, MatrixLit):
                M = ([[e[0] for e in r] for r in p.rows], [[e[1] for e in r] for r in p.rows])
            elif isinstance(p, NameRef):
                raise BindError(f"use a matrix literal inside kraus/choi, not {p.name!r}", p.span)
            else:
                raise BindError("expected a matrix literal", v.span)
            M = la.cscale(t.coeff, M)
            acc = M if acc is None else la.cadd(acc, M)
        return acc

    # -- declarations ---------------------------------------------------------
    def _check_state(self, s, A, node):
        if not self.th.state_cone(A).contains(s):
            raise BindError(f"not a state of {fmt_system(A)}", node.span)

    def _check_effect(self, e, A, node):
        if not self.th.effect_cone(A).contains(e):
            raise BindError(f"not an effect of {fmt_system(A)}", node.span)

    def prep(self, d: PrepDecl):
        A = self.system(d.system)
        states = []
        for ev in d.events:
            s = self.value(ev.value, STATE, A)
            self._check_state(s, A, ev.value)
            states.append(s)
        u = self.th.unit_effect(A)
        tot = la.vsum(states, len(u))
        if self.th.pair(u, tot, A) != 1:
            raise BindError(
                f"incomplete test: preparation {d.name!r} has total probability "
                f"{self.th.pair(u, tot, A)}, not 1",
                d.span,
            )
        if not self.th.convex and any(s not in (self.th.pure_states(A) or []) for s in states if not la.is_zero(s)):
            raise BindError("events of this theory must be point masses", d.span)
        events = tuple(self.th.prep_map(s, A) for s in states)
        self.states[d.name] = [(TRIVIAL, s) for s in states]
        return BoundElement(d.name, "prep", TRIVIAL, A, events, tuple(e.label for e in d.events))

    def obs(self, d: ObsDecl):
        A = self.system(d.system)
        effects = []
        for ev in d.events:
            e = self.value(ev.value, EFFECT, A)
            self._check_effect(e, A, ev.value)
            effects.append(e)
        tot = la.vsum(effects, self.th.dim(A))
        if not self.th.is_deterministic_effect(tot, A):
            raise BindError(f"incomplete test: effects of {d.name!r} do not sum to a deterministic effect", d.span)
        events = tuple(self.th.effect_map(e, A) for e in effects)
        self.effects[d.name] = [(TRIVIAL, e) for e in effects]
        return BoundElement(d.name, "obs", A, TRIVIAL, events, tuple(e.label for e in d.events))

    def test(self, d: TestDecl):
        A, B = self.system(d.inp), self.system(d.out)
        events = []
        for ev in d.events:
            T = self.value(ev.value, TRANSF, A, B)
            if not self.th.in_transf_cone(T):
                raise BindError(f"event {ev.label!r} of {d.name!r} is not an admissible transformation", ev.value.span)
            events.append(TransfMap.of(A, B, T.data, ev.label))
        if not self.th.is_deterministic(tsum(events)):
            raise BindError(
                f"incomplete test: events of {d.name!r} do not sum to a deterministic transformation", d.span
            )
        return BoundElement(d.name, "test", A, B, tuple(events), tuple(e.label for e in d.events))

    def circuit(self, d: CircuitDecl) -> BoundCircuit:
        stages = []
        prev_out = None
        for k, st in enumerate(d.stages):
            els = []
            for a in st:
                if isinstance(a, IdAtom):
                    S = self.system(a.system)
                    els.append(BoundElement(f"id({fmt_system(S)})", "id", S, S, (self.th.identity(S),), ("",)))
                else:
                    if a.name not in self.elements:
                        raise BindError(f"unknown circuit element {a.name!r}", a.span)
                    els.append(self.elements[a.name])
            inp = compose(*[e.inp for e in els])
            out = compose(*[e.out for e in els])
            if prev_out is not None and inp != prev_out:
                raise BindError(
                    f"wire type mismatch: stage {k} outputs {fmt_system(prev_out)} but stage {k + 1} "
                    f"expects {fmt_system(inp)}; an output wire connects only to an input wire of the same system",
                    st[0].span,
                )
            if prev_out is None:
                first_in = inp
            prev_out = out
            stages.append(tuple(els))
        return BoundCircuit(d.name, tuple(stages), first_in, prev_out)

    def restriction(self, d: RestrictDecl):
        from ..restricted import RestrictionPair

        A = self.system(d.system)

        def collect(names, table, what):
            if names is None:
                return None
            out = []
            for n in names:
                if n not in table:
                    raise BindError(f"unknown {what} {n!r} in restriction {d.name!r}", d.span)
                el = self.elements[n]
                S = el.out if what == "preparation" else el.inp
                if tuple(S[: len(A)]) != A:
                    raise BindError(f"{what} {n!r} does not act on {fmt_system(A)} (plus an ancilla)", d.span)
                C = tuple(S[len(A):])
                out.extend((C, v) for _, v in table[n])
            return out

        X = collect(d.inputs, self.states, "preparation")
        Y = collect(d.outputs, self.effects, "observation")
        return RestrictionPair.build(self.th, A, X, Y)


def bind(program: Program, theory=None) -> BoundProgram:
    """Bind every declaration; ``theory`` overrides the program's ``theory`` line."""
    decls = program.of_type(TheoryDecl)
    if theory is None:
        if not decls:
            raise BindError("no theory declared (add 'theory NAME' or pass one explicitly)")
        try:
            theory = get_theory(decls[-1].name)
        except KeyError as exc:
            raise BindError(f"unknown theory {decls[-1].name!r}", decls[-1].span) from exc
    b = Binder(theory)
    circuits: Dict[str, BoundCircuit] = {}
    restrictions = {}
    for d in program.decls:
        if isinstance(d, TheoryDecl):
            continue
        name = getattr(d, "name", None)
        if name in b.elements or name in circuits or name in restrictions or name in b.systems:
            raise BindError(f"{name!r} is declared twice", d.span)
        if isinstance(d, SystemDecl):
            b.systems[d.name] = b.system(d.system)
        elif isinstance(d, PrepDecl):
            b.elements[d.name] = b.prep(d)
        elif isinstance(d, ObsDecl):
            b.elements[d.name] = b.obs(d)
        elif isinstance(d, TestDecl):
            b.elements[d.name] = b.test(d)
        elif isinstance(d, CircuitDecl):
            circuits[d.name] = b.circuit(d)
        elif isinstance(d, RestrictDecl):
            restrictions[d.name] = b.restriction(d)
    return BoundProgram(theory, b.systems, b.elements, circuits, restrictions, b.states, b.effects)

"""Equality, atomicity, disturbance and information relative to restricted inputs and outputs.

A :class:`RestrictionPair` fixes a finite set ``X`` of dilated states of a
system ``A`` (pairs ``(C, psi)`` with ``psi`` on ``A*C``) and a finite set
``Y`` of dilated effects (pairs ``(C, c)`` with ``c`` on ``B*C``).  ``None``
stands for "every dilation".  Comparisons only look at the linear span of
the refinements of the listed elements, which for a cone element is the
span of its minimal face.

Coexistent completions follow from causality.  A deterministic state is
coexistent only with its own refinements; a sub-normalised one leaves room
for any state of the same system, and the completion then adds the
theory's probe states up to ``catalog_bound`` of them.  An effect ``y`` is
completed by the complementary effect ``u - y`` of the binary observation
``{y, u - y}``, and every completion holds the deterministic effect.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from . import linalg as la
from .checkers import check_no_information, check_non_disturbing, probe_ancillas
from .cones import ConeV, cone_decompose
from .core import TestSpec, TransfMap, tsum
from .psd import PSDCone
from .rational import ONE, ZERO, q
from .systems import TRIVIAL, compose, fmt_system, parse_system
from .theory import PolyCone
from .verdict import InconsistencyError, Verdict

DEFAULT_CATALOG_BOUND = 64


# --------------------------------------------------------------------------
# spans of refinement sets


def face_span(cone, v) -> list:
    """Basis of the span of the minimal face of v (empty for v = 0)."""
    if la.is_zero(v):
        return []
    if isinstance(cone, PSDCone):
        return list(cone.face(v).basis)
    if isinstance(cone, PolyCone):
        return list(cone.face(v)[1])
    raise NotImplementedError(f"no face computation for {type(cone).__name__}")


def refinement_span(theory, rho, A) -> list:
    """Span of the refinements of a state: its minimal face in the state cone."""
    cone = theory.state_cone(A)
    if not cone.contains(rho):
        raise ValueError("not a state of the system")
    return face_span(cone, rho)


def effect_refinement_span(theory, e, A) -> list:
    cone = theory.effect_cone(A)
    if not cone.contains(e):
        raise ValueError("not an effect of the system")
    return face_span(cone, e)


def _full_basis(d):
    return [la.unit_vector(d, k) for k in range(d)]


def _merge(spans):
    vecs = [v for s in spans for v in s]
    return la.row_basis(vecs) if vecs else []


# --------------------------------------------------------------------------
# the restriction pair


def _group(items):
    out: Dict[tuple, list] = {}
    for C, v in items:
        out.setdefault(tuple(C), []).append(tuple(v))
    return out


@dataclass(frozen=True)
class RestrictionPair:
    """Restricted input states X on A*C and output effects Y on B*C.

    Spans and completions are computed once at construction.
    """

    theory: object
    A: tuple
    B: tuple
    X: Optional[tuple]
    Y: Optional[tuple]
    catalog_bound: int = DEFAULT_CATALOG_BOUND
    ref_x: Optional[dict] = field(default=None, compare=False)
    ref_y: Optional[dict] = field(default=None, compare=False)
    det_x: Optional[dict] = field(default=None, compare=False)
    det_y: Optional[dict] = field(default=None, compare=False)
    completion_x: Optional[dict] = field(default=None, compare=False)
    completion_y: Optional[dict] = field(default=None, compare=False)
    truncated: bool = field(default=False, compare=False)

    @classmethod
    def build(cls, theory, A, X=None, Y=None, B=None, catalog_bound=DEFAULT_CATALOG_BOUND):
        A = tuple(A)
        B = A if B is None else tuple(B)
        Xt = None if X is None else tuple((tuple(C), tuple(v)) for C, v in X)
        Yt = None if Y is None else tuple((tuple(C), tuple(v)) for C, v in Y)
        ref_x = det_x = comp_x = None
        ref_y = det_y = comp_y = None
        truncated = False
        if Xt is not None:
            ref_x, det_x, comp_x, truncated = _complete_states(theory, A, Xt, catalog_bound)
        if Yt is not None:
            ref_y, det_y, comp_y = _complete_effects(theory, B, Yt)
        return cls(theory, A, B, Xt, Yt, catalog_bound, ref_x, ref_y, det_x, det_y, comp_x, comp_y, truncated)

    @classmethod
    def full(cls, theory, A, B=None):
        return cls.build(theory, A, None, None, B)

    # -- views ----------------------------------------------------------------
    def input_span(self, C) -> Optional[list]:
        """Basis of Ref(X) on A*C (None when X is unrestricted)."""
        if self.X is None:
            return None
        return self.ref_x.get(tuple(C), [])

    def output_span(self, C) -> Optional[list]:
        if self.Y is None:
            return None
        return self.ref_y.get(tuple(C), [])

    def ancillas(self) -> list:
        if self.X is None and self.Y is None:
            return [tuple(C) for C, _ in self.theory.witnesses(self.A)]
        if self.X is None:
            return sorted(self.ref_y)
        if self.Y is None:
            return sorted(self.ref_x)
        return sorted(set(self.ref_x) & set(self.ref_y))

    def deterministic_states(self, depth: int = 1) -> list:
        """Deterministic elements of X^ as (C, state) pairs."""
        if self.X is None:
            th = self.theory
            out = []
            for C in probe_ancillas(th, self.A, depth):
                out.extend((C, s) for s in th.probe_states(self.A, C))
            return out
        return [(C, s) for C, ss in sorted(self.det_x.items()) for s in ss]

    def deterministic_effects(self, depth: int = 1) -> list:
        if self.Y is None:
            th = self.theory
            return [(C, e) for C in probe_ancillas(th, self.B, depth) for e in th.det_effects(compose(self.B, C))]
        return [(C, e) for C, es in sorted(self.det_y.items()) for e in es]

    def completed(self) -> "RestrictionPair":
        """The pair (X^, Y^) as a pair in its own right."""
        X = None if self.X is None else [(C, s) for C, ss in self.completion_x.items() for s in ss]
        Y = None if self.Y is None else [(C, e) for C, es in self.completion_y.items() for e in es]
        return RestrictionPair.build(self.theory, self.A, X, Y, self.B, self.catalog_bound)

    def enlarge(self, X_extra=(), Y_extra=()) -> "RestrictionPair":
        X = None if self.X is None else list(self.X) + list(X_extra)
        Y = None if self.Y is None else list(self.Y) + list(Y_extra)
        return RestrictionPair.build(self.theory, self.A, X, Y, self.B, self.catalog_bound)

    def describe(self) -> dict:
        def spans(d):
            return None if d is None else {fmt_system(C): len(v) for C, v in sorted(d.items())}

        return {
            "system": fmt_system(self.A),
            "output": fmt_system(self.B),
            "inputs": "all" if self.X is None else len(self.X),
            "outputs": "all" if self.Y is None else len(self.Y),
            "input_span_dims": spans(self.ref_x),
            "output_span_dims": spans(self.ref_y),
            "catalog_bound": self.catalog_bound,
            "completion_truncated": self.truncated,
        }

    def to_json(self) -> dict:
        from .rational import vec_to_json

        def items(xs):
            return None if xs is None else [{"ancilla": fmt_system(C), "vector": vec_to_json(v)} for C, v in xs]

        return {
            "theory": self.theory.name,
            "system": fmt_system(self.A),
            "output": fmt_system(self.B),
            "inputs": items(self.X),
            "outputs": items(self.Y),
            "catalog_bound": self.catalog_bound,
        }

    @classmethod
    def from_json(cls, theory, doc: dict) -> "RestrictionPair":
        from .rational import vec_from_json

        def items(xs):
            if xs is None:
                return None
            return [(parse_system(d["ancilla"]), vec_from_json(d["vector"])) for d in xs]

        return cls.build(
            theory,
            parse_system(doc["system"]),
            items(doc.get("inputs")),
            items(doc.get("outputs")),
            parse_system(doc.get("output", doc["system"])),
            int(doc.get("catalog_bound", DEFAULT_CATALOG_BOUND)),
        )


def _complete_states(theory, A, X, bound):
    groups = _group(X)
    ref, det, comp = {}, {}, {}
    truncated = False
    for C, states in groups.items():
        AC = compose(A, C)
        cone = theory.state_cone(AC)
        u = theory.unit_effect(AC)
        spans = []
        dets = []
        members = list(states)
        slack = False
        for s in states:
            if not cone.contains(s):
                raise ValueError(f"input {s} is not a state of {fmt_system(AC)}")
            w = theory.pair(u, s, AC)
            if w > 1:
                raise ValueError("input states must be normalised or sub-normalised")
            spans.append(face_span(cone, s))
            if w == 1:
                dets.append(s)
            elif w < 1:
                slack = True
        if slack:
            probes = [theory.normalise(p, AC) for p in theory.probe_states(A, C)]
            if len(probes) > bound:
                probes = probes[:bound]
                truncated = True
            dets.extend(probes)
            members.extend(probes)
        ref[C] = _merge(spans)
        det[C] = _dedupe(dets)
        comp[C] = _dedupe(members)
    return ref, det, comp, truncated


def _complete_effects(theory, B, Y):
    groups = _group(Y)
    ref, det, comp = {}, {}, {}
    for C, effects in groups.items():
        BC = compose(B, C)
        cone = theory.effect_cone(BC)
        dets = theory.det_effects(BC)
        u = dets[0]
        spans = []
        members = list(effects)
        for e in effects:
            if not cone.contains(e):
                raise ValueError(f"output {e} is not an effect of {fmt_system(BC)}")
            rest = la.vsub(u, e)
            if not cone.contains(rest):
                raise ValueError("output effects must lie below the deterministic effect")
            spans.append(face_span(cone, e))
            members.append(rest)
        members.extend(dets)
        ref[C] = _merge(spans)
        det[C] = _dedupe(list(dets))
        comp[C] = _dedupe(members)
    return ref, det, comp


def _dedupe(vs):
    seen, out = set(), []
    for v in vs:
        t = tuple(v)
        if t not in seen:
            seen.add(t)
            out.append(t)
    return out


# --------------------------------------------------------------------------
# restricted equality


def restricted_image(theory, T: TransfMap, pair: RestrictionPair) -> tuple:
    """Values (c|(T x I)|Psi) over span bases; equal images <=> equal upon the pair."""
    out = []
    if pair.X is None and pair.Y is None:
        for C, w in theory.witnesses(T.inp):
            out.extend(theory.apply_at(T, w, TRIVIAL, C))
        return tuple(out)
    for C in pair.ancillas():
        AC = compose(T.inp, C)
        BC = compose(T.out, C)
        xs = pair.input_span(C)
        if xs is None:
            xs = _full_basis(theory.dim(AC))
        ys = pair.output_span(C)
        for psi in xs:
            img = theory.apply_at(T, psi, TRIVIAL, C)
            if ys is None:
                out.extend(img)
            else:
                out.extend(theory.pair(c, img, BC) for c in ys)
    return tuple(out)


def equal_upon(theory, T1: TransfMap, T2: TransfMap, pair: RestrictionPair) -> bool:
    if (T1.inp, T1.out) != (T2.inp, T2.out):
        raise ValueError("transformations act between different systems")
    return la.is_zero(restricted_image(theory, T1 - T2, pair))


def equal_upon_rho(theory, T1: TransfMap, T2: TransfMap, rho) -> bool:
    """(T1 - T2) annihilates every refinement of rho (no ancilla)."""
    if (T1.inp, T1.out) != (T2.inp, T2.out):
        raise ValueError("transformations act between different systems")
    D = T1 - T2
    return all(la.is_zero(theory.apply_at(D, v, TRIVIAL, TRIVIAL)) for v in refinement_span(theory, rho, T1.inp))


def dilations_of(theory, rho, A, ancillas=None, samples: int = 2, seed: int = 0) -> list:
    """A finite family of dilations of rho.

    Products with sampled states of each ancilla, the correlated dilation
    over a pure-state decomposition, and a constructive purification
    where the theory provides one.
    """
    rng = random.Random(seed)
    A = tuple(A)
    if ancillas is None:
        ancillas = [theory.system(1)]
    out = []
    for C in ancillas:
        C = tuple(C)
        sig = theory.pure_states(C) or theory.sample_states(C, rng, samples)
        for s in list(sig)[:samples]:
            out.append((C, theory.product_state(rho, A, s, C)))
        if C == A:
            corr = _correlated_dilation(theory, rho, A)
            if corr is not None:
                out.append((C, corr))
    if hasattr(theory, "purify") and isinstance(theory.state_cone(A), PSDCone):
        B, psi = theory.purify(rho, A)
        out.append((tuple(B), psi))
    return out


def _correlated_dilation(theory, rho, A):
    pure = theory.pure_states(A)
    if pure is None:
        return None
    c = cone_decompose(ConeV(len(rho), [tuple(p) for p in pure]), rho)
    if c is None:
        return None
    d = theory.dim(compose(A, A))
    terms = [la.vscale(w, theory.product_state(p, A, p, A)) for w, p in zip(c, pure) if w]
    return la.vsum(terms, d)


# --------------------------------------------------------------------------
# atomicity, disturbance and information upon a pair


def _refinement_generators(theory, T: TransfMap) -> list:
    info = theory.face_info(T)
    if info.generators:
        return list(info.generators)
    return [theory.transf_from_coords(T.inp, T.out, b) for b in info.basis]


def atomic_upon(theory, T: TransfMap, pair: RestrictionPair, extra_refinements=()) -> bool:
    """Every refinement of T acts as a multiple of T upon the pair.

    Refinements are represented by a spanning set of the face of T (plus
    any supplied events known to refine a map equal to T upon the pair).
    """
    ref = restricted_image(theory, T, pair)
    for S in list(_refinement_generators(theory, T)) + list(extra_refinements):
        if la.proportional_factor(restricted_image(theory, S, pair), ref) is None:
            return False
    return True


def nondisturbing_upon(theory, test: TestSpec, pair: RestrictionPair) -> bool:
    if test.inp != test.out:
        raise ValueError("a non-disturbing test maps a system to itself")
    return equal_upon(theory, test.total(), theory.identity(test.inp), pair)


def _functional_values(theory, e, BC, vectors, side):
    if side == "effect":
        return [theory.pair(e, v, BC) for v in vectors]
    return [theory.pair(v, e, BC) for v in vectors]


def noinfo_upon(theory, test: TestSpec, pair: RestrictionPair, depth: int = 1) -> Verdict:
    """Proportionality conditions against deterministic elements of the completions."""
    A, Cout = test.inp, test.out
    events = list(test.events)
    n = len(events)
    p_factors: Dict[tuple, list] = {}
    q_factors: Dict[tuple, list] = {}
    # effect side: e o A_i equal upon X to p_i f
    for B, e in pair.deterministic_effects(depth):
        AB = compose(A, B)
        xs = pair.input_span(B)
        if xs is None:
            xs = _full_basis(theory.dim(AB))
        if not xs:
            continue
        backs = [theory.apply_dual_at(E, e, TRIVIAL, B) for E in events]
        vals = [[theory.pair(b, x, AB) for x in xs] for b in backs]
        tot = [sum(col, ZERO) for col in zip(*vals)]
        if la.is_zero(tot):
            continue
        ps = []
        for i, v in enumerate(vals):
            c = la.proportional_factor(v, tot)
            if c is None:
                return Verdict(
                    "no-information-upon", theory.name, (fmt_system(A),), False,
                    {"side": "effect", "ancilla": fmt_system(B), "event": test.labels[i], "effect": e},
                )
            ps.append(c)
        p_factors[(B, e)] = ps
    # state side: A_i omega equal upon Y^ to q_i nu
    for B, omega in pair.deterministic_states(depth):
        CB = compose(Cout, B)
        ys = pair.output_span(B)
        imgs = [theory.apply_at(E, omega, TRIVIAL, B) for E in events]
        if ys is None:
            vals = [list(img) for img in imgs]
        else:
            if not ys:
                continue
            vals = [[theory.pair(c, img, CB) for c in ys] for img in imgs]
        tot = [sum(col, ZERO) for col in zip(*vals)]
        if la.is_zero(tot):
            continue
        qs = []
        for i, v in enumerate(vals):
            c = la.proportional_factor(v, tot)
            if c is None:
                return Verdict(
                    "no-information-upon", theory.name, (fmt_system(A),), False,
                    {"side": "state", "ancilla": fmt_system(B), "event": test.labels[i], "state": omega},
                )
            qs.append(c)
        q_factors[(B, omega)] = qs
    # both hold: the factors coincide whenever an effect and a state meet
    r = None
    for (B, e), ps in p_factors.items():
        for (B2, omega), qs in q_factors.items():
            if B != B2:
                continue
            if theory.pair(e, omega, compose(A, B)) == 0:
                continue
            if ps != qs:
                raise InconsistencyError(f"no-information factors differ on ancilla {fmt_system(B)}: {ps} vs {qs}")
            r = ps
    return Verdict(
        "no-information-upon", theory.name, (fmt_system(A),), True,
        {"r": r, "effects_checked": len(p_factors), "states_checked": len(q_factors)},
    )


def _split_test(theory, S: TransfMap, I: TransfMap) -> Optional[TestSpec]:
    """{tS, I - tS} for the largest tested t = 2^-k keeping both events admissible."""
    t = ONE
    for _ in range(64):
        St = S.scale(t)
        if theory.refines(St, I):
            return TestSpec.of([St, I - St], ["s", "rest"], "split")
        t = t / 2
    return None


def niwd_upon(theory, A, pair: RestrictionPair, extra_tests=()) -> Verdict:
    """Atomicity of the identity upon the completed pair, cross-checked by enumeration.

    Refinements considered are those of the identity itself and every event
    of a catalog test whose coarse-graining equals the identity upon the
    completed pair.
    """
    A = tuple(A)
    full = pair.completed()
    I = theory.identity(A)
    tests = list(theory.test_catalog(A))
    seen = {tuple(E.data for E in t.events) for t in tests}
    tests += [t for t in extra_tests if tuple(E.data for E in t.events) not in seen]
    nd_tests = [t for t in tests if t.inp == A and t.out == A and nondisturbing_upon(theory, t, full)]
    extra = [E for t in nd_tests for E in t.events]
    face_gens = _refinement_generators(theory, I)
    ref_img = restricted_image(theory, I, full)
    bad = [S for S in face_gens + extra if la.proportional_factor(restricted_image(theory, S, full), ref_img) is None]
    atomic = not bad
    # enumeration route: every non-disturbing test must be no-information
    checked = []
    for S in bad:
        split = _split_test(theory, S, I) if theory.refines(S, I) else None
        if split is not None:
            nd_tests.append(split)
    enum_ok = True
    for t in nd_tests:
        v = noinfo_upon(theory, t, full)
        checked.append({"test": t.name, "no_information": bool(v.result)})
        enum_ok = enum_ok and bool(v.result)
    if atomic != enum_ok:
        raise InconsistencyError(
            f"{theory.name}/{fmt_system(A)}: identity atomic upon the pair = {atomic}, "
            f"enumeration = {enum_ok}"
        )
    sufficient = _faithful_pure_witness(theory, full)
    if sufficient is not None and not atomic:
        raise InconsistencyError("a pure faithful state exists upon the pair but the identity is refinable")
    cert = {
        "pair": pair.describe(),
        "nondisturbing_tests": checked,
        "refinable_by": [S.label or f"event{k}" for k, S in enumerate(bad)],
    }
    return Verdict(
        "niwd-upon", theory.name, (fmt_system(A),), atomic, cert,
        {"enumeration": enum_ok, "pure_faithful_state": sufficient is not None},
        decided_by="cone" if theory.convex else "catalog",
    )


# --------------------------------------------------------------------------
# faithfulness upon a pair


def is_null_upon(theory, psi, C, pair: RestrictionPair) -> bool:
    """psi pairs to zero with every deterministic effect of Y^ on its ancilla."""
    AC = compose(pair.A, C)
    dets = [e for B, e in pair.deterministic_effects() if B == tuple(C)]
    return all(theory.pair(e, psi, AC) == 0 for e in dets)


def faithful_upon(theory, psi, C, pair: RestrictionPair) -> bool:
    """T -> (T x I)psi is injective modulo the kernel of equality upon the pair."""
    C = tuple(C)
    if is_null_upon(theory, psi, C, pair):
        return False
    basis = theory.transf_span_basis(pair.A, pair.B)
    imgs = [theory.apply_at(T, psi, TRIVIAL, C) for T in basis]
    both = [tuple(a) + restricted_image(theory, T, pair) for a, T in zip(imgs, basis)]
    return la.rank([list(v) for v in both]) == la.rank([list(v) for v in imgs])


def faithful_effect_upon(theory, c, C, pair: RestrictionPair) -> bool:
    C = tuple(C)
    basis = theory.transf_span_basis(pair.A, pair.B)
    imgs = [theory.apply_dual_at(T, c, TRIVIAL, C) for T in basis]
    both = [tuple(a) + restricted_image(theory, T, pair) for a, T in zip(imgs, basis)]
    return la.rank([list(v) for v in both]) == la.rank([list(v) for v in imgs])


def _faithful_pure_witness(theory, pair: RestrictionPair):
    """A pure element of X^ that is faithful upon the pair, if one is listed."""
    if pair.X is None:
        return None
    for C, states in sorted(pair.completion_x.items()):
        cone = theory.state_cone(compose(pair.A, C))
        for s in states:
            if la.is_zero(s) or not cone.is_extreme(s):
                continue
            if faithful_upon(theory, s, C, pair):
                return C, s
    return None


# --------------------------------------------------------------------------
# refinement inclusions


def _refinements_of_dilation(theory, psi, AC, rng, samples):
    """psi and some of its refinements (face points scaled below psi)."""
    cone = theory.state_cone(AC)
    out = [psi]
    if isinstance(cone, PolyCone):
        _, _, gens = cone.face(psi)
        for g in gens[:samples]:
            t = ONE
            for _ in range(64):
                if cone.contains(la.vsub(psi, la.vscale(t, g))):
                    out.append(la.vscale(t, g))
                    break
                t = t / 2
    else:
        for k in range(1, samples + 1):
            out.append(la.vscale(q(k, samples + 1), psi))
    return out


def refinement_inclusion_check(theory, rho, A, dilations=None, samples: int = 20, seed: int = 0) -> Verdict:
    """Refinements of dilations are dilations of refinements; local effects map dilations into Ref(rho)."""
    rng = random.Random(seed)
    A = tuple(A)
    if dilations is None:
        dilations = dilations_of(theory, rho, A, seed=seed)
    scone = theory.state_cone(A)
    checked_marg = checked_eff = 0
    for C, psi in dilations:
        AC = compose(A, C)
        uC = theory.unit_effect(C)
        if theory.discard(psi, A, C, uC) != tuple(rho):
            raise ValueError("listed dilation does not reduce to rho")
        for ref in _refinements_of_dilation(theory, psi, AC, rng, 3):
            marg = theory.discard(ref, A, C, uC)
            if not (scone.contains(marg) and scone.contains(la.vsub(rho, marg))):
                return Verdict(
                    "inclusion", theory.name, (fmt_system(A),), False,
                    {"relation": "refinement-of-dilation", "ancilla": fmt_system(C), "refinement": ref},
                )
            checked_marg += 1
        effs = theory.sample_effects(C, rng, samples)
        for b in effs:
            img = theory.discard(psi, A, C, b)
            if not (scone.contains(img) and scone.contains(la.vsub(rho, img))):
                return Verdict(
                    "inclusion", theory.name, (fmt_system(A),), False,
                    {"relation": "effect-on-dilation", "ancilla": fmt_system(C), "effect": b},
                )
            checked_eff += 1
    return Verdict(
        "inclusion", theory.name, (fmt_system(A),), True,
        {"dilations": len(dilations), "refinements_checked": checked_marg, "effects_checked": checked_eff},
    )


# --------------------------------------------------------------------------
# the fermionic local-only scenario


def fermionic_local_scenario(theory=None) -> dict:
    """Parity test on two modes with only local preparations and observations.

    Returns the verdicts that show information without disturbance upon
    this restriction, and the disturbance revealed once the three-mode
    dilation is admitted as an input.
    """
    from .zoo import get_theory

    th = theory or get_theory("fermionic3")
    N = th.system(2)
    test = th.parity_projectors(2)
    rng = random.Random(7)
    local_states = [th.ket_state(th.basis_vec(4, k), N) for k in range(4)]
    local_states.append(th.normalise(th.unit_effect(N), N))
    local_states.extend(th.sample_states(N, rng, 3))
    local_effects = [th.ket_state(th.basis_vec(4, k), N) for k in range(4)]
    local_effects.extend(th.sample_effects(N, rng, 3))
    X = [(TRIVIAL, s) for s in local_states]
    Y = [(TRIVIAL, e) for e in local_effects]
    local = RestrictionPair.build(th, N, X, Y)
    nd = nondisturbing_upon(th, test, local)
    ni = noinfo_upon(th, test, local)
    psi = th.psi3()
    F = th.system(1)
    with_dilation = RestrictionPair.build(th, N, X + [(F, psi)], Y + [(F, th.unit_effect(compose(N, F)))])
    nd_dil = nondisturbing_upon(th, test, with_dilation)
    return {
        "test": test,
        "local_pair": local,
        "nondisturbing_local": nd,
        "noinfo_local": ni,
        "nondisturbing_with_dilation": nd_dil,
        "unrestricted": check_non_disturbing(th, test),
    }

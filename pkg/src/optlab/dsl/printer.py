"""Canonical pretty-printer; its output reparses to an equal syntax tree."""

from __future__ import annotations

from ..rational import fmt_short as fmt
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


def _sys(s) -> str:
    return "*".join(s.names) if s.names else "I"


def _entry(e) -> str:
    re, im = e
    if im == 0:
        return fmt(re)
    return f"({fmt(re)}, {fmt(im)})"


def _vector(entries) -> str:
    return "[" + ", ".join(_entry(e) for e in entries) + "]"


def _primary(p) -> str:
    if isinstance(p, NameRef):
        return p.name
    if isinstance(p, VectorLit):
        return _vector(p.entries)
    if isinstance(p, MatrixLit):
        return "[" + ", ".join(_vector(r) for r in p.rows) + "]"
    if isinstance(p, Call):
        return f"{p.func}(" + ", ".join(print_value(a) for a in p.args) + ")"
    raise TypeError(p)


def print_value(v: Value) -> str:
    parts = []
    for k, t in enumerate(v.terms):
        c = t.coeff
        neg = c < 0
        mag = -c if neg else c
        body = _primary(t.primary) if mag == 1 else f"{fmt(mag)}*{_primary(t.primary)}"
        if k == 0:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append(("- " if neg else "+ ") + body)
    return " ".join(parts)


def _events(events) -> str:
    inner = ",\n".join(f"  {e.label}: {print_value(e.value)}" for e in events)
    return "{\n" + inner + "\n}"


def _names(ns) -> str:
    return "all" if ns is None else ", ".join(ns)


def print_decl(d) -> str:
    if isinstance(d, TheoryDecl):
        return f"theory {d.name}"
    if isinstance(d, SystemDecl):
        return f"system {d.name} : {_sys(d.system)}"
    if isinstance(d, (PrepDecl, ObsDecl)):
        kw = "prep" if isinstance(d, PrepDecl) else "obs"
        head = f"{kw} {d.name} : {_sys(d.system)}"
        if d.single:
            return f"{head} = {print_value(d.events[0].value)}"
        return f"{head} {_events(d.events)}"
    if isinstance(d, TestDecl):
        return f"test {d.name} on {_sys(d.inp)} -> {_sys(d.out)} {_events(d.events)}"
    if isinstance(d, CircuitDecl):
        def atom(a):
            return a.name if isinstance(a, RefAtom) else f"id({_sys(a.system)})"

        stages = " ; ".join(" | ".join(atom(a) for a in st) for st in d.stages)
        return f"circuit {d.name} = {stages}"
    if isinstance(d, RestrictDecl):
        return f"restrict {d.name} on {_sys(d.system)} {{ inputs: {_names(d.inputs)} ; outputs: {_names(d.outputs)} }}"
    raise TypeError(d)


def print_program(p: Program) -> str:
    return "\n".join(print_decl(d) for d in p.decls) + "\n"

"""Syntax tree for circuit files.  Spans are kept out of equality."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple, Union

from gmpy2 import mpq

from .errors import SourceSpan


def _span():
    return field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class SysExpr:
    names: Tuple[str, ...]  # () is the trivial system "I"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class NameRef:
    name: str
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class VectorLit:
    entries: Tuple[Tuple[mpq, mpq], ...]  # (re, im)
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class MatrixLit:
    rows: Tuple[Tuple[Tuple[mpq, mpq], ...], ...]
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Call:
    func: str
    args: Tuple["Value", ...]
    span: Optional[SourceSpan] = _span()


Primary = Union[NameRef, VectorLit, MatrixLit, Call]


@dataclass(frozen=True)
class Term:
    coeff: mpq
    primary: Primary


@dataclass(frozen=True)
class Value:
    terms: Tuple[Term, ...]
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Event:
    label: str
    value: Value


@dataclass(frozen=True)
class TheoryDecl:
    name: str
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class SystemDecl:
    name: str
    system: SysExpr
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class PrepDecl:
    """A preparation: one deterministic state (``= value``) or a labelled test."""

    name: str
    system: SysExpr
    events: Tuple[Event, ...]
    single: bool
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class ObsDecl:
    name: str
    system: SysExpr
    events: Tuple[Event, ...]
    single: bool
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class TestDecl:
    __test__ = False  # not a pytest class

    name: str
    inp: SysExpr
    out: SysExpr
    events: Tuple[Event, ...]
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class RefAtom:
    name: str
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class IdAtom:
    system: SysExpr
    span: Optional[SourceSpan] = _span()


Atom = Union[RefAtom, IdAtom]


@dataclass(frozen=True)
class CircuitDecl:
    name: str
    stages: Tuple[Tuple[Atom, ...], ...]
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class RestrictDecl:
    """Restricted inputs/outputs on a system; ``None`` means every dilation."""

    name: str
    system: SysExpr
    inputs: Optional[Tuple[str, ...]]
    outputs: Optional[Tuple[str, ...]]
    span: Optional[SourceSpan] = _span()


Decl = Union[TheoryDecl, SystemDecl, PrepDecl, ObsDecl, TestDecl, CircuitDecl, RestrictDecl]


@dataclass(frozen=True)
class Program:
    decls: Tuple[Decl, ...]

    def of_type(self, cls):
        return [d for d in self.decls if isinstance(d, cls)]

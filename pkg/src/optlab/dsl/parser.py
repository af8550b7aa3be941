"""Recursive-descent parser.

Grammar::

    program   := decl+
    decl      := "theory" NAME
               | "system" NAME ":" sysexpr
               | "prep" NAME ":" sysexpr ( "=" value | "{" events "}" )
               | "obs"  NAME ":" sysexpr ( "=" value | "{" events "}" )
               | "test" NAME "on" sysexpr "->" sysexpr "{" events "}"
               | "circuit" NAME "=" stage ( ";" stage )*
               | "restrict" NAME "on" sysexpr "{" "inputs" ":" names ";" "outputs" ":" names "}"
    names     := "all" | NAME ( "," NAME )*
    stage     := atom ( "|" atom )*
    atom      := NAME | "id" "(" sysexpr ")"
    sysexpr   := NAME ( "*" NAME )*
    events    := event ( "," event )* [","]
    event     := label ":" value          label := NAME | integer
    value     := ["-"] term ( ("+" | "-") term )*
    term      := [rational "*"] primary | rational
    primary   := NAME | NAME "(" value ("," value)* ")" | vector | matrix | "(" value ")"
    vector    := "[" entry ("," entry)* "]"
    matrix    := "[" vector ("," vector)* "]"
    entry     := ["-"] rational | "(" ["-"] rational "," ["-"] rational ")"

The system name ``I`` denotes the trivial system.
"""

from __future__ import annotations

from typing import List

from ..rational import ONE, ZERO, q
from .ast import (
    Call,
    CircuitDecl,
    Event,
    IdAtom,
    MatrixLit,
    NameRef,
    ObsDecl,
    PrepDecl,
    Program,
    RefAtom,
    RestrictDecl,
    SysExpr,
    SystemDecl,
    Term,
    TestDecl,
    TheoryDecl,
    Value,
    VectorLit,
)
from .errors import ParseError, SourceSpan
from .lexer import EOF, IDENT, KEYWORD, RATIONAL, SYMBOL, Token, tokenize

DECL_KEYWORDS = ("theory", "system", "prep", "obs", "test", "circuit", "restrict")


def _join(a: SourceSpan, b: SourceSpan) -> SourceSpan:
    return SourceSpan(a.line, a.column, b.end_line, b.end_column)


class Parser:
    def __init__(self, tokens: List[Token]):
        self.toks = tokens
        self.i = 0

    # -- token helpers --------------------------------------------------------
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def advance(self) -> Token:
        t = self.toks[self.i]
        if t.kind != EOF:
            self.i += 1
        return t

    def at(self, kind, lexeme=None) -> bool:
        return self.tok.is_(kind, lexeme)

    def at_sym(self, s) -> bool:
        return self.at(SYMBOL, s)

    def expect(self, kind, lexeme=None, what=None) -> Token:
        if self.at(kind, lexeme):
            return self.advance()
        want = what or (repr(lexeme) if lexeme else kind)
        found = self.tok.lexeme or "end of input"
        raise ParseError(f"unexpected {found!r}", self.tok.span, [want])

    def sym(self, s) -> Token:
        return self.expect(SYMBOL, s, repr(s))

    def name(self, what="name") -> Token:
        return self.expect(IDENT, None, what)

    # -- program --------------------------------------------------------------
    def program(self) -> Program:
        decls = []
        while not self.at(EOF):
            decls.append(self.decl())
        if not decls:
            raise ParseError("expected declaration", self.tok.span, [repr(k) for k in DECL_KEYWORDS])
        return Program(tuple(decls))

    def decl(self):
        t = self.tok
        if not t.is_(KEYWORD) or t.lexeme not in DECL_KEYWORDS:
            raise ParseError(
                f"unexpected {t.lexeme or 'end of input'!r}; expected declaration",
                t.span, [repr(k) for k in DECL_KEYWORDS],
            )
        return getattr(self, "decl_" + t.lexeme)()

    def decl_theory(self):
        kw = self.advance()
        n = self.name("theory name")
        name, last = n.lexeme, n
        # hyphenated names such as prbox-max, written without spaces
        while self.at_sym("-") and self.tok.span.column == last.span.end_column and self.tok.span.line == last.span.line:
            dash = self.advance()
            nxt = self.name("theory name")
            if nxt.span.column != dash.span.end_column:
                raise ParseError("spaces are not allowed inside a theory name", nxt.span)
            name, last = f"{name}-{nxt.lexeme}", nxt
        return TheoryDecl(name, _join(kw.span, last.span))

    def decl_system(self):
        kw = self.advance()
        n = self.name("system name")
        self.sym(":")
        s = self.sysexpr()
        return SystemDecl(n.lexeme, s, _join(kw.span, s.span))

    def _events_or_value(self):
        if self.at_sym("="):
            self.advance()
            v = self.value()
            return (Event("", v),), True
        self.sym("{")
        evs = self.events()
        self.sym("}")
        return evs, False

    def decl_prep(self):
        kw = self.advance()
        n = self.name("preparation name")
        self.sym(":")
        s = self.sysexpr()
        events, single = self._events_or_value()
        return PrepDecl(n.lexeme, s, events, single, _join(kw.span, self.toks[self.i - 1].span))

    def decl_obs(self):
        kw = self.advance()
        n = self.name("observation name")
        self.sym(":")
        s = self.sysexpr()
        events, single = self._events_or_value()
        return ObsDecl(n.lexeme, s, events, single, _join(kw.span, self.toks[self.i - 1].span))

    def decl_test(self):
        kw = self.advance()
        n = self.name("test name")
        self.expect(KEYWORD, "on", "'on'")
        a = self.sysexpr()
        self.sym("->")
        b = self.sysexpr()
        self.sym("{")
        evs = self.events()
        end = self.sym("}")
        return TestDecl(n.lexeme, a, b, evs, _join(kw.span, end.span))

    def decl_circuit(self):
        kw = self.advance()
        n = self.name("circuit name")
        self.sym("=")
        stages = [self.stage()]
        while self.at_sym(";"):
            self.advance()
            stages.append(self.stage())
        return CircuitDecl(n.lexeme, tuple(stages), _join(kw.span, self.toks[self.i - 1].span))

    def decl_restrict(self):
        kw = self.advance()
        n = self.name("restriction name")
        self.expect(KEYWORD, "on", "'on'")
        s = self.sysexpr()
        self.sym("{")
        self.expect(KEYWORD, "inputs", "'inputs'")
        self.sym(":")
        ins = self.names()
        self.sym(";")
        self.expect(KEYWORD, "outputs", "'outputs'")
        self.sym(":")
        outs = self.names()
        end = self.sym("}")
        return RestrictDecl(n.lexeme, s, ins, outs, _join(kw.span, end.span))

    def names(self):
        if self.at(KEYWORD, "all"):
            self.advance()
            return None
        out = [self.name("preparation or observation name").lexeme]
        while self.at_sym(","):
            self.advance()
            out.append(self.name().lexeme)
        return tuple(out)

    # -- circuits -------------------------------------------------------------
    def stage(self):
        atoms = [self.atom()]
        while self.at_sym("|"):
            self.advance()
            atoms.append(self.atom())
        return tuple(atoms)

    def atom(self):
        if self.at(KEYWORD, "id"):
            kw = self.advance()
            self.sym("(")
            s = self.sysexpr()
            end = self.sym(")")
            return IdAtom(s, _join(kw.span, end.span))
        n = self.name("circuit element")
        return RefAtom(n.lexeme, n.span)

    def sysexpr(self) -> SysExpr:
        first = self.name("system")
        names = [first.lexeme]
        last = first
        while self.at_sym("*"):
            self.advance()
            last = self.name("system")
            names.append(last.lexeme)
        if names == ["I"]:
            names = []
        return SysExpr(tuple(names), _join(first.span, last.span))

    # -- values ---------------------------------------------------------------
    def events(self):
        evs = [self.event()]
        while self.at_sym(","):
            self.advance()
            if self.at_sym("}"):
                break
            evs.append(self.event())
        labels = [e.label for e in evs]
        if len(set(labels)) != len(labels):
            raise ParseError("duplicate outcome label", self.tok.span)
        return tuple(evs)

    def event(self):
        if self.at(IDENT) or self.at(RATIONAL):
            lab = self.advance()
            if "/" in lab.lexeme:
                raise ParseError("outcome labels must be names or integers", lab.span)
        else:
            raise ParseError(f"unexpected {self.tok.lexeme!r}", self.tok.span, ["outcome label"])
        self.sym(":")
        return Event(lab.lexeme, self.value())

    def value(self) -> Value:
        start = self.tok.span
        sign = ONE
        if self.at_sym("-"):
            self.advance()
            sign = -ONE
        terms = [self.term(sign)]
        while self.at_sym("+") or self.at_sym("-"):
            s = ONE if self.advance().lexeme == "+" else -ONE
            terms.append(self.term(s))
        return Value(tuple(terms), _join(start, self.toks[self.i - 1].span))

    def term(self, sign) -> Term:
        if self.at(RATIONAL):
            r = q(self.advance().lexeme)
            if self.at_sym("*"):
                self.advance()
                return Term(sign * r, self.primary())
            raise ParseError("a bare number needs '*' and a value", self.tok.span, ["'*'"])
        return Term(sign, self.primary())

    def primary(self):
        t = self.tok
        if self.at(IDENT):
            self.advance()
            if self.at_sym("("):
                self.advance()
                args = [self.value()]
                while self.at_sym(","):
                    self.advance()
                    args.append(self.value())
                end = self.sym(")")
                return Call(t.lexeme, tuple(args), _join(t.span, end.span))
            return NameRef(t.lexeme, t.span)
        if self.at(KEYWORD, "id"):
            self.advance()
            return NameRef("id", t.span)
        if self.at_sym("["):
            return self.array()
        raise ParseError(f"unexpected {t.lexeme or 'end of input'!r}", t.span, ["value"])

    def array(self):
        start = self.sym("[")
        if self.at_sym("["):
            rows = [self.vector_body()]
            while self.at_sym(","):
                self.advance()
                rows.append(self.vector_body())
            end = self.sym("]")
            if len({len(r) for r in rows}) != 1:
                raise ParseError("matrix rows have different lengths", _join(start.span, end.span))
            return MatrixLit(tuple(rows), _join(start.span, end.span))
        entries = self.entries()
        end = self.sym("]")
        return VectorLit(entries, _join(start.span, end.span))

    def vector_body(self):
        self.sym("[")
        e = self.entries()
        self.sym("]")
        return e

    def entries(self):
        out = [self.entry()]
        while self.at_sym(","):
            self.advance()
            out.append(self.entry())
        return tuple(out)

    def signed(self):
        s = ONE
        if self.at_sym("-"):
            self.advance()
            s = -ONE
        return s * q(self.expect(RATIONAL, None, "number").lexeme)

    def entry(self):
        if self.at_sym("("):
            self.advance()
            re = self.signed()
            self.sym(",")
            im = self.signed()
            self.sym(")")
            return (re, im)
        return (self.signed(), ZERO)


def parse(source_or_tokens) -> Program:
    toks = tokenize(source_or_tokens) if isinstance(source_or_tokens, str) else list(source_or_tokens)
    return Parser(toks).program()

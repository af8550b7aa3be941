"""Tokenizer for ``.opt`` circuit files."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List

from .errors import LexError, SourceSpan

KEYWORDS = frozenset(
    {"theory", "system", "prep", "test", "obs", "circuit", "on", "id", "restrict", "inputs", "outputs", "all"}
)
SYMBOLS = ("->", ":", "=", "{", "}", "(", ")", "[", "]", ",", ";", "|", "*", "+", "-")

IDENT, KEYWORD, SYMBOL, RATIONAL, EOF = "ident", "keyword", "symbol", "rational", "eof"


@dataclass(frozen=True)
class Token:
    kind: str
    lexeme: str
    span: SourceSpan

    def is_(self, kind, lexeme=None) -> bool:
        return self.kind == kind and (lexeme is None or self.lexeme == lexeme)


def _ident_start(c):
    return c.isascii() and (c.isalpha() or c == "_")


def _ident_char(c):
    return c.isascii() and (c.isalnum() or c == "_")


def tokenize(source: str) -> List[Token]:
    """Token list ending with an EOF token; raises LexError on the first bad character."""
    toks: List[Token] = []
    i, line, col = 0, 1, 1
    n = len(source)

    def span(l0, c0, length):
        return SourceSpan(l0, c0, l0, c0 + length)

    while i < n:
        c = source[i]
        if c == "\n":
            i, line, col = i + 1, line + 1, 1
            continue
        if c in " \t\r":
            i, col = i + 1, col + 1
            continue
        if c == "#":
            while i < n and source[i] != "\n":
                i += 1
            continue
        if _ident_start(c):
            j = i
            while j < n and _ident_char(source[j]):
                j += 1
            word = source[i:j]
            toks.append(Token(KEYWORD if word in KEYWORDS else IDENT, word, span(line, col, j - i)))
            col += j - i
            i = j
            continue
        if c.isdigit():
            j = i
            while j < n and source[j].isdigit():
                j += 1
            if j < n and source[j] == "/":
                k = j + 1
                while k < n and source[k].isdigit():
                    k += 1
                if k == j + 1:
                    raise LexError("malformed rational: missing denominator", span(line, col, k - i))
                if int(source[j + 1:k]) == 0:
                    raise LexError("malformed rational: zero denominator", span(line, col, k - i))
                j = k
            if j < n and (_ident_start(source[j]) or source[j] == "."):
                raise LexError(f"malformed rational {source[i:j + 1]!r}", span(line, col, j + 1 - i))
            toks.append(Token(RATIONAL, source[i:j], span(line, col, j - i)))
            col += j - i
            i = j
            continue
        for sym in SYMBOLS:
            if source.startswith(sym, i):
                toks.append(Token(SYMBOL, sym, span(line, col, len(sym))))
                i += len(sym)
                col += len(sym)
                break
        else:
            raise LexError(f"illegal character {c!r}", span(line, col, 1))
    toks.append(Token(EOF, "", SourceSpan(line, col, line, col)))
    return toks

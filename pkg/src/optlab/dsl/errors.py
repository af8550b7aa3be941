"""Diagnostics carrying a source position."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int
    end_line: int
    end_column: int

    def __str__(self):
        return f"{self.line}:{self.column}"


class DslError(Exception):
    """Base class; ``span`` locates the offending text when known."""

    stage = "error"

    def __init__(self, message: str, span: SourceSpan = None):
        self.message = message
        self.span = span
        where = f"{span}: " if span is not None else ""
        super().__init__(f"{where}{self.stage}: {message}")


class LexError(DslError):
    stage = "lexical error"


class ParseError(DslError):
    stage = "syntax error"

    def __init__(self, message: str, span: SourceSpan = None, expected=()):
        self.expected = tuple(expected)
        if expected:
            message = f"{message} (expected {', '.join(sorted(set(expected)))})"
        super().__init__(message, span)


class BindError(DslError):
    stage = "binding error"


class EvalError(DslError):
    stage = "evaluation error"
